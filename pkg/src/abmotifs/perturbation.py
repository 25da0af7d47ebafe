"""Hamiltonian disorder and perturbation theory for the undamped Liouvillian pair."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .lattice import MotifGraph
from .liouville import Liouvillian, SpectralData, assemble, hamiltonian_superoperator, spectrum
from .sectors import SectorBasis, SectorOperator, project_dissipators, project_hamiltonian, enumerate_basis

logger = logging.getLogger(__name__)

KINDS = ("on_site", "coupling", "flux")


@dataclass(frozen=True)
class DisorderSpec:
    kind: str
    strength: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown disorder kind {self.kind!r}; choose from {KINDS}")
        if self.strength < 0:
            raise ValueError("disorder strength must be non-negative")


@dataclass(frozen=True, eq=False)
class Disorder:
    """One disorder realisation: uniform draws in [-1, 1] before scaling.

    ``on_site`` draws one field per site, ``coupling`` one amplitude shift per
    bond and ``flux`` one phase shift per plaquette, put on the bond from the
    outer spin to the next inner spin.
    """

    spec: DisorderSpec
    graph: MotifGraph
    draws: np.ndarray

    def _flux_bonds(self) -> list[int]:
        out = []
        for q in self.graph.plaquettes:
            a, b = q[2], q[3]
            hits = [j for j, bd in enumerate(self.graph.bonds) if bd.source == a and bd.target == b]
            if len(hits) != 1:
                raise ValueError(f"plaquette {q} has no unique outer bond {a} -> {b}")
            out.append(hits[0])
        return out

    def perturbed_graph(self) -> MotifGraph:
        eps, u, g = self.spec.strength, self.draws, self.graph
        if self.spec.kind == "on_site":
            return replace(g, on_site=tuple(h + eps * x for h, x in zip(g.on_site, u)))
        bonds = list(g.bonds)
        if self.spec.kind == "coupling":
            bonds = [replace(b, amplitude=b.amplitude + eps * x) for b, x in zip(bonds, u)]
        else:
            for j, x in zip(self._flux_bonds(), u):
                bonds[j] = replace(bonds[j], phase=float(np.mod(bonds[j].phase + eps * x, 2 * np.pi)))
        return replace(g, bonds=tuple(bonds))

    def generator_graph(self) -> MotifGraph:
        """Graph whose Hamiltonian is the unit-strength perturbation ``V``.

        For flux disorder ``V`` is the derivative of ``H`` with respect to the
        plaquette phase shifts at zero shift.
        """
        g, u = self.graph, self.draws
        zeros = (0.0,) * g.n_sites
        if self.spec.kind == "on_site":
            return replace(g, on_site=tuple(float(x) for x in u), bonds=())
        if self.spec.kind == "coupling":
            bonds = tuple(replace(b, amplitude=float(x)) for b, x in zip(g.bonds, u))
        else:
            bonds = tuple(replace(g.bonds[j], amplitude=g.bonds[j].amplitude * float(x),
                                  phase=g.bonds[j].phase + np.pi / 2)
                          for j, x in zip(self._flux_bonds(), u))
        return replace(g, on_site=zeros, bonds=bonds)

    def unit_operator(self, basis: SectorBasis) -> SectorOperator:
        return project_hamiltonian(self.generator_graph(), basis)

    def operator(self, basis: SectorBasis) -> SectorOperator:
        """``epsilon V`` in the given sector."""
        V = self.unit_operator(basis)
        return SectorOperator(basis, self.spec.strength * V.matrix, hermitian=True)


def sample_disorder(spec: DisorderSpec, graph: MotifGraph) -> Disorder:
    rng = np.random.default_rng(spec.seed)
    size = {"on_site": graph.n_sites, "coupling": len(graph.bonds),
            "flux": len(graph.plaquettes)}[spec.kind]
    return Disorder(spec, graph, rng.uniform(-1.0, 1.0, size))


@dataclass(frozen=True)
class PerturbationReport:
    lambda0: complex
    first_order: complex
    second_order: complex
    epsilon: float
    exact: complex
    predicted: complex
    discrepancy: float
    skipped_denominators: int


def _plus_mode(S: SpectralData, tol: float = 1e-10) -> int:
    lam = S.eigenvalues
    cand = np.flatnonzero((np.abs(lam.real) < tol) & (lam.imag > tol))
    if len(cand) != 1:
        raise ValueError(f"expected one undamped mode with positive frequency, found {len(cand)}")
    return int(cand[0])


def perturbative_corrections(L0: Liouvillian, S: SpectralData, V, epsilon: float = 0.0,
                             mode: int | None = None) -> PerturbationReport:
    """First- and second-order shifts of the ``+i Omega`` eigenvalue under ``H + eps V``.

    ``V`` acts as ``-i[V, .]``.  The exact eigenvalue at ``epsilon`` comes from
    diagonalising the perturbed generator and picking the eigenvalue closest
    to the second-order prediction.
    """
    Vm = V.matrix if isinstance(V, SectorOperator) else np.asarray(V)
    P = hamiltonian_superoperator(Vm)
    k = _plus_mode(S) if mode is None else mode
    lam = S.eigenvalues
    sig = S.left[:, k].conj()
    first = complex(sig @ P @ S.right[:, k])
    row = sig @ P @ S.right
    col = S.left.conj().T @ (P @ S.right[:, k])
    denom = lam[k] - lam
    ok = np.abs(denom) >= 1e-8
    ok[k] = False
    near = np.flatnonzero(~ok)
    near = near[near != k]
    if len(near) and np.max(np.abs(row[near] * col[near])) > 1e-12:
        logger.warning("%d near-degenerate denominators with non-zero couplings skipped", len(near))
    second = complex(np.sum(row[ok] * col[ok] / denom[ok]))
    predicted = lam[k] + epsilon * first + epsilon**2 * second
    if epsilon:
        perturbed = np.linalg.eigvals(L0.matrix + epsilon * P)
        exact = complex(perturbed[np.argmin(np.abs(perturbed - predicted))])
    else:
        exact = complex(lam[k])
    return PerturbationReport(complex(lam[k]), first, second, epsilon, exact, predicted,
                              float(abs(exact - predicted)), len(near))


def least_damped_oscillation(eigenvalues: np.ndarray, tol_im: float = 1e-6) -> complex:
    lam = eigenvalues[np.abs(eigenvalues.imag) >= tol_im]
    return complex(lam[np.argmax(lam.real)])


@dataclass(frozen=True)
class ScanResult:
    kind: str
    rows: tuple
    exponent: float
    exponent_ci: tuple
    fitted_epsilons: np.ndarray
    median_rates: np.ndarray

    def oscillations_before_damping(self, omega: float, epsilon: float) -> float:
        rates = [r["decay_rate"] for r in self.rows if np.isclose(r["epsilon"], epsilon)]
        return float(omega / (2 * np.pi * np.median(rates)))


def decay_rate_scan(graph: MotifGraph, kind: str, epsilons, seeds, k: int = 1,
                    jobs: int = 1, omega: float | None = None, min_rate: float = 1e-12) -> ScanResult:
    """Decay rate of the slowest oscillating mode for every (epsilon, seed).

    The exponent is the slope of ``log(median rate)`` against ``log(epsilon)``
    over the points with non-negligible rate; ``epsilon = 0`` never enters
    the fit.
    """
    basis = enumerate_basis(graph.n_sites, k)
    dissipators = project_dissipators(graph, basis)
    H0 = project_hamiltonian(graph, basis)
    if omega is None:
        omega = least_damped_oscillation(spectrum(assemble(H0, dissipators)).eigenvalues).imag
    omega = abs(omega)

    def job(args):
        eps, seed = args
        dis = sample_disorder(DisorderSpec(kind, eps, seed), graph)
        H = project_hamiltonian(dis.perturbed_graph(), basis)
        lam = np.linalg.eigvals(assemble(H, dissipators).matrix)
        top = least_damped_oscillation(lam)
        return {"kind": kind, "epsilon": float(eps), "seed": int(seed),
                "decay_rate": float(-top.real), "freq_shift": float(abs(top.imag) - omega)}

    grid = [(float(e), int(s)) for e in epsilons for s in seeds]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(job, grid))
    else:
        rows = [job(x) for x in grid]

    eps_fit, med = [], []
    for e in sorted(set(float(x) for x in epsilons)):
        rates = np.array([r["decay_rate"] for r in rows if r["epsilon"] == e])
        m = float(np.median(rates))
        if e > 0 and m > min_rate:
            eps_fit.append(e)
            med.append(m)
    eps_fit, med = np.array(eps_fit), np.array(med)
    if len(eps_fit) < 2 or eps_fit.max() / eps_fit.min() < 10:
        raise ValueError("scaling fit needs epsilons spanning at least one decade")
    fit = stats.linregress(np.log(eps_fit), np.log(med))
    half = stats.t.ppf(0.975, len(eps_fit) - 2) * fit.stderr if len(eps_fit) > 2 else float("nan")
    return ScanResult(kind, tuple(rows), float(fit.slope), (fit.slope - half, fit.slope + half),
                      eps_fit, med)
