"""Closed-form results for single motifs and the checks that certify them.

Phase convention used by the analytic forms: with ``rho_pm = <psi+|rho0|psi->``
and ``Omega = E+ - E- = 2 sqrt(n) g`` the coherence evolves as
``rho_pm(t) = rho_pm exp(-i Omega t)``.  The phase ``phi`` is defined through
``<psi-|rho0|psi+> = |rho_pm| exp(i phi)`` so that every oscillating term reads
``cos(Omega t + phi)`` or ``sin(Omega t + phi)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .lattice import CENTRAL, INNER, OUTER, MotifGraph, rotate_label
from .liouville import SpectralData, vec
from .sectors import SectorBasis, SectorOperator


def psi_pm(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Dark states ``(+-|c> + n^{-1/2} sum_i |i>) / sqrt(2)`` of a C_n motif.

    Vectors live in the single-excitation basis of the default site order
    (centre, inner 1..n, outer 1..n).
    """
    if n < 2:
        raise ValueError("motif order must be >= 2")
    out = []
    for sign in (1.0, -1.0):
        v = np.zeros(2 * n + 1, dtype=complex)
        v[0] = sign
        v[1:n + 1] = 1 / np.sqrt(n)
        out.append(v / np.sqrt(2))
    return out[0], out[1]


def frequency(n: int, g: float) -> float:
    return 2 * np.sqrt(n) * g


@dataclass(frozen=True, eq=False)
class DarkSpace:
    basis: SectorBasis
    vectors: np.ndarray
    energies: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def find_dark_states(H: SectorOperator, dissipative_sites, tol: float = 1e-10) -> DarkSpace:
    """Largest H-invariant subspace with no weight on dissipative sites.

    Works in any excitation sector: the smallest invariant subspace that
    contains every configuration touching a dissipative site is grown by
    repeated application of ``H``; its orthogonal complement is dark.
    """
    basis = H.basis
    M = H.matrix
    occ = basis.occupations()
    sites = list(dissipative_sites)
    touched = occ[:, sites].any(axis=1) if sites else np.zeros(basis.dim, bool)
    Q = np.eye(basis.dim)[:, touched].astype(complex)
    while Q.shape[1] and Q.shape[1] < basis.dim:
        grown = scipy.linalg.orth(np.hstack([Q, M @ Q]), rcond=tol)
        if grown.shape[1] == Q.shape[1]:
            break
        Q = grown
    if Q.shape[1]:
        comp = scipy.linalg.null_space(Q.conj().T, rcond=tol)
    else:
        comp = np.eye(basis.dim, dtype=complex)
    if comp.shape[1] == 0:
        return DarkSpace(basis, comp, np.zeros(0))
    E, U = np.linalg.eigh(comp.conj().T @ M @ comp)
    return DarkSpace(basis, comp @ U, E)


@dataclass(frozen=True, eq=False)
class DynamicalSymmetry:
    operator: np.ndarray
    eigenfrequency: complex
    residual_H: float
    residuals_L: tuple
    certified: bool

    @property
    def liouvillian_eigenvalue(self) -> complex:
        """``L[A] = -i[H, A] = -i lambda A`` for a certified ``A``."""
        return -1j * self.eigenfrequency


def verify_dynamical_symmetry(H, dissipators, A: np.ndarray, rtol: float = 1e-10) -> DynamicalSymmetry:
    """Check ``[H, A] = lambda A`` and ``[L, A] = [L^dag, A] = 0`` for every channel."""
    Hm = H.matrix if isinstance(H, SectorOperator) else np.asarray(H)
    A = np.asarray(A, dtype=complex)
    if A.shape != Hm.shape:
        raise ValueError(f"operator shape {A.shape} does not match H {Hm.shape}")
    comm = Hm @ A - A @ Hm
    normA = np.linalg.norm(A)
    lam = np.vdot(A, comm) / normA**2 if normA else 0.0
    res_h = float(np.linalg.norm(comm - lam * A))
    res_l = []
    for op, rate in dissipators:
        L = np.sqrt(rate) * (op.matrix if isinstance(op, SectorOperator) else np.asarray(op))
        res_l.append(float(np.linalg.norm(L @ A - A @ L)))
        Ld = L.conj().T
        res_l.append(float(np.linalg.norm(Ld @ A - A @ Ld)))
    ok = (res_h < rtol * normA * np.linalg.norm(Hm)
          and all(r < rtol * normA for r in res_l))
    return DynamicalSymmetry(A, complex(lam), res_h, tuple(res_l), bool(ok))


@dataclass(frozen=True)
class AnalyticConstants:
    n: int
    omega: float
    A_c: float
    A_bar: float
    A_tilde: float
    C_c: float
    C_bar: float
    p_plus: float
    p_minus: float
    coherence: float
    phase: float
    stationary_weight: float

    @property
    def C_tilde_plus(self) -> float:
        return self.p_plus + self.p_minus

    @property
    def C_tilde_minus(self) -> float:
        return self.p_plus - self.p_minus


def stationary_pair(S: SpectralData, n: int):
    """The stationary mode outside the dark sector and its left partner.

    Inside the three-dimensional kernel, ``rho_bar`` is fixed by
    ``<psi+-|rho_bar|psi+-> = 0`` and ``Tr rho_bar = 1``; ``sigma_bar`` is the
    left zero mode dual to ``rho_bar`` and blind to the dark projectors.
    """
    K, Kl = S.kernel_right, S.kernel_left
    if K.shape[1] != 3:
        raise ValueError(f"expected a 3-dimensional kernel, found {K.shape[1]}")
    d = S.dim
    pp, pm = psi_pm(n)
    Pp, Pm = np.outer(pp, pp.conj()), np.outer(pm, pm.conj())
    probes = np.array([vec(Pp), vec(Pm), vec(np.eye(d))])
    x = np.linalg.solve(probes.conj() @ K, [0, 0, 1])
    rho_bar = (K @ x).reshape(d, d, order="F")
    targets = np.array([vec(Pp), vec(Pm), vec(rho_bar)])
    z = np.linalg.solve(targets @ Kl.conj(), [0, 0, 1])
    sigma_bar = (Kl @ z.conj()).reshape(d, d, order="F")
    return rho_bar, sigma_bar


def analytic_constants(S: SpectralData, rho0: np.ndarray, n: int, g: float) -> AnalyticConstants:
    """Offsets and oscillation data for a motif from its numerical kernel."""
    if rho0.shape != (2 * n + 1, 2 * n + 1):
        raise ValueError("constants need a single-excitation state of the same motif")
    if S.dim != 2 * n + 1:
        raise ValueError(f"spectral data of dimension {S.dim} does not belong to an n={n} motif")
    rho_bar, sigma_bar = stationary_pair(S, n)
    pp, pm = psi_pm(n)
    weight = np.vdot(vec(sigma_bar), vec(rho0))
    p_plus = float(np.real(pp.conj() @ rho0 @ pp))
    p_minus = float(np.real(pm.conj() @ rho0 @ pm))
    rho_mp = pm.conj() @ rho0 @ pp
    dark = p_plus + p_minus
    c, i1, i2, o1 = 0, 1, 2, n + 1

    def z_bar(site):
        return float(np.real(2 * rho_bar[site, site] - np.trace(rho_bar)))

    return AnalyticConstants(
        n=n,
        omega=frequency(n, g),
        A_c=float(np.real(z_bar(c) * weight)),
        A_bar=float(np.real(z_bar(i1) * weight)) + (1 / n - 1) * dark,
        A_tilde=float(np.real(z_bar(o1) * weight)) - dark,
        C_c=float(np.real(rho_bar[c, i1] * weight)),
        C_bar=float(np.real(rho_bar[i1, i2] * weight)),
        p_plus=p_plus,
        p_minus=p_minus,
        coherence=float(abs(rho_mp)),
        phase=float(np.angle(rho_mp)),
        stationary_weight=float(np.real(weight)),
    )


def analytic_magnetization(k: AnalyticConstants, kind: str, t):
    """Long-time ``<sigma^z>`` of the centre, any inner or any outer spin."""
    t = np.asarray(t, dtype=float)
    osc = 2 * k.coherence * np.cos(k.omega * t + k.phase)
    if kind == CENTRAL:
        return k.A_c - osc
    if kind == INNER:
        return k.A_bar + osc / k.n
    if kind == OUTER:
        return np.full_like(t, k.A_tilde)
    raise ValueError(f"unknown site kind {kind!r}")


def analytic_concurrence(k: AnalyticConstants, pair: str, t):
    """Long-time concurrence of a centre-inner (``'ci'``) or inner-inner (``'ij'``) pair.

    The static offsets enter inside the modulus,
    ``|2 C_c + n^{-1/2} (C~_- - 2i|rho_pm| sin(Omega t + phi))|`` and
    ``|2 C_bar + n^{-1} (C~_+ + 2|rho_pm| cos(Omega t + phi))|``, which reduces to
    the familiar ``2 C + |...|`` form whenever offset and oscillating part are
    aligned (for instance when the offset vanishes).
    """
    t = np.asarray(t, dtype=float)
    x = k.omega * t + k.phase
    if pair == "ci":
        return np.abs(2 * k.C_c + (k.C_tilde_minus - 2j * k.coherence * np.sin(x)) / np.sqrt(k.n))
    if pair == "ij":
        return np.abs(2 * k.C_bar + (k.C_tilde_plus + 2 * k.coherence * np.cos(x)) / k.n)
    raise ValueError(f"unknown pair kind {pair!r}")


def dark_superposition(n: int, b: complex) -> np.ndarray:
    """Normalised ``psi+ + b psi-``."""
    pp, pm = psi_pm(n)
    v = pp + b * pm
    return v / np.linalg.norm(v)


def pure_state_concurrence(n: int, b: float, omega: float, t):
    """Concurrences ``(C_ci, C_ij)`` for the pure dark superposition with real ``b``."""
    t = np.asarray(t, dtype=float)
    norm = 1 + b * b
    c_ci = np.sqrt((1 - b * b) ** 2 + 4 * b * b * np.sin(omega * t) ** 2) / (norm * np.sqrt(n))
    c_ij = np.abs(1 + 2 * b * np.cos(omega * t) / norm) / n
    return c_ci, c_ij


@dataclass(frozen=True)
class RotationCheck:
    hamiltonian_residual: float
    dissipator_residuals: tuple
    permutation: np.ndarray

    @property
    def max_residual(self) -> float:
        return max((self.hamiltonian_residual, *self.dissipator_residuals))


def rotation_matrix(graph: MotifGraph, basis: SectorBasis, steps: int = 1) -> np.ndarray:
    """Permutation ``R`` of sector configurations induced by a C_n rotation."""
    n = len(graph.sites_of(INNER, graph.motif_ids[0]))
    perm = np.array([graph.index(rotate_label(s, n, steps)) for s in graph.sites])
    occ = basis.occupations().astype(np.int64)
    images = occ @ (np.int64(1) << perm)
    R = np.zeros((basis.dim, basis.dim))
    R[np.searchsorted(basis.states, images), np.arange(basis.dim)] = 1.0
    return R


def rotation_check(graph: MotifGraph, basis: SectorBasis, H: SectorOperator | None = None) -> RotationCheck:
    """Residuals ``||[H, R]||`` and ``||R L_i R^-1 - L_{i+1}||`` for local channels."""
    from .sectors import project_hamiltonian, project_z_operator

    if H is None:
        H = project_hamiltonian(graph, basis)
    R = rotation_matrix(graph, basis)
    res_h = float(np.linalg.norm(H.matrix @ R - R @ H.matrix))
    n = len(graph.sites_of(INNER, graph.motif_ids[0]))
    rates = dict(graph.local_dissipators)
    res_l = []
    for site, rate in graph.local_dissipators:
        nxt = rotate_label(site, n)
        L = np.sqrt(rate) * project_z_operator([graph.index(site)], basis).matrix
        L_next = np.sqrt(rates.get(nxt, 0.0)) * project_z_operator([graph.index(nxt)], basis).matrix
        res_l.append(float(np.linalg.norm(R @ L @ R.T - L_next)))
    return RotationCheck(res_h, tuple(res_l), R)
