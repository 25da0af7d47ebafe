"""Vectorized Lindblad generator, its eigensystem and time evolution.

Vectorization is column stacking, ``vec(A X B) = (B^T kron A) vec(X)``,
i.e. ``rho.reshape(-1, order="F")``.  With this convention the generator is

    L = -i (I kron H - H^T kron I)
        + sum_mu gamma_mu [conj(L_mu) kron L_mu - 1/2 I kron L_mu^dag L_mu
                           - 1/2 (L_mu^dag L_mu)^T kron I]

and the Hilbert-Schmidt pairing ``<<sigma|rho>> = Tr(sigma^dag rho)`` is the
plain inner product ``vec(sigma).conj() @ vec(rho)``.  Left modes are stored
so that ``left[:, j].conj() @ right[:, k] == delta_jk``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .sectors import SectorOperator

logger = logging.getLogger(__name__)

MAX_LIOUVILLE_DIM = 20000
KERNEL_RTOL = 1e-10


class NumericalInstability(RuntimeError):
    pass


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.shape[-1])))
    # column stacking: entry (i, j) sits at i + d*j
    return np.swapaxes(v.reshape(*v.shape[:-1], d, d), -1, -2)


def _matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, SectorOperator) else np.asarray(op, dtype=complex)


def _basis_of(op):
    return op.basis if isinstance(op, SectorOperator) else None


@dataclass(frozen=True, eq=False)
class Liouvillian:
    matrix: np.ndarray
    dim: int
    hamiltonian: np.ndarray
    dissipators: tuple = ()
    basis: object = None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)


def hamiltonian_superoperator(H: np.ndarray) -> np.ndarray:
    """``-i[H, .]`` in column-stacked form."""
    d = H.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def dissipator_superoperator(L: np.ndarray) -> np.ndarray:
    d = L.shape[0]
    eye = np.eye(d)
    LdL = L.conj().T @ L
    return np.kron(L.conj(), L) - 0.5 * np.kron(eye, LdL) - 0.5 * np.kron(LdL.T, eye)


def assemble(H, dissipators=()) -> Liouvillian:
    """Build the generator from a Hamiltonian and ``[(L_mu, rate), ...]``.

    Operators may be :class:`SectorOperator` instances sharing one basis or
    plain square arrays (used for full-space checks).
    """
    Hm = _matrix(H)
    d = Hm.shape[0]
    basis = _basis_of(H)
    M = hamiltonian_superoperator(Hm)
    kept = []
    for op, rate in dissipators:
        if rate < 0:
            raise ValueError(f"negative dissipation rate {rate}")
        if basis is not None and _basis_of(op) is not None and _basis_of(op) is not basis:
            raise ValueError("dissipator lives in a different sector basis than H")
        Lm = _matrix(op)
        if Lm.shape != (d, d):
            raise ValueError(f"dissipator shape {Lm.shape} does not match H shape {(d, d)}")
        if rate > 0:
            M = M + rate * dissipator_superoperator(Lm)
        kept.append((Lm, float(rate)))
    return Liouvillian(M, d, Hm, tuple(kept), basis)


@dataclass(frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    dim: int
    kernel_right: np.ndarray
    kernel_left: np.ndarray
    biorthonormality_residual: float
    eigen_residual: float

    def __len__(self):
        return len(self.eigenvalues)

    def right_mode(self, k: int) -> np.ndarray:
        return unvec(self.right[:, k], self.dim)

    def left_mode(self, k: int) -> np.ndarray:
        return unvec(self.left[:, k], self.dim)

    def coefficients(self, rho0: np.ndarray) -> np.ndarray:
        """Mode amplitudes ``<<sigma_k|rho0>>``."""
        return self.left.conj().T @ vec(rho0)

    def closest(self, target: complex) -> int:
        return int(np.argmin(np.abs(self.eigenvalues - target)))


def spectrum(L: Liouvillian, kernel_rtol: float = KERNEL_RTOL) -> SpectralData:
    """Full biorthonormal eigensystem of ``L``.

    The zero eigenspace is taken from an SVD (rank threshold
    ``kernel_rtol * ||L||_2``) instead of the eigensolver, because exact
    degenerate zeros come back as an arbitrary, possibly ill-conditioned
    cluster.  Left modes are the rows of the inverse right-mode matrix.
    """
    M = L.matrix
    D = M.shape[0]
    if D > MAX_LIOUVILLE_DIM:
        raise ValueError(f"Liouville dimension {D} exceeds the dense limit {MAX_LIOUVILLE_DIM}")

    U, s, Vh = scipy.linalg.svd(M)
    tol = kernel_rtol * s[0] if s[0] > 0 else kernel_rtol
    nullity = int(np.sum(s < tol))
    ker_r = Vh[D - nullity:].conj().T
    ker_l = U[:, D - nullity:]

    try:
        w, V = scipy.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"non-Hermitian eigensolver failed for dimension {D}: {exc}") from exc

    zero_idx = np.argsort(np.abs(w))[:nullity]
    w = w.copy()
    w[zero_idx] = 0.0
    V = V.copy()
    V[:, zero_idx] = ker_r
    V /= np.linalg.norm(V, axis=0)

    W = np.linalg.inv(V).conj().T
    bio = float(np.max(np.abs(W.conj().T @ V - np.eye(D))))
    eig_res = float(max(np.max(np.abs(M @ V - V * w)),
                        np.max(np.abs(M.conj().T @ W - W * w.conj()))))
    if eig_res > 1e-6 * max(s[0], 1.0):
        logger.warning("eigen decomposition residual %.3g; the generator may be defective", eig_res)
    return SpectralData(w, V, W, L.dim, ker_r, ker_l, bio, eig_res)


@dataclass(frozen=True)
class ModeReport:
    stationary: np.ndarray
    oscillatory: np.ndarray
    decaying: np.ndarray
    gap: float
    tau: float
    labels: tuple = field(repr=False, default=())

    def as_dict(self) -> dict:
        return {"stationary": len(self.stationary), "oscillatory": len(self.oscillatory),
                "decaying": len(self.decaying), "gap": self.gap, "tau": self.tau}


def classify_modes(S: SpectralData, tol_re: float = 1e-10, tol_im: float = 1e-10,
                   eps_tr: float = 1e-3) -> ModeReport:
    """Split modes into stationary, oscillatory and decaying ones.

    ``gap`` is the slowest decay rate among decaying modes and the transient
    time is ``tau = ln(1/eps_tr) / gap``; after ``tau`` every decaying mode has
    shrunk by at least ``eps_tr``.
    """
    lam = S.eigenvalues
    stationary = np.abs(lam) < tol_re
    undamped = np.abs(lam.real) < tol_re
    oscillatory = undamped & ~stationary & (np.abs(lam.imag) >= tol_im)
    decaying = ~(stationary | oscillatory)
    rates = -lam.real[decaying]
    gap = float(rates.min()) if rates.size else float("inf")
    tau = float(np.log(1 / eps_tr) / gap) if rates.size and gap > 0 else 0.0
    labels = np.where(stationary, "stationary", np.where(oscillatory, "oscillatory", "decaying"))
    return ModeReport(np.flatnonzero(stationary), np.flatnonzero(oscillatory),
                      np.flatnonzero(decaying), gap, tau, tuple(labels))


def default_dt(*rates: float) -> float:
    return 0.01 / max(abs(r) for r in rates)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    trace_error: np.ndarray
    hermiticity_error: np.ndarray
    min_eigenvalue: np.ndarray
    method: str = "rk4"

    def __len__(self):
        return len(self.times)

    def check_invariants(self, trace_tol=1e-9, herm_tol=1e-9, psd_tol=1e-8) -> None:
        if len(self) == 0:
            return
        if self.trace_error.max() >= trace_tol:
            raise NumericalInstability(f"trace drift {self.trace_error.max():.3g}")
        if self.hermiticity_error.max() >= herm_tol:
            raise NumericalInstability(f"Hermiticity loss {self.hermiticity_error.max():.3g}")
        if self.min_eigenvalue.min() <= -psd_tol:
            raise NumericalInstability(f"negative eigenvalue {self.min_eigenvalue.min():.3g}")


def diagnostics(states: np.ndarray):
    tr = np.abs(np.trace(states, axis1=1, axis2=2) - 1)
    dag = np.conj(np.swapaxes(states, 1, 2))
    herm = np.max(np.abs(states - dag), axis=(1, 2)) if len(states) else np.zeros(0)
    mins = np.linalg.eigvalsh(0.5 * (states + dag))[:, 0] if len(states) else np.zeros(0)
    return tr, herm, mins


def validate_density_matrix(rho: np.ndarray, d: int, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d, d):
        raise ValueError(f"density matrix shape {rho.shape}, expected {(d, d)}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("initial state is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"initial state has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError("initial state is not positive semidefinite")
    return rho


def rk4_propagator(M: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step of ``dv/dt = M v``, written as a matrix."""
    A = dt * M
    A2 = A @ A
    A3 = A2 @ A
    return np.eye(M.shape[0]) + A + A2 / 2 + A3 / 6 + A3 @ A / 24


def evolve(H, dissipators, rho0: np.ndarray, t_max: float, dt: float,
           method: str = "rk4", spectral: SpectralData | None = None,
           save_every: int = 1, liouvillian: Liouvillian | None = None) -> Trajectory:
    """Integrate ``d rho/dt = L[rho]`` on the grid ``0, dt, ..., t_max``.

    ``rk4`` steps with a fixed classical Runge-Kutta step; ``spectral`` sums
    ``exp(lambda_k t) rho_k <<sigma_k|rho0>>`` exactly.  Every
    ``save_every``-th step is stored together with its diagnostics.
    """
    L = liouvillian if liouvillian is not None else assemble(H, dissipators)
    d = L.dim
    rho0 = validate_density_matrix(rho0, d)
    if dt <= 0 or t_max < 0:
        raise ValueError("need dt > 0 and t_max >= 0")
    n_steps = int(round(t_max / dt))
    saved = np.arange(0, n_steps + 1, save_every)
    times = saved * dt
    v0 = vec(rho0)

    if method == "rk4":
        step = np.linalg.matrix_power(rk4_propagator(L.matrix, dt), save_every)
        out = np.empty((len(saved), d * d), dtype=complex)
        v = v0
        for j in range(len(saved)):
            if j:
                v = step @ v
                drift = abs(v[:: d + 1].sum() - 1)
                if drift > 1e-6 or not np.all(np.isfinite(v)) or np.max(np.abs(v)) > 1 + 1e-6:
                    raise NumericalInstability(
                        f"RK4 blew up at t={times[j]:.4g} (trace drift {drift:.3g}); reduce dt")
            out[j] = v
    elif method == "spectral":
        S = spectral if spectral is not None else spectrum(L)
        c = S.left.conj().T @ v0
        phases = np.exp(np.outer(times, S.eigenvalues))
        out = (phases * c) @ S.right.T
    else:
        raise ValueError(f"unknown method {method!r}")

    states = unvec(out, d) if len(out) else np.zeros((0, d, d), dtype=complex)
    tr, herm, mins = diagnostics(states)
    return Trajectory(times, states, tr, herm, mins, method)


def step_halving_check(H, dissipators, rho0, dt: float, t_check: float) -> float:
    """Largest entry difference between RK4 runs at ``dt`` and ``dt/2``."""
    L = assemble(H, dissipators)
    coarse = evolve(None, (), rho0, t_check, dt, liouvillian=L,
                    save_every=max(1, int(round(t_check / dt))))
    fine = evolve(None, (), rho0, t_check, dt / 2, liouvillian=L,
                  save_every=max(1, int(round(t_check / (dt / 2)))))
    return float(np.max(np.abs(coarse.states[-1] - fine.states[-1])))
