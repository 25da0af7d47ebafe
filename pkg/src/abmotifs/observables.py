"""Local magnetizations, two-spin reduced states, concurrence and sync fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .sectors import SectorBasis, project_z_operator

# two-spin product basis (down-down, down-up, up-down, up-up) for sites (a, b)
_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))


def site_magnetization(rho: np.ndarray, basis: SectorBasis, site: int) -> float:
    value = np.trace(rho @ project_z_operator([site], basis).matrix)
    if abs(value.imag) > 1e-8:
        raise ValueError(f"<sigma^z> has imaginary part {value.imag:.3g}; state is corrupted")
    return float(value.real)


def magnetizations(states: np.ndarray, basis: SectorBasis) -> np.ndarray:
    """``<sigma^z_s>`` for every site; ``states`` is ``(d, d)`` or ``(T, d, d)``."""
    states = np.asarray(states)
    pops = np.diagonal(states, axis1=-2, axis2=-1)
    if np.max(np.abs(pops.imag), initial=0.0) > 1e-8:
        raise ValueError("populations have imaginary parts; state is corrupted")
    return pops.real @ (2 * basis.occupations() - 1)


@dataclass(frozen=True, eq=False)
class TwoSpinState:
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (4, 4):
            raise ValueError("two-spin states are 4x4")

    def is_single_excitation(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return (np.max(np.abs(m[3])) < tol and np.max(np.abs(m[:, 3])) < tol
                and np.max(np.abs(m[0, 1:])) < tol and np.max(np.abs(m[1:, 0])) < tol)


def _pair_maps(basis: SectorBasis, a: int, b: int):
    if a == b:
        raise ValueError("reduced state needs two distinct sites")
    for s in (a, b):
        if not 0 <= s < basis.N:
            raise IndexError(f"site {s} outside 0..{basis.N - 1}")
    st = basis.states
    local = 2 * ((st >> a) & 1) + ((st >> b) & 1)
    rest = st & ~((1 << a) | (1 << b))
    rows, cols = np.nonzero(rest[:, None] == rest[None, :])
    return local[rows], local[cols], rows, cols


def reduce_two_sites_generic(rho: np.ndarray, basis: SectorBasis, a: int, b: int) -> TwoSpinState:
    """Partial trace over all sites except ``a`` and ``b`` in any sector."""
    la, lb, rows, cols = _pair_maps(basis, a, b)
    out = np.zeros((4, 4), dtype=complex)
    np.add.at(out, (la, lb), rho[rows, cols])
    return TwoSpinState(out)


def reduce_two_sites(rho: np.ndarray, basis: SectorBasis, a: int, b: int) -> TwoSpinState:
    """Two-spin reduced state; single-excitation sectors use the X-state shortcut."""
    if basis.k != 1:
        return reduce_two_sites_generic(rho, basis, a, b)
    if a == b:
        raise ValueError("reduced state needs two distinct sites")
    # in the k=1 sector the configuration index equals the excited site
    pa, pb = rho[a, a], rho[b, b]
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = 1 - pa - pb
    out[1, 1] = pb
    out[2, 2] = pa
    out[2, 1] = rho[a, b]
    out[1, 2] = rho[b, a]
    return TwoSpinState(out)


def wootters(matrix: np.ndarray) -> float:
    """Wootters concurrence from the singular values of ``F^dag (Y x Y) F*``.

    ``rho = F F^dag``; the singular values are the square roots of the
    eigenvalues of ``rho rho~`` but avoid taking square roots of round-off.
    """
    p, U = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    if p[0] < -1e-10:
        raise ValueError(f"reduced state has negative eigenvalue {p[0]:.3g}")
    p = np.where(p > 1e-14 * max(p[-1], 1e-300), p, 0.0)
    F = U * np.sqrt(p)
    lam = np.linalg.svd(F.conj().T @ _YY @ F.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def concurrence(ts: TwoSpinState | np.ndarray) -> float:
    """Concurrence of a two-spin state.

    For single-excitation X-states ``2|coherence|`` is computed as well and
    the two are required to agree to 1e-10.
    """
    ts = ts if isinstance(ts, TwoSpinState) else TwoSpinState(np.asarray(ts, dtype=complex))
    c = wootters(ts.matrix)
    if ts.is_single_excitation():
        fast = 2 * abs(ts.matrix[2, 1])
        if abs(fast - c) > 1e-10:
            raise ArithmeticError(f"Wootters {c:.15g} vs X-state {fast:.15g}")
    return c


def pair_concurrence(states: np.ndarray, basis: SectorBasis, a: int, b: int) -> np.ndarray:
    """Concurrence time series of the pair ``(a, b)`` over a stack of states."""
    return np.array([concurrence(reduce_two_sites(r, basis, a, b)) for r in np.asarray(states)])


@dataclass(frozen=True)
class SinusoidFit:
    frequency: float
    offset: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    residual: float


def _project(t, y, omega):
    X = np.column_stack([np.ones_like(t), np.cos(omega * t), np.sin(omega * t)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef, float(np.sum((X @ coef - y) ** 2))


def fit_sinusoids(t: np.ndarray, y: np.ndarray, omega_guess: float | None = None) -> SinusoidFit:
    """Least-squares fit ``y_s = a_s + A_s cos(w t + theta_s)`` with one shared ``w``.

    The offsets and quadratures are eliminated linearly; ``w`` starts from
    the largest discrete Fourier peak and is refined within one bin.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float).reshape(len(t), -1)
    dt = t[1] - t[0]
    span = t[-1] - t[0]
    if omega_guess is None:
        centred = y - y.mean(axis=0)
        power = np.sum(np.abs(np.fft.rfft(centred, n=8 * len(t), axis=0)) ** 2, axis=1)
        freqs = 2 * np.pi * np.fft.rfftfreq(8 * len(t), d=dt)
        omega_guess = float(freqs[1 + np.argmax(power[1:])])
    width = 2 * np.pi / span
    res = minimize_scalar(lambda w: _project(t, y, w)[1],
                          bounds=(max(omega_guess - width, 1e-12), omega_guess + width),
                          method="bounded", options={"xatol": 1e-13})
    omega = float(res.x)
    coef, rss = _project(t, y, omega)
    a, cq, sq = coef
    # c cos(wt) + s sin(wt) = A cos(wt + theta) with A = |c + i s|, theta = -arg(c + i s)
    amp = np.hypot(cq, sq)
    phase = np.mod(-np.arctan2(sq, cq), 2 * np.pi)
    return SinusoidFit(abs(omega), a, amp, phase, float(np.sqrt(rss / y.size)))


@dataclass(frozen=True)
class SyncReport:
    times: np.ndarray
    sync_error: dict
    frequency: float
    amplitude: np.ndarray
    phase: np.ndarray
    offset: np.ndarray
    fit_residual: float
    group_amplitude: dict
    group_phase: dict

    def max_sync_error(self, group: str) -> float:
        return float(np.max(self.sync_error[group]))

    def phase_difference(self, a: str, b: str) -> float:
        return float(np.mod(self.group_phase[a] - self.group_phase[b], 2 * np.pi))

    def amplitude_ratio(self, a: str, b: str) -> float:
        return float(self.group_amplitude[a] / self.group_amplitude[b])


def sync_report(times: np.ndarray, series: np.ndarray, groups: dict, tau: float,
                omega_guess: float | None = None) -> SyncReport:
    """Synchronization diagnostics for ``series[t, site]`` restricted to ``t >= tau``.

    ``groups`` maps a name to site indices; the sync error of a group is the
    spread ``max_ij |x_i - x_j|`` at each time.
    """
    times = np.asarray(times)
    if tau >= times[-1]:
        raise ValueError(f"tau={tau} is not before the end of the run ({times[-1]})")
    keep = times >= tau
    t, x = times[keep], np.asarray(series)[keep]
    errors = {name: np.ptp(x[:, list(idx)], axis=1) for name, idx in groups.items()}
    fit = fit_sinusoids(t, x, omega_guess)
    g_amp, g_phase = {}, {}
    for name, idx in groups.items():
        idx = list(idx)
        g_amp[name] = float(np.mean(fit.amplitude[idx]))
        # circular mean so phases near 0 and 2 pi average correctly
        g_phase[name] = float(np.mod(np.angle(np.mean(np.exp(1j * fit.phase[idx]))), 2 * np.pi))
    return SyncReport(t, errors, fit.frequency, fit.amplitude, fit.phase, fit.offset,
                      fit.residual, g_amp, g_phase)


def max_drift(times: np.ndarray, series: np.ndarray, tau: float) -> float:
    """Largest ``|dx/dt|`` after ``tau`` from centred finite differences."""
    keep = times >= tau
    return float(np.max(np.abs(np.gradient(np.asarray(series)[keep], times[keep], axis=0))))
