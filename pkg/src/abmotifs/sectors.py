"""Fixed-magnetization subspaces and operators projected onto them.

A configuration is an integer whose bit ``j`` is set when site ``j`` (in
graph order) carries a spin-up excitation.  The ``k``-excitation sector is
spanned by all configurations with ``k`` set bits, sorted ascending.
Full ``2^N`` operators use the same integer as the basis index, so a sector
block is just ``full[np.ix_(states, states)]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .lattice import MotifGraph

MAX_SECTOR_SITES = 24
MAX_FULL_SITES = 12


@dataclass(frozen=True, eq=False)
class SectorBasis:
    N: int
    k: int
    states: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def magnetization(self) -> int:
        return 2 * self.k - self.N

    def index(self, config: int) -> int:
        j = int(np.searchsorted(self.states, config))
        if j >= self.dim or self.states[j] != config:
            raise KeyError(f"configuration {config:#b} is not in the k={self.k} sector")
        return j

    def occupations(self) -> np.ndarray:
        """``(dim, N)`` array of 0/1 site occupations."""
        return ((self.states[:, None] >> np.arange(self.N)) & 1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class SectorOperator:
    basis: SectorBasis
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        d = self.basis.dim
        if self.matrix.shape != (d, d):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match sector dimension {d}")
        if self.hermitian:
            err = np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0)
            if err >= 1e-12:
                raise ValueError(f"operator flagged Hermitian but |M - M^dag| = {err:.3g}")


def enumerate_basis(N: int, k: int) -> SectorBasis:
    if not 0 <= N <= MAX_SECTOR_SITES:
        raise ValueError(f"N={N} outside the dense backend range 0..{MAX_SECTOR_SITES}")
    if not 0 <= k <= N:
        raise ValueError(f"excitation number k={k} outside 0..{N}")
    states = np.array(sorted(sum(1 << j for j in c) for c in combinations(range(N), k)),
                      dtype=np.int64)
    assert len(states) == comb(N, k)
    return SectorBasis(N, k, states)


def _check_size(graph: MotifGraph, basis: SectorBasis) -> None:
    if basis.N != graph.n_sites:
        raise ValueError(f"basis has N={basis.N} but graph has {graph.n_sites} sites")


def project_hamiltonian(graph: MotifGraph, basis: SectorBasis) -> SectorOperator:
    """Matrix of ``sum_s h_s sigma^z_s + sum_bonds (g e^{i phi} s+_t s-_s + h.c.)``."""
    _check_size(graph, basis)
    occ = basis.occupations()
    fields = np.asarray(graph.on_site, dtype=float)
    H = np.diag((2 * occ - 1) @ fields).astype(complex)
    states = basis.states
    for bond in graph.bonds:
        a, b = graph.index(bond.source), graph.index(bond.target)
        hop = bond.amplitude * np.exp(1j * bond.phase)
        # a -> b and the conjugate hop b -> a
        for src, dst, amp in ((a, b, hop), (b, a, np.conj(hop))):
            movable = (occ[:, src] == 1) & (occ[:, dst] == 0)
            cols = np.flatnonzero(movable)
            rows = np.searchsorted(states, states[cols] ^ ((1 << src) | (1 << dst)))
            H[rows, cols] += amp
    return SectorOperator(basis, H, hermitian=True)


def project_z_operator(sites, basis: SectorBasis) -> SectorOperator:
    """Diagonal matrix of ``sum_{s in sites} sigma^z_s`` (sites are bit indices)."""
    sites = [int(s) for s in sites]
    for s in sites:
        if not 0 <= s < basis.N:
            raise IndexError(f"site {s} outside 0..{basis.N - 1}")
    occ = basis.occupations()
    diag = (2 * occ[:, sites] - 1).sum(axis=1) if sites else np.zeros(basis.dim)
    return SectorOperator(basis, np.diag(diag.astype(complex)), hermitian=True)


def project_dissipators(graph: MotifGraph, basis: SectorBasis) -> list[tuple[SectorOperator, float]]:
    """Local outer-spin and collective motif-wide sigma^z channels with their rates."""
    _check_size(graph, basis)
    out = []
    for site, rate in graph.local_dissipators:
        if rate > 0:
            out.append((project_z_operator([graph.index(site)], basis), rate))
    for group, rate in graph.collective_dissipators:
        if rate > 0:
            out.append((project_z_operator([graph.index(s) for s in group], basis), rate))
    return out


def sector_model(graph: MotifGraph, k: int = 1):
    """Shortcut returning ``(basis, H, dissipators)`` for the ``k`` sector."""
    basis = enumerate_basis(graph.n_sites, k)
    return basis, project_hamiltonian(graph, basis), project_dissipators(graph, basis)


# -- full tensor-product space, used as an oracle for small systems ----------

_SZ = np.diag([-1.0, 1.0]).astype(complex)     # basis (down, up)
_SP = np.array([[0, 0], [1, 0]], dtype=complex)  # |up><down|
_ID = np.eye(2, dtype=complex)


def _site_operator(op: np.ndarray, site: int, N: int) -> np.ndarray:
    # bit j of the basis index is site j, so site N-1 is the leftmost factor
    out = np.ones((1, 1), dtype=complex)
    for j in reversed(range(N)):
        out = np.kron(out, op if j == site else _ID)
    return out


def full_space_operators(graph: MotifGraph):
    """Hamiltonian and ``[(L, rate), ...]`` on the full ``2^N`` space."""
    N = graph.n_sites
    if N > MAX_FULL_SITES:
        raise ValueError(f"full-space operators refused for N={N} > {MAX_FULL_SITES}")
    sz = [_site_operator(_SZ, j, N) for j in range(N)]
    sp = [_site_operator(_SP, j, N) for j in range(N)]
    H = sum(h * z for h, z in zip(graph.on_site, sz))
    for bond in graph.bonds:
        a, b = graph.index(bond.source), graph.index(bond.target)
        term = bond.amplitude * np.exp(1j * bond.phase) * sp[b] @ sp[a].conj().T
        H = H + term + term.conj().T
    ops = [(sz[graph.index(s)], rate) for s, rate in graph.local_dissipators if rate > 0]
    ops += [(sum(sz[graph.index(s)] for s in group), rate)
            for group, rate in graph.collective_dissipators if rate > 0]
    return H, ops


def total_magnetization(N: int) -> np.ndarray:
    return sum(_site_operator(_SZ, j, N) for j in range(N))
