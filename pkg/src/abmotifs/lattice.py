"""Flux-threaded C_n spin motifs and networks of coupled motifs.

A motif of order ``n`` has one central spin, ``n`` inner spins coupled to the
centre and ``n`` outer spins, where outer spin ``i`` closes the plaquette
``[c, i, (i, i+1), i+1]``.  Every hop carries a phase; a bond stored as
``source -> target`` with phase ``phi`` contributes ``g e^{i phi}`` to the
matrix element ``<target|H|source>`` and its conjugate to the reverse hop.

Site ordering is fixed: central, inner 1..n, outer 1..n, then the next motif.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

TWO_PI = 2 * np.pi

CENTRAL = "c"
INNER = "i"
OUTER = "o"


@dataclass(frozen=True, order=True)
class SiteLabel:
    """Identity of a spin: ``kind`` is ``'c'``, ``'i'`` or ``'o'``.

    ``index`` runs over 1..n for inner and outer spins and is 0 for the centre.
    Outer spin ``i`` is the spin between inner spins ``i`` and ``i+1``.
    """

    motif: int
    kind: str
    index: int = 0

    def __post_init__(self):
        if self.kind not in (CENTRAL, INNER, OUTER):
            raise ValueError(f"unknown site kind {self.kind!r}")
        if self.kind == CENTRAL and self.index != 0:
            raise ValueError("the central spin has index 0")
        if self.kind != CENTRAL and self.index < 1:
            raise ValueError("inner/outer indices start at 1")
        if self.motif < 0:
            raise ValueError("motif id must be non-negative")

    @property
    def short(self) -> str:
        return self.kind if self.kind == CENTRAL else f"{self.kind}{self.index}"

    def name(self, with_motif: bool = False) -> str:
        return f"{self.short}.m{self.motif}" if with_motif else self.short


def central(motif: int = 0) -> SiteLabel:
    return SiteLabel(motif, CENTRAL)


def inner(i: int, motif: int = 0) -> SiteLabel:
    return SiteLabel(motif, INNER, i)


def outer(i: int, motif: int = 0) -> SiteLabel:
    return SiteLabel(motif, OUTER, i)


@dataclass(frozen=True)
class Bond:
    source: SiteLabel
    target: SiteLabel
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class MotifSpec:
    """Parameters of a single motif.

    ``gamma`` is either one rate shared by all outer spins or a sequence of
    ``n`` rates, one per outer spin.
    """

    n: int
    h: float = 1.0
    g: float = 0.3
    flux: float = np.pi
    gamma: float | Sequence[float] = 0.1

    def outer_rates(self) -> tuple[float, ...]:
        if np.ndim(self.gamma) == 0:
            return (float(self.gamma),) * self.n
        rates = tuple(float(r) for r in self.gamma)
        if len(rates) != self.n:
            raise ValueError(f"expected {self.n} outer rates, got {len(rates)}")
        return rates


@dataclass(frozen=True)
class NetworkSpec:
    motifs: Sequence[MotifSpec]
    inter_edges: Sequence[tuple[int, int]] = ()
    coupling: float = 0.27
    kappa: float = 0.0


@dataclass(frozen=True)
class MotifGraph:
    sites: tuple[SiteLabel, ...]
    on_site: tuple[float, ...]
    bonds: tuple[Bond, ...]
    local_dissipators: tuple[tuple[SiteLabel, float], ...] = ()
    collective_dissipators: tuple[tuple[tuple[SiteLabel, ...], float], ...] = ()
    plaquettes: tuple[tuple[SiteLabel, ...], ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: j for j, s in enumerate(self.sites)})
        if len(self._index) != len(self.sites):
            raise ValueError("duplicate site labels")
        if len(self.on_site) != len(self.sites):
            raise ValueError("need one on-site field per site")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def motif_ids(self) -> tuple[int, ...]:
        return tuple(sorted({s.motif for s in self.sites}))

    def index(self, site: SiteLabel) -> int:
        try:
            return self._index[site]
        except KeyError:
            raise KeyError(f"site {site} is not part of the graph") from None

    def sites_of(self, kind: str, motif: int | None = None) -> list[SiteLabel]:
        return [s for s in self.sites
                if s.kind == kind and (motif is None or s.motif == motif)]

    def bond_phase(self, a: SiteLabel, b: SiteLabel) -> float:
        """Phase picked up hopping from ``a`` to ``b``."""
        for bond in self.bonds:
            if bond.source == a and bond.target == b:
                return bond.phase
            if bond.source == b and bond.target == a:
                return -bond.phase
        raise KeyError(f"no bond between {a} and {b}")

    def plaquette_flux(self, plaquette: Sequence[SiteLabel]) -> float:
        """Oriented phase sum around a closed cycle, reduced to [0, 2 pi)."""
        total = sum(self.bond_phase(plaquette[j], plaquette[(j + 1) % len(plaquette)])
                    for j in range(len(plaquette)))
        return float(np.mod(total, TWO_PI))

    def dissipative_sites(self) -> list[SiteLabel]:
        return [s for s, rate in self.local_dissipators if rate > 0]


def _wrap(phase: float) -> float:
    return float(np.mod(phase, TWO_PI))


def _check_rate(rate: float, what: str) -> None:
    if rate < 0:
        raise ValueError(f"{what} must be non-negative, got {rate}")


def build_motif(spec: MotifSpec, motif: int = 0) -> MotifGraph:
    """Build the 2n+1 spin motif with 3n bonds in the default gauge.

    The default gauge puts ``flux/2`` on both outer bonds of each plaquette
    (inner i -> outer i and outer i -> inner i+1) and zero phase on the
    centre-inner bonds.  Every outer spin gets a local sigma^z dissipator.
    """
    n = spec.n
    if n < 2:
        raise ValueError(f"motif order must be >= 2, got {n}")
    if spec.g <= 0:
        raise ValueError("intra-motif coupling g must be positive")
    rates = spec.outer_rates()
    for r in rates:
        _check_rate(r, "gamma")

    c = central(motif)
    inners = [inner(i, motif) for i in range(1, n + 1)]
    outers = [outer(i, motif) for i in range(1, n + 1)]
    half = _wrap(spec.flux / 2)

    bonds = [Bond(c, s, spec.g, 0.0) for s in inners]
    for i in range(n):
        nxt = inners[(i + 1) % n]
        bonds.append(Bond(inners[i], outers[i], spec.g, half))
        bonds.append(Bond(outers[i], nxt, spec.g, half))

    sites = (c, *inners, *outers)
    plaquettes = tuple((c, inners[i], outers[i], inners[(i + 1) % n]) for i in range(n))
    return MotifGraph(
        sites=sites,
        on_site=(float(spec.h),) * len(sites),
        bonds=tuple(bonds),
        local_dissipators=tuple(zip(outers, rates)),
        plaquettes=plaquettes,
    )


def build_plaquette(h: float = 1.0, g: float = 1.0, flux: float = np.pi,
                    gamma: float = 0.1) -> MotifGraph:
    """Single four-spin ring ``c -> i1 -> o1 -> i2 -> c`` with loss on ``o1``.

    Sites are kept in ring order and the whole flux sits on the closing bond
    ``i2 -> c``.
    """
    _check_rate(gamma, "gamma")
    ring = (central(), inner(1), outer(1), inner(2))
    bonds = [Bond(ring[j], ring[j + 1], g, 0.0) for j in range(3)]
    bonds.append(Bond(ring[3], ring[0], g, _wrap(flux)))
    return MotifGraph(
        sites=ring,
        on_site=(float(h),) * 4,
        bonds=tuple(bonds),
        local_dissipators=((ring[2], float(gamma)),),
        plaquettes=(ring,),
    )


def apply_gauge(graph: MotifGraph, site_phases: Sequence[float]) -> MotifGraph:
    """Gauge transform ``|s> -> e^{i theta_s}|s>``; fluxes are untouched."""
    theta = np.asarray(site_phases, dtype=float)
    if theta.shape != (graph.n_sites,):
        raise ValueError(f"expected {graph.n_sites} site phases, got shape {theta.shape}")
    bonds = tuple(
        replace(b, phase=_wrap(b.phase + theta[graph.index(b.target)] - theta[graph.index(b.source)]))
        for b in graph.bonds
    )
    return replace(graph, bonds=bonds)


def build_network(spec: NetworkSpec) -> MotifGraph:
    """Union of motifs, flip-flop coupled site-by-site along ``inter_edges``.

    Each edge adds 2n+1 zero-phase bonds of amplitude ``spec.coupling``
    between equally labelled spins.  With ``kappa > 0`` every motif also gets
    one collective dissipator ``sqrt(kappa) sum_a sigma^z_a``.
    """
    motifs = list(spec.motifs)
    if not motifs:
        raise ValueError("a network needs at least one motif")
    orders = {m.n for m in motifs}
    if len(orders) != 1:
        raise ValueError(f"all motifs must share the same order, got {sorted(orders)}")
    _check_rate(spec.kappa, "kappa")

    seen = set()
    for a, b in spec.inter_edges:
        if not (0 <= a < len(motifs) and 0 <= b < len(motifs)):
            raise ValueError(f"inter edge ({a}, {b}) references an unknown motif")
        if a == b:
            raise ValueError(f"self-coupling of motif {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise ValueError(f"duplicate inter edge {key}")
        seen.add(key)
    if spec.inter_edges and spec.coupling <= 0:
        raise ValueError("inter-motif coupling must be positive")

    parts = [build_motif(m, motif=k) for k, m in enumerate(motifs)]
    sites = tuple(s for p in parts for s in p.sites)
    bonds = [b for p in parts for b in p.bonds]
    for a, b in spec.inter_edges:
        for s in parts[a].sites:
            bonds.append(Bond(s, replace(s, motif=b), float(spec.coupling), 0.0))

    collective = ()
    if spec.kappa > 0:
        collective = tuple((p.sites, float(spec.kappa)) for p in parts)
    return MotifGraph(
        sites=sites,
        on_site=tuple(x for p in parts for x in p.on_site),
        bonds=tuple(bonds),
        local_dissipators=tuple(d for p in parts for d in p.local_dissipators),
        collective_dissipators=collective,
        plaquettes=tuple(q for p in parts for q in p.plaquettes),
    )


def rotate_label(site: SiteLabel, n: int, steps: int = 1) -> SiteLabel:
    if site.kind == CENTRAL:
        return site
    return replace(site, index=(site.index - 1 + steps) % n + 1)


def describe(graph: MotifGraph) -> str:
    """CSV listing of sites, bonds and dissipators (one record per row)."""
    multi = len(graph.motif_ids) > 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["record", "a", "b", "value", "phase"])
    for s, h in zip(graph.sites, graph.on_site):
        w.writerow(["site", s.name(multi), "", f"{h:.12g}", ""])
    for b in graph.bonds:
        w.writerow(["bond", b.source.name(multi), b.target.name(multi),
                    f"{b.amplitude:.12g}", f"{b.phase:.12g}"])
    for s, rate in graph.local_dissipators:
        w.writerow(["local_dissipator", s.name(multi), "", f"{rate:.12g}", ""])
    for group, rate in graph.collective_dissipators:
        w.writerow(["collective_dissipator", " ".join(s.name(multi) for s in group), "",
                    f"{rate:.12g}", ""])
    for q in graph.plaquettes:
        w.writerow(["plaquette", " ".join(s.name(multi) for s in q), "",
                    f"{graph.plaquette_flux(q):.12g}", ""])
    return buf.getvalue()
