"""Flux-threaded spin motifs under engineered dissipation.

Build a motif or a network of motifs (``lattice``), restrict it to a fixed
magnetization sector (``sectors``), assemble and diagonalise the Liouvillian
(``liouville``), measure magnetizations, concurrence and synchronization
(``observables``), compare with the closed forms for single motifs
(``theory``) and study robustness under disorder (``perturbation``).
"""
__version__ = "0.1.0"

from .lattice import (Bond, MotifGraph, MotifSpec, NetworkSpec, SiteLabel, build_motif,
                      build_network, build_plaquette, central, inner, outer)
from .liouville import (Liouvillian, NumericalInstability, SpectralData, Trajectory, assemble,
                        classify_modes, evolve, spectrum)
from .observables import concurrence, magnetizations, pair_concurrence, reduce_two_sites, sync_report
from .perturbation import DisorderSpec, decay_rate_scan, perturbative_corrections, sample_disorder
from .sectors import SectorBasis, SectorOperator, enumerate_basis, sector_model
from .theory import (analytic_concurrence, analytic_constants, analytic_magnetization,
                     find_dark_states, psi_pm, verify_dynamical_symmetry)

__all__ = [
    "Bond", "MotifGraph", "MotifSpec", "NetworkSpec", "SiteLabel", "build_motif", "build_network",
    "build_plaquette", "central", "inner", "outer", "Liouvillian", "NumericalInstability",
    "SpectralData", "Trajectory", "assemble", "classify_modes", "evolve", "spectrum",
    "concurrence", "magnetizations", "pair_concurrence", "reduce_two_sites", "sync_report",
    "DisorderSpec", "decay_rate_scan", "perturbative_corrections", "sample_disorder",
    "SectorBasis", "SectorOperator", "enumerate_basis", "sector_model", "analytic_concurrence",
    "analytic_constants", "analytic_magnetization", "find_dark_states", "psi_pm",
    "verify_dynamical_symmetry",
]
