"""Run a configured scenario end to end and write its result bundle."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, parse_amplitudes, parse_numbers
from .export import (git_describe, plot_groups, write_manifest, write_report, write_scan,
                     write_spectrum, write_trajectory)
from .lattice import CENTRAL, INNER, OUTER, MotifGraph
from .liouville import (ModeReport, SpectralData, assemble, classify_modes, default_dt, evolve,
                        spectrum, step_halving_check)
from .observables import magnetizations, pair_concurrence, sync_report
from .perturbation import decay_rate_scan
from .sectors import SectorBasis, sector_model
from .theory import (analytic_concurrence, analytic_constants, analytic_magnetization,
                     dark_superposition, psi_pm, rotation_check, verify_dynamical_symmetry)

logger = logging.getLogger(__name__)

STEP_HALVING_TOL = 1e-6


def _single_site_index(basis: SectorBasis, site: int) -> int:
    return basis.index(1 << site)


def random_state(dim: int, seed: int) -> np.ndarray:
    """Pure state from a normalised complex Gaussian vector (uniform on the sphere)."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def initial_state(cfg: ScenarioConfig, graph: MotifGraph, basis: SectorBasis) -> np.ndarray:
    init = cfg.initial
    if init.kind == "random":
        return random_state(basis.dim, init.seed)
    if init.kind == "amplitudes":
        v = parse_amplitudes(init.amplitudes)
        if len(v) != basis.dim:
            raise ValueError(f"initial.amplitudes: got {len(v)} amplitudes, sector has {basis.dim}")
        if np.linalg.norm(v) == 0:
            raise ValueError("initial.amplitudes: zero vector")
        v = v / np.linalg.norm(v)
        return np.outer(v, v.conj())
    if basis.k != 1:
        raise ValueError(f"initial.kind={init.kind!r} needs the single-excitation sector (sector.k = 1)")
    if init.kind == "center":
        v = np.zeros(basis.dim, dtype=complex)
        v[_single_site_index(basis, graph.index(graph.sites_of(CENTRAL, graph.motif_ids[0])[0]))] = 1
        return np.outer(v, v.conj())
    # dark superposition, placed on the first motif
    n = len(graph.sites_of(INNER, graph.motif_ids[0]))
    local = dark_superposition(n, init.b)
    v = np.zeros(basis.dim, dtype=complex)
    v[: 2 * n + 1] = local
    return np.outer(v, v.conj())


def site_groups(graph: MotifGraph) -> dict:
    """Per-motif kind groups plus, for networks, one cross-motif group per label."""
    groups = {}
    multi = len(graph.motif_ids) > 1
    for m in graph.motif_ids:
        for kind, name in ((CENTRAL, "central"), (INNER, "inner"), (OUTER, "outer")):
            key = f"m{m}:{name}" if multi else name
            groups[key] = [graph.index(s) for s in graph.sites_of(kind, m)]
    if multi:
        for s in graph.sites_of(CENTRAL, 0) + graph.sites_of(INNER, 0) + graph.sites_of(OUTER, 0):
            groups[f"label:{s.short}"] = [graph.index(t) for t in graph.sites
                                          if (t.kind, t.index) == (s.kind, s.index)]
    return groups


def cross_motif_error(groups: dict, series: np.ndarray) -> np.ndarray:
    labels = [idx for key, idx in groups.items() if key.startswith("label:")]
    if not labels:
        return np.zeros(len(series))
    return np.max([np.ptp(series[:, idx], axis=1) for idx in labels], axis=0)


def auto_t_max(modes: ModeReport, S: SpectralData) -> float:
    osc = np.abs(S.eigenvalues[modes.oscillatory].imag)
    period = 2 * np.pi / osc.min() if osc.size else 10.0
    return float(max(modes.tau, 10.0) + 20 * period)


@dataclass
class ScenarioResult:
    out_dir: Path
    files: dict = field(default_factory=dict)
    modes: ModeReport | None = None
    spectral: SpectralData | None = None
    trajectory: object = None
    magnetization: np.ndarray | None = None
    sync: object = None
    theory: dict = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)


def _closed(cfg: ScenarioConfig) -> ScenarioConfig:
    return replace(cfg, geometry=replace(cfg.geometry, gamma=0.0, kappa=0.0))


def _theory_entries(graph, basis, H, dissipators, S, rho0, traj, mag, conc, tau, n, g):
    entries = []
    pp, pm = psi_pm(n)
    dyn = verify_dynamical_symmetry(H, dissipators, np.outer(pp, pm.conj()))
    entries += [("dynamical_symmetry_certified", int(dyn.certified)),
                ("dynamical_symmetry_residual_H", dyn.residual_H),
                ("dynamical_symmetry_residual_L", max(dyn.residuals_L, default=0.0)),
                ("dynamical_symmetry_eigenfrequency", float(np.real(dyn.eigenfrequency)))]
    rot = rotation_check(graph, basis, H)
    entries.append(("rotation_residual", rot.max_residual))
    k = analytic_constants(S, rho0, n, g)
    keep = traj.times >= tau
    t = traj.times[keep]
    devs = {}
    for kind, name in ((CENTRAL, "central"), (INNER, "inner"), (OUTER, "outer")):
        idx = [graph.index(s) for s in graph.sites_of(kind, 0)]
        ref = analytic_magnetization(k, kind, t)
        devs[name] = float(np.sqrt(np.mean((mag[keep][:, idx] - ref[:, None]) ** 2)))
        entries.append((f"magnetization_rms_{name}", devs[name]))
    if conc is not None:
        for pair, series in zip(("ci", "ij"), conc):
            entries.append((f"concurrence_maxdev_{pair}",
                            float(np.max(np.abs(series[keep] - analytic_concurrence(k, pair, t))))))
    entries += [("omega", k.omega), ("A_c", k.A_c), ("A_bar", k.A_bar), ("A_tilde", k.A_tilde),
                ("C_c", k.C_c), ("C_bar", k.C_bar), ("coherence", k.coherence), ("phase", k.phase)]
    return entries


def run_scenario(cfg: ScenarioConfig, out_dir, name: str = "scenario") -> ScenarioResult:
    """Evolve the configured model and write the result bundle into ``out_dir``.

    Files: ``trajectory.csv``, ``spectrum.csv``, ``sync_report.csv``,
    ``theory_report.csv`` (single motifs, k=1), ``trajectory.svg`` and
    ``manifest.json``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = cfg.build_graph()
    basis, H, dissipators = sector_model(graph, cfg.sector.k)
    rho0 = initial_state(cfg, graph, basis)
    L = assemble(H, dissipators)
    res = ScenarioResult(out)
    obs, ev = cfg.observables, cfg.evolution

    S = spectrum(L)
    modes = classify_modes(S, eps_tr=ev.transient_eps)
    res.spectral, res.modes = S, modes
    if obs.spectrum:
        res.files["spectrum"] = write_spectrum(out / "spectrum.csv", S.eigenvalues, modes.labels)

    dt = default_dt(*cfg.rates()) if ev.dt == "auto" else float(ev.dt)
    t_max = auto_t_max(modes, S) if ev.t_max == "auto" else float(ev.t_max)
    halving = None
    if ev.method == "rk4":
        halving = step_halving_check(H, dissipators, rho0, dt, min(t_max, 10.0))
        if halving > STEP_HALVING_TOL:
            logger.warning("step-halving difference %.3g exceeds %.0e; reduce dt", halving,
                           STEP_HALVING_TOL)
    traj = evolve(H, dissipators, rho0, t_max, dt, method=ev.method, spectral=S,
                  save_every=ev.save_every, liouvillian=L)
    traj.check_invariants()
    res.trajectory = traj
    mag = magnetizations(traj.states, basis)
    res.magnetization = mag
    names = [s.name(with_motif=len(graph.motif_ids) > 1) for s in graph.sites]

    conc = None
    if obs.concurrence and basis.k == 1:
        c0 = graph.index(graph.sites_of(CENTRAL, 0)[0])
        i1, i2 = [graph.index(s) for s in graph.sites_of(INNER, 0)[:2]]
        conc = (pair_concurrence(traj.states, basis, c0, i1),
                pair_concurrence(traj.states, basis, i1, i2))
    if obs.magnetization or conc is not None:
        res.files["trajectory"] = write_trajectory(out / "trajectory.csv", traj.times, mag, names,
                                                   *(conc or (None, None)))

    groups = site_groups(graph)
    tau = modes.tau
    sync_entries = [("tau", tau), ("gap", modes.gap), ("transient_eps", ev.transient_eps)]
    if obs.sync:
        if tau < traj.times[-1] and len(traj.times[traj.times >= tau]) > 4:
            rep = sync_report(traj.times, mag, groups, tau)
            res.sync = rep
            sync_entries += [("frequency", rep.frequency), ("fit_residual", rep.fit_residual)]
            for key in groups:
                sync_entries += [(f"sync_error:{key}", rep.max_sync_error(key)),
                                 (f"amplitude:{key}", rep.group_amplitude[key]),
                                 (f"phase:{key}", rep.group_phase[key])]
            keep = traj.times >= tau
            sync_entries.append(("cross_motif_error", float(np.max(cross_motif_error(groups, mag[keep])))))
            for j, nm in enumerate(names):
                sync_entries += [(f"site_amplitude:{nm}", rep.amplitude[j]),
                                 (f"site_phase:{nm}", rep.phase[j])]
        else:
            sync_entries.append(("note", "run ends before the transient time; no fit"))
        res.files["sync"] = write_report(out / "sync_report.csv", sync_entries)

    geo = cfg.geometry
    if obs.theory and geo.kind == "motif" and basis.k == 1 and tau < traj.times[-1]:
        entries = _theory_entries(graph, basis, H, dissipators, S, rho0, traj, mag, conc, tau,
                                  geo.n, geo.g)
        res.theory = dict(entries)
        res.files["theory"] = write_report(out / "theory_report.csv", entries)

    background = None
    if obs.closed_control:
        ccfg = _closed(cfg)
        cgraph = ccfg.build_graph()
        _, cH, cdiss = sector_model(cgraph, cfg.sector.k)
        ctraj = evolve(cH, cdiss, rho0, t_max, dt, method=ev.method, save_every=ev.save_every)
        ctraj.check_invariants()
        cmag = magnetizations(ctraj.states, basis)
        res.files["closed"] = write_trajectory(out / "trajectory_closed.csv", ctraj.times, cmag, names)
        background = {k: {names[j]: cmag[:, j] for j in idx} for k, idx in groups.items()
                      if not k.startswith("label:")}

    if obs.plot:
        series = {k: {names[j]: mag[:, j] for j in idx} for k, idx in groups.items()
                  if not k.startswith("label:")}
        res.files["plot"] = plot_groups(out / "trajectory.svg", traj.times, series, title=name,
                                        background=background)

    res.manifest = {
        "name": name,
        "version": __version__,
        "git_describe": git_describe(),
        "config": cfg.as_dict(),
        "seeds": {"initial_state": cfg.initial.seed if cfg.initial.kind == "random" else None},
        "resolved": {"dt": dt, "t_max": t_max, "sector_dim": basis.dim, "n_sites": graph.n_sites},
        "modes": modes.as_dict(),
        "step_halving_difference": halving,
        "note": cfg.output.note,
        "files": {k: Path(v).name for k, v in res.files.items()},
    }
    res.files["manifest"] = write_manifest(out / "manifest.json", res.manifest)
    return res


def run_spectrum(cfg: ScenarioConfig, out_dir) -> tuple[SpectralData, ModeReport, Path]:
    graph = cfg.build_graph()
    basis, H, dissipators = sector_model(graph, cfg.sector.k)
    S = spectrum(assemble(H, dissipators))
    modes = classify_modes(S, eps_tr=cfg.evolution.transient_eps)
    path = write_spectrum(Path(out_dir) / "spectrum.csv", S.eigenvalues, modes.labels)
    write_manifest(Path(out_dir) / "manifest.json",
                   {"version": __version__, "git_describe": git_describe(), "config": cfg.as_dict(),
                    "modes": modes.as_dict(), "sector_dim": basis.dim})
    return S, modes, path


def run_disorder_scan(cfg: ScenarioConfig, out_dir, jobs: int = 1):
    graph = cfg.build_graph()
    epsilons = parse_numbers(cfg.disorder.epsilons)
    seeds = parse_numbers(cfg.disorder.seeds, int)
    scan = decay_rate_scan(graph, cfg.disorder.kind, epsilons, seeds, k=cfg.sector.k, jobs=jobs)
    path = write_scan(Path(out_dir) / "scan.csv", scan)
    write_manifest(Path(out_dir) / "manifest.json",
                   {"version": __version__, "git_describe": git_describe(), "config": cfg.as_dict(),
                    "seeds": {"disorder": seeds}, "distribution": "uniform[-1, 1] times epsilon",
                    "exponent": scan.exponent, "exponent_ci": list(scan.exponent_ci)})
    return scan, path
