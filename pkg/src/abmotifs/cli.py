"""Command-line entry point.

Subcommands::

    abmotifs simulate CONFIG        evolve a scenario and write its result bundle
    abmotifs spectrum CONFIG        Liouvillian spectrum only
    abmotifs reproduce fig1 [fig2 ...] [--n N] [--seed S]
    abmotifs disorder-scan CONFIG   decay-rate scaling under Hamiltonian disorder
    abmotifs describe CONFIG        CSV dump of the graph (or of the sector Hamiltonian)

Outputs go to ``--out`` or, by default, to a sub-directory of ``$ABMOTIFS_OUT``
(current directory if unset).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import PRESETS, ConfigError, ScenarioConfig, load, preset
from .export import write_operator
from .lattice import describe
from .liouville import NumericalInstability
from .sectors import sector_model

OUT_ENV = "ABMOTIFS_OUT"


def default_out(name: str) -> Path:
    return Path(os.environ.get(OUT_ENV, ".")) / name


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "dt", None) is not None:
        cfg.evolution.dt = str(args.dt)
    if getattr(args, "t_max", None) is not None:
        cfg.evolution.t_max = str(args.t_max)
    if getattr(args, "method", None) is not None:
        cfg.evolution.method = args.method
    return cfg


def _out_dir(args, cfg: ScenarioConfig, name: str) -> Path:
    if args.out:
        return Path(args.out)
    if cfg.output.dir:
        return Path(cfg.output.dir)
    return default_out(name)


def cmd_simulate(args) -> int:
    from .scenario import run_scenario

    cfg = _apply_overrides(load(args.config), args)
    out = _out_dir(args, cfg, Path(args.config).stem)
    res = run_scenario(cfg, out, name=Path(args.config).stem)
    for key, path in res.files.items():
        print(f"{key}: {path}")
    return 0


def cmd_spectrum(args) -> int:
    from .scenario import run_spectrum

    cfg = load(args.config)
    out = _out_dir(args, cfg, Path(args.config).stem)
    _, modes, path = run_spectrum(cfg, out)
    print(f"spectrum: {path}")
    for key, value in modes.as_dict().items():
        print(f"{key}: {value}")
    return 0


def cmd_reproduce(args) -> int:
    from .scenario import run_scenario

    root = Path(args.out) if args.out else default_out("reproduce")

    def one(fig):
        cfg = _apply_overrides(preset(fig, n=args.n, seed=args.seed), args)
        return fig, run_scenario(cfg, root / fig, name=fig)

    if args.jobs > 1 and len(args.figures) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, args.figures))
    else:
        results = [one(f) for f in args.figures]
    for fig, res in results:
        print(f"{fig}: {res.out_dir}")
    return 0


def cmd_disorder_scan(args) -> int:
    from .scenario import run_disorder_scan

    cfg = load(args.config)
    out = _out_dir(args, cfg, Path(args.config).stem)
    scan, path = run_disorder_scan(cfg, out, jobs=args.jobs)
    lo, hi = scan.exponent_ci
    print(f"scan: {path}")
    print(f"exponent: {scan.exponent:.4f} (95% CI {lo:.4f} .. {hi:.4f})")
    return 0


def cmd_describe(args) -> int:
    cfg = load(args.config)
    graph = cfg.build_graph()
    if args.hamiltonian:
        _, H, _ = sector_model(graph, cfg.sector.k)
        write_operator(sys.stdout, H.matrix)
    else:
        sys.stdout.write(describe(graph))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abmotifs", description="Dissipative flux-threaded spin motifs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, evolution=True):
        sp.add_argument("--out", help=f"output directory (default: ${OUT_ENV}/<name>)")
        sp.add_argument("--jobs", type=int, default=1, help="worker threads")
        if evolution:
            sp.add_argument("--dt", type=float)
            sp.add_argument("--t-max", dest="t_max", type=float)
            sp.add_argument("--method", choices=("rk4", "spectral"))

    sp = sub.add_parser("simulate", help="evolve a configured scenario")
    sp.add_argument("config")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("spectrum", help="Liouvillian spectrum of a configured model")
    sp.add_argument("config")
    common(sp, evolution=False)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("reproduce", help="run figure presets")
    sp.add_argument("figures", nargs="+", choices=sorted(PRESETS))
    sp.add_argument("--n", type=int, help="motif order (single-motif presets)")
    sp.add_argument("--seed", type=int, help="initial-state seed")
    common(sp)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("disorder-scan", help="decay-rate scaling under disorder")
    sp.add_argument("config")
    common(sp, evolution=False)
    sp.set_defaults(func=cmd_disorder_scan)

    sp = sub.add_parser("describe", help="CSV dump of sites, bonds and dissipators")
    sp.add_argument("config")
    sp.add_argument("--hamiltonian", action="store_true", help="dump the sector Hamiltonian instead")
    sp.set_defaults(func=cmd_describe)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalInstability as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
