"""CSV, text and SVG writers with fixed headers and byte-stable output."""
from __future__ import annotations

import csv
import json
import subprocess
import threading
from pathlib import Path

import numpy as np

SPECTRUM_HEADER = ("index", "re_lambda", "im_lambda", "class")
SCAN_HEADER = ("kind", "epsilon", "seed", "decay_rate", "freq_shift")
OPERATOR_HEADER = ("row", "col", "re", "im")

# rcParams are process-global, so plots are serialised
_PLOT_LOCK = threading.Lock()


def fmt(x) -> str:
    """12 significant digits; integers and strings pass through."""
    if isinstance(x, (str, int, np.integer)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return f"{fmt(x.real)}{'+' if x.imag >= 0 else '-'}{fmt(abs(x.imag))}j"
    x = float(x)
    if x == 0:
        return "0"  # avoid "-0"
    return f"{x:.12g}"


def _write_rows(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def trajectory_header(site_names, concurrence: bool = True) -> list[str]:
    return ["t", *site_names, *(("conc_ci", "conc_ij") if concurrence else ())]


def write_trajectory(path, times, magnetization, site_names, conc_ci=None, conc_ij=None) -> Path:
    """Columns ``t, <site labels>, conc_ci, conc_ij``; concurrence columns only if given."""
    times = np.asarray(times, dtype=float)
    mag = np.asarray(magnetization, dtype=float).reshape(len(times), len(site_names))
    cols = [times[:, None], mag]
    with_conc = conc_ci is not None and conc_ij is not None
    if with_conc:
        cols += [np.asarray(conc_ci, dtype=float)[:, None], np.asarray(conc_ij, dtype=float)[:, None]]
    table = np.hstack(cols) if len(times) else np.zeros((0, 0))
    return _write_rows(path, trajectory_header(site_names, with_conc), table)


def write_spectrum(path, eigenvalues, labels) -> Path:
    rows = [(k, lam.real, lam.imag, lab) for k, (lam, lab) in enumerate(zip(eigenvalues, labels))]
    return _write_rows(path, SPECTRUM_HEADER, rows)


def write_scan(path, scan) -> Path:
    rows = [(r["kind"], r["epsilon"], r["seed"], r["decay_rate"], r["freq_shift"]) for r in scan.rows]
    lo, hi = scan.exponent_ci
    # summary row: exponent in decay_rate, CI bounds in the neighbouring columns
    rows.append(("summary", "exponent", "ci95", scan.exponent, f"{fmt(lo)}:{fmt(hi)}"))
    return _write_rows(path, SCAN_HEADER, rows)


def write_operator(path_or_file, matrix: np.ndarray, tol: float = 0.0):
    """Sparse ``row, col, re, im`` dump of a matrix; ``path_or_file`` may be a stream."""
    m = np.asarray(matrix)
    rows = [(i, j, m[i, j].real, m[i, j].imag) for i, j in zip(*np.nonzero(np.abs(m) > tol))]
    if hasattr(path_or_file, "write"):
        w = csv.writer(path_or_file, lineterminator="\n")
        w.writerow(OPERATOR_HEADER)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        return path_or_file
    return _write_rows(path_or_file, OPERATOR_HEADER, rows)


def write_report(path, entries) -> Path:
    """Two-column ``quantity,value`` report."""
    return _write_rows(path, ("quantity", "value"), entries)


def git_describe(cwd=None) -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=cwd or Path(__file__).parent, capture_output=True, text=True,
                             timeout=10)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else "unknown"


def write_manifest(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def plot_groups(path, times, series: dict, title: str = "", ylabel: str = r"$\langle\sigma^z\rangle$",
                background: dict | None = None) -> Path:
    """One panel per site group, one line per site, written as deterministic SVG.

    ``series`` maps a group name to ``{label: values}``.  ``background``
    has the same shape and is drawn in grey underneath.
    """
    import matplotlib
    from matplotlib.backends.backend_svg import FigureCanvasSVG
    from matplotlib.figure import Figure

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _PLOT_LOCK, matplotlib.rc_context({"svg.hashsalt": "abmotifs", "svg.fonttype": "none",
                                            "path.simplify": False}):
        fig = Figure(figsize=(7, 2.2 * len(series)))
        FigureCanvasSVG(fig)
        axes = fig.subplots(len(series), 1, sharex=True, squeeze=False)
        for ax, (group, lines) in zip(axes[:, 0], series.items()):
            if background and group in background:
                for values in background[group].values():
                    ax.plot(times, values, color="0.75", lw=0.8)
            for label, values in lines.items():
                ax.plot(times, values, lw=1.0, label=label)
            ax.set_ylabel(ylabel)
            ax.set_title(group, fontsize=9, loc="left")
            if len(lines) <= 8:
                ax.legend(fontsize=7, ncol=4, loc="upper right")
        axes[-1, 0].set_xlabel("t")
        if title:
            fig.suptitle(title, fontsize=10)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
