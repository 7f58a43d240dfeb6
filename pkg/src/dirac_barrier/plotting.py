"""Render sweep and zone-map files written by the CLI to image files.

Kept apart from the CLI so the core tool never imports matplotlib::

    python -m dirac_barrier.plotting sweep.csv            # -> sweep.png
    python -m dirac_barrier.plotting zones.jsonl -o map.pdf
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .records import read_records

# alpha precedes relative_phase: the latter wraps at ±pi and would fold a phase scan
SWEPT_COLUMNS = ("E", "angle", "V0", "L", "alpha", "relative_phase")
ZONE_ORDER = ("diffusion", "klein", "tunneling", "boundary")
ZONE_COLORS = ("#4c72b0", "#c44e52", "#55a868", "#222222")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update(
        {
            "figure.figsize": (6.4, 4.0),
            "font.size": 10,
            "axes.spines.top": False,
            "axes.spines.right": False,
            "legend.frameon": False,
            "savefig.dpi": 150,
            "savefig.bbox": "tight",
        }
    )
    return plt


def swept_variable(records: Sequence[dict]) -> str:
    """First input column that is not constant across the records."""
    for name in SWEPT_COLUMNS:
        values = {r[name] for r in records}
        if len(values) > 1:
            return name
    raise ValueError("no swept column found; is this a single-point file?")


def plot_sweep(records: Sequence[dict], path, variable: Optional[str] = None) -> Path:
    """Helicity-resolved intensities and unitarity residual against the swept variable."""
    plt = _pyplot()
    variable = variable or swept_variable(records)
    x = np.array([r[variable] for r in records], dtype=float)
    fig, (ax, ax_res) = plt.subplots(2, 1, sharex=True, height_ratios=(3, 1))
    for key, label in (
        ("r_plus", r"$|R_+|^2$"),
        ("r_minus", r"$|R_-|^2$"),
        ("t_plus", r"$|T_+|^2$"),
        ("t_minus", r"$|T_-|^2$"),
    ):
        ax.plot(x, [r[key] for r in records], label=label)
    ax.set_ylabel("intensity")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(ncol=4, loc="upper center", bbox_to_anchor=(0.5, 1.15))
    residual = np.array([r["unitarity_residual"] for r in records], dtype=float)
    ax_res.semilogy(x, np.maximum(residual, 1e-18), color="k", lw=0.8)
    ax_res.set_ylabel("unitarity\nresidual")
    ax_res.set_xlabel(variable)
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_zone_map(records: Sequence[dict], path) -> Path:
    """Colour-coded energy zones over the (E, angle) grid."""
    plt = _pyplot()
    from matplotlib.colors import ListedColormap

    energies = np.unique([r["E"] for r in records])
    angles = np.unique([r["angle"] for r in records])
    grid = np.full((angles.size, energies.size), np.nan)
    e_index = {e: i for i, e in enumerate(energies)}
    a_index = {a: i for i, a in enumerate(angles)}
    for r in records:
        grid[a_index[r["angle"]], e_index[r["E"]]] = ZONE_ORDER.index(r["zone"])
    fig, ax = plt.subplots()
    ax.pcolormesh(energies, angles, grid, cmap=ListedColormap(ZONE_COLORS), vmin=-0.5, vmax=3.5, shading="auto")
    for name, color in zip(ZONE_ORDER, ZONE_COLORS):
        ax.plot([], [], "s", color=color, label=name)
    ax.legend(loc="upper left", bbox_to_anchor=(1.0, 1.0))
    ax.set_xlabel("E")
    ax.set_ylabel("angle")
    ax.set_title(f"V0 = {records[0]['V0']:g}, m = {records[0]['m']:g}")
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def render_file(src, out=None, variable: Optional[str] = None) -> Path:
    src = Path(src)
    records = read_records(src)
    if not records:
        raise ValueError(f"{src} holds no records")
    out = Path(out) if out else src.with_suffix(".png")
    if "q1_squared" in records[0] and "R_re" not in records[0]:
        return plot_zone_map(records, out)
    return plot_sweep(records, out, variable)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="python -m dirac_barrier.plotting", description=__doc__.splitlines()[0])
    parser.add_argument("source", help="CSV or JSON-lines file from `sweep`, `phase-scan` or `zones`")
    parser.add_argument("-o", "--out", help="image path (default: source with .png suffix)")
    parser.add_argument("--variable", choices=SWEPT_COLUMNS, help="x-axis column for sweeps")
    args = parser.parse_args(argv)
    try:
        path = render_file(args.source, args.out, args.variable)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
