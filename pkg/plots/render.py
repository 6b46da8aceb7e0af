#!/usr/bin/env python3
"""Regenerate the comparison figures from the harness CSVs.

Reads only the published CSV schemas (idle.csv, isolation.csv,
broadcast.csv, mixing.csv); it never touches simulator internals, so the
simulation package does not need to be installed.  Encoding: max/avg/min
series are dotted/solid/dashed; random is blue, quasi-random orange,
deterministic red; theory overlays are labeled "Theoretical".

Usage:
    python3 plots/render.py --metric idle --in results/reference --out figs/
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

METRICS = ("idle", "isolation", "broadcast", "mixing", "theory-compare")
SCALES = ("linear", "log-x", "log-y", "log-log")

STAT_STYLES = {"max": ":", "avg": "-", "min": "--"}
STRATEGY_COLORS = {
    "random": "tab:blue",
    "quasi-random": "tab:orange",
    "deterministic": "tab:red",
}

DEFAULT_SCALE = {
    "idle": "linear",
    "isolation": "log-y",
    "broadcast": "log-log",
    "mixing": "linear",
    "theory-compare": "linear",
}


class RenderError(Exception):
    pass


def read_csv(path: Path) -> list[dict]:
    if not path.exists():
        raise RenderError(f"missing input CSV: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise RenderError(f"empty CSV: {path}")
    return rows


def _series_by_strategy(rows: list[dict], columns: dict[str, str]):
    """-> {strategy: (k values, {stat: y values})}, k-sorted."""
    per_strategy: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        per_strategy[row["strategy"]].append(row)
    series = {}
    for strategy, recs in per_strategy.items():
        try:
            recs.sort(key=lambda r: int(r["k"]))
            ks = [int(r["k"]) for r in recs]
            ys = {stat: [float(r[col]) for r in recs] for stat, col in columns.items()}
        except (KeyError, ValueError) as exc:
            raise RenderError(f"malformed CSV row for strategy {strategy}: {exc}")
        series[strategy] = (ks, ys)
    return series


def _apply_scale(ax, scale: str):
    if scale in ("log-x", "log-log"):
        ax.set_xscale("log")
    if scale in ("log-y", "log-log"):
        ax.set_yscale("log")


def _grids(rows: list[dict]) -> list[str]:
    return sorted({row["grid"] for row in rows})


def render_idle(rows: list[dict], scale: str, grid: str):
    columns = {"max": "max_idle", "avg": "avg_idle", "min": "min_idle"}
    fig, ax = plt.subplots(figsize=(7, 5))
    for strategy, (ks, ys) in _series_by_strategy(rows, columns).items():
        color = STRATEGY_COLORS.get(strategy, "tab:gray")
        for stat, style in STAT_STYLES.items():
            ax.plot(ks, ys[stat], style, color=color,
                    label=f"{strategy} {stat}")
    _apply_scale(ax, scale)
    ax.set_xlabel("robots k")
    ax.set_ylabel("idle time (time units)")
    ax.set_title(f"Idle time, {grid} grid")
    ax.legend(fontsize=7, ncol=3)
    return fig


def render_isolation(rows: list[dict], scale: str, grid: str):
    columns = {"max": "max_isolation", "avg": "avg_isolation", "min": "min_isolation"}
    fig, ax = plt.subplots(figsize=(7, 5))
    for strategy, (ks, ys) in _series_by_strategy(rows, columns).items():
        color = STRATEGY_COLORS.get(strategy, "tab:gray")
        for stat, style in STAT_STYLES.items():
            ax.plot(ks, ys[stat], style, color=color,
                    label=f"{strategy} {stat}")
    _apply_scale(ax, scale)
    ax.set_xlabel("robots k")
    ax.set_ylabel("isolation time (time units)")
    ax.set_title(f"Isolation time, {grid} grid")
    ax.legend(fontsize=7, ncol=3)
    return fig


def broadcast_theory(n: int, k: int, delta: float = 16.0) -> float:
    return 2.0 * math.log(k) * (delta - 1.0) * n / (k * (delta - 2.0))


def render_broadcast(rows: list[dict], scale: str, grid: str):
    columns = {"avg": "mean_broadcast"}
    fig, ax = plt.subplots(figsize=(7, 5))
    series = _series_by_strategy(rows, columns)
    for strategy, (ks, ys) in series.items():
        color = STRATEGY_COLORS.get(strategy, "tab:gray")
        ax.plot(ks, ys["avg"], "-", color=color, label=strategy)
    r, c = grid.split("x")
    n = int(r) * int(c)
    if "random" in series:
        ks = [k for k in series["random"][0] if k >= 2]
        ax.plot(ks, [broadcast_theory(n, k) for k in ks], "-.",
                color="black", label="Theoretical")
    _apply_scale(ax, scale)
    ax.set_xlabel("robots k")
    ax.set_ylabel("broadcast time (time units)")
    ax.set_title(f"Broadcast time, {grid} grid")
    ax.legend(fontsize=8)
    return fig


def fit_mixing_slope(rows: list[dict]) -> float:
    """Least-squares slope of t_mix against the circle count."""
    try:
        n = np.array([int(r["n"]) for r in rows], dtype=float)
        t = np.array([int(r["t_mix"]) for r in rows], dtype=float)
    except (KeyError, ValueError) as exc:
        raise RenderError(f"malformed mixing CSV: {exc}")
    if len(n) < 2:
        raise RenderError("mixing fit needs at least two grid sizes")
    slope, _ = np.polyfit(n, t, 1)
    return float(slope)


def render_mixing(rows: list[dict], scale: str, grid: str = ""):
    slope = fit_mixing_slope(rows)
    n = np.array([int(r["n"]) for r in rows], dtype=float)
    t = np.array([int(r["t_mix"]) for r in rows], dtype=float)
    intercept = t.mean() - slope * n.mean()
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(n, t, color="tab:blue", zorder=3, label="measured")
    xs = np.linspace(n.min(), n.max(), 50)
    ax.plot(xs, slope * xs + intercept, "--", color="tab:red",
            label=f"fit, slope {slope:.3f}")
    _apply_scale(ax, scale)
    ax.set_xlabel("trajectories n")
    ax.set_ylabel("mixing time (steps)")
    ax.set_title("Mixing time vs system size")
    ax.legend(fontsize=8)
    return fig


def render_theory_compare(rows: list[dict], scale: str, grid: str):
    """Empirical averages against their closed-form counterparts."""
    fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
    panels = {"idle": axes[0], "isolation": axes[1], "broadcast": axes[2]}
    by_metric: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        if row["strategy"] == "random":
            by_metric[row["metric"]].append(row)
    for metric, ax in panels.items():
        recs = sorted(by_metric.get(metric, []), key=lambda r: int(r["k"]))
        if not recs:
            ax.set_visible(False)
            continue
        ks = [int(r["k"]) for r in recs]
        ax.plot(ks, [float(r["empirical"]) for r in recs], "-",
                color=STRATEGY_COLORS["random"], label="random")
        ax.plot(ks, [float(r["theoretical"]) for r in recs], "-.",
                color="black", label="Theoretical")
        _apply_scale(ax, scale)
        ax.set_xlabel("robots k")
        ax.set_ylabel(f"{metric} (time units)")
        ax.set_title(f"{metric}, {grid} grid")
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


RENDERERS = {
    "idle": ("idle.csv", render_idle),
    "isolation": ("isolation.csv", render_isolation),
    "broadcast": ("broadcast.csv", render_broadcast),
    "mixing": ("mixing.csv", render_mixing),
    "theory-compare": ("compare.csv", render_theory_compare),
}


def render(metric: str, in_dir: Path, out_dir: Path, scale: str | None = None,
           image_format: str = "svg") -> list[Path]:
    """Render one metric's figure(s); returns the written paths."""
    if metric not in RENDERERS:
        raise RenderError(f"unknown metric {metric!r}, expected one of {METRICS}")
    filename, renderer = RENDERERS[metric]
    rows = read_csv(Path(in_dir) / filename)
    scale = scale or DEFAULT_SCALE[metric]
    if scale not in SCALES:
        raise RenderError(f"unknown scale {scale!r}, expected one of {SCALES}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if metric == "mixing":
        groups = {"": rows}
    else:
        groups = {g: [r for r in rows if r["grid"] == g] for g in _grids(rows)}
    for grid, group in groups.items():
        fig = renderer(group, scale, grid)
        suffix = f"_{grid}" if grid else ""
        path = out_dir / f"{metric}{suffix}.{image_format}"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--metric", required=True, choices=METRICS)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the harness CSVs")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory to write figures into")
    parser.add_argument("--scale", choices=SCALES, default=None,
                        help="axis scaling (defaults per metric)")
    parser.add_argument("--format", dest="image_format",
                        choices=("svg", "png"), default="svg")
    args = parser.parse_args(argv)
    try:
        written = render(args.metric, Path(args.in_dir), Path(args.out_dir),
                         args.scale, args.image_format)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
