"""Experiment harness: sweeps, repetitions, seeding and CSV persistence.

Every cell (grid, strategy, k) derives its per-repetition seeds by
hashing the cell coordinates with the plan's base seed, so results are
independent of execution order and reruns are byte-identical.  Rows are
written incrementally while a plan runs (partial results survive an
interrupt) and rewritten in sorted order on success.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import broadcast_regular_bound, idle_bound, isolation_bound
from .errors import ConfigError, ExperimentsError
from .metrics import broadcast_stats, idle_stats, isolation_stats
from .simulator import (
    MEETINGS_ALL,
    SimConfig,
    Strategy,
    run,
    run_broadcast,
)
from .topology import GridSpec, cached_topology

DEFAULT_BASE_SEED = 20210607
OUT_DIR_ENV = "GRIDPATROL_OUT"

IDLE_HEADER = ["grid", "strategy", "p", "k", "reps", "max_idle", "avg_idle", "min_idle"]
ISOLATION_HEADER = [
    "grid", "strategy", "p", "k", "reps",
    "max_isolation", "avg_isolation", "min_isolation",
]
BROADCAST_HEADER = ["grid", "strategy", "p", "k", "trials", "mean_broadcast", "cap_hits"]
MIXING_HEADER = ["grid", "n", "epsilon", "t_mix"]

METRIC_HEADERS = {
    "idle": IDLE_HEADER,
    "isolation": ISOLATION_HEADER,
    "broadcast": BROADCAST_HEADER,
    "mixing": MIXING_HEADER,
}

PLAN_METRICS = ("idle", "isolation", "broadcast")


def derive_seed(
    base_seed: int,
    grid: GridSpec,
    strategy: Strategy,
    k: int,
    rep: int,
    stream: str = "run",
) -> int:
    """Stable 64-bit seed for one repetition of one cell."""
    text = f"{base_seed}|{grid}|{strategy.kind}|{strategy.p!r}|{k}|{rep}|{stream}"
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "results"))


@dataclass(frozen=True)
class ExperimentPlan:
    """The sweep to execute and where to put the results."""

    grids: tuple[GridSpec, ...]
    strategies: tuple[Strategy, ...]
    k_values: tuple[int, ...]
    metrics: tuple[str, ...] = ("idle", "isolation")
    reps: int = 10
    broadcast_trials: int | None = None
    duration: float | None = None
    base_seed: int = DEFAULT_BASE_SEED
    out_dir: Path = field(default_factory=default_out_dir)
    meetings: str = MEETINGS_ALL
    jobs: int = 1

    def __post_init__(self):
        if not self.grids or not self.strategies or not self.k_values:
            raise ConfigError("plan needs at least one grid, strategy and k value")
        unknown = set(self.metrics) - set(PLAN_METRICS)
        if unknown:
            raise ConfigError(f"unknown metrics {sorted(unknown)}; choose from {PLAN_METRICS}")
        if self.reps < 1:
            raise ConfigError("reps must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")
        for grid in self.grids:
            for k in self.k_values:
                if k > grid.circles:
                    raise ConfigError(f"k={k} exceeds the {grid} circle count")

    def cells(self):
        """(metric-kind, grid, strategy, k) work units, skipping invalid k."""
        sim_metrics = tuple(m for m in self.metrics if m in ("idle", "isolation"))
        for grid in self.grids:
            for strategy in self.strategies:
                for k in sorted(set(self.k_values)):
                    wanted = tuple(
                        m for m in sim_metrics if m == "idle" or k >= 2
                    )
                    if wanted:
                        yield ("sim", grid, strategy, k, wanted)
                    if "broadcast" in self.metrics and k >= 2:
                        yield ("broadcast", grid, strategy, k, ("broadcast",))


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _sim_cell(args) -> list[tuple[str, list]]:
    """One (grid, strategy, k) cell: reps runs, then idle/isolation rows."""
    grid, strategy, k, wanted, reps, duration, base_seed, meetings = args
    topo = cached_topology(grid.rows, grid.cols)
    seeds = [derive_seed(base_seed, grid, strategy, k, rep) for rep in range(reps)]
    logs = []
    for seed in seeds:
        config = SimConfig(grid, k, strategy, duration=duration, seed=seed,
                           reps=reps, meetings=meetings)
        logs.append(run(config, topo))
    horizon = SimConfig(grid, k, strategy, duration=duration, seed=0).horizon_units
    rows = []
    if "idle" in wanted:
        s = idle_stats(logs, topo.graph, horizon)
        rows.append(("idle", [str(grid), strategy.kind, _fmt(strategy.p), k, reps,
                              _fmt(s.max_idle), _fmt(s.avg_idle), _fmt(s.min_idle)]))
    if "isolation" in wanted:
        s = isolation_stats(logs, k, horizon)
        rows.append(("isolation", [str(grid), strategy.kind, _fmt(strategy.p), k, reps,
                                   _fmt(s.max_isolation), _fmt(s.avg_isolation),
                                   _fmt(s.min_isolation)]))
    return rows


def _broadcast_cell(args) -> list[tuple[str, list]]:
    grid, strategy, k, trials, duration, base_seed, meetings = args
    topo = cached_topology(grid.rows, grid.cols)
    times = []
    for trial in range(trials):
        seed = derive_seed(base_seed, grid, strategy, k, trial, stream="broadcast")
        config = SimConfig(grid, k, strategy, duration=duration, seed=seed,
                           meetings=meetings)
        times.append(run_broadcast(config, np.random.default_rng(seed), topo))
    s = broadcast_stats(times, grid, allow_any_trial_count=True)
    return [("broadcast", [str(grid), strategy.kind, _fmt(strategy.p), k, s.trials,
                           _fmt(s.mean_broadcast), s.cap_hits])]


def _cell_args(plan: ExperimentPlan, cell):
    kind, grid, strategy, k, wanted = cell
    if kind == "sim":
        return _sim_cell, (grid, strategy, k, wanted, plan.reps, plan.duration,
                           plan.base_seed, plan.meetings)
    trials = plan.broadcast_trials or grid.circles
    return _broadcast_cell, (grid, strategy, k, trials, plan.duration,
                             plan.base_seed, plan.meetings)


def _row_key(row: list) -> tuple:
    return (row[0], row[1], row[2], int(row[3]))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def run_plan(plan: ExperimentPlan) -> dict[str, Path]:
    """Execute all plan cells and write one CSV per metric plus a manifest."""
    start = time.time()
    out = Path(plan.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = list(plan.cells())
    if not cells:
        raise ExperimentsError("plan produced no runnable cells")

    collected: dict[str, list[list]] = {}
    partials: dict[str, object] = {}

    def append(metric: str, row: list) -> None:
        collected.setdefault(metric, []).append(row)
        if metric not in partials:
            fh = (out / f"{metric}.csv").open("w", newline="")
            csv.writer(fh).writerow(METRIC_HEADERS[metric])
            partials[metric] = fh
        csv.writer(partials[metric]).writerow(row)
        partials[metric].flush()

    try:
        if plan.jobs > 1:
            with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
                futures = [pool.submit(fn, args)
                           for fn, args in (_cell_args(plan, c) for c in cells)]
                for future in futures:
                    for metric, row in future.result():
                        append(metric, row)
        else:
            for cell in cells:
                fn, args = _cell_args(plan, cell)
                for metric, row in fn(args):
                    append(metric, row)
    finally:
        for fh in partials.values():
            fh.close()

    paths = {}
    for metric, rows in collected.items():
        rows.sort(key=_row_key)
        path = out / f"{metric}.csv"
        _write_csv(path, METRIC_HEADERS[metric], rows)
        paths[metric] = path

    manifest = {
        "plan": {
            "grids": [str(g) for g in plan.grids],
            "strategies": [{"kind": s.kind, "p": s.p} for s in plan.strategies],
            "k_values": sorted(set(plan.k_values)),
            "metrics": list(plan.metrics),
            "reps": plan.reps,
            "broadcast_trials": plan.broadcast_trials,
            "duration": plan.duration,
            "base_seed": plan.base_seed,
            "meetings": plan.meetings,
        },
        "seeds": {
            f"{kind}/{grid}/{strategy.kind}/p={strategy.p!r}/k={k}": [
                derive_seed(plan.base_seed, grid, strategy, k, rep,
                            stream="broadcast" if kind == "broadcast" else "run")
                for rep in range(
                    (plan.broadcast_trials or grid.circles)
                    if kind == "broadcast" else plan.reps
                )
            ]
            for kind, grid, strategy, k, _ in cells
        },
        "versions": {
            "gridpatrol": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "wall_time_s": round(time.time() - start, 3),
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    paths["manifest"] = manifest_path
    return paths


def _read_csv(path: Path) -> list[dict]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


COMPARE_HEADER = ["grid", "metric", "strategy", "p", "k", "empirical", "theoretical", "rel_gap"]


def compare_with_theory(
    results_dir: Path,
    out_path: Path | None = None,
    delta: float = 16.0,
) -> list[list]:
    """Join empirical averages with the closed-form bounds per (n, k).

    Reads whichever of idle.csv / isolation.csv / broadcast.csv exist in
    ``results_dir`` and emits one row per empirical row with the matching
    theoretical value and the relative gap (empirical - bound) / bound.
    """
    results_dir = Path(results_dir)
    sources = {
        "idle": ("avg_idle", lambda n, k: idle_bound(n, k)),
        "isolation": ("avg_isolation", lambda n, k: float(isolation_bound(n, k))),
        "broadcast": ("mean_broadcast", lambda n, k: broadcast_regular_bound(n, k, delta)),
    }
    rows = []
    found = False
    for metric, (column, bound) in sources.items():
        path = results_dir / f"{metric}.csv"
        if not path.exists():
            continue
        found = True
        for rec in _read_csv(path):
            r, c = rec["grid"].split("x")
            n = int(r) * int(c)
            k = int(rec["k"])
            if metric in ("isolation", "broadcast") and k < 2:
                continue
            empirical = float(rec[column])
            theoretical = bound(n, k)
            rows.append([
                rec["grid"], metric, rec["strategy"], rec["p"], k,
                _fmt(empirical), _fmt(theoretical),
                _fmt((empirical - theoretical) / theoretical),
            ])
    if not found:
        raise ExperimentsError(f"no result CSVs found under {results_dir}")
    rows.sort(key=lambda row: (row[0], row[1], row[2], row[3], int(row[4])))
    if out_path is not None:
        _write_csv(Path(out_path), COMPARE_HEADER, rows)
    return rows
