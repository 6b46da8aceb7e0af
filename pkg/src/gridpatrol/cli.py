"""Command-line interface.

Exit codes: 0 on success, 2 on invalid configuration, 3 on a runtime or
invariant failure.  The default output directory comes from the
GRIDPATROL_OUT environment variable (falling back to ./results).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    broadcast_regular_bound,
    expected_visit_window,
    idle_bound,
    isolation_bound,
)
from .errors import ConfigError, GridPatrolError
from .experiments import (
    DEFAULT_BASE_SEED,
    MIXING_HEADER,
    ExperimentPlan,
    compare_with_theory,
    default_out_dir,
    run_plan,
)
from .motion_graph import MIXING_NORMS, mixing_time, motion_graph_for, stationary_check
from .simulator import (
    MEETING_RULES,
    MEETINGS_ALL,
    STRATEGY_KINDS,
    SimConfig,
    Strategy,
    run,
    run_broadcast,
)
from .topology import GridSpec, build_topology, cached_topology

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _parse_int_list(text: str) -> list[int]:
    """Comma list with a..b ranges: "1,4..6,10" -> [1, 4, 5, 6, 10]."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(part))
    if not values:
        raise ConfigError(f"empty integer list: {text!r}")
    return values


def _strategies(name: str, p: float) -> tuple[Strategy, ...]:
    if name == "all":
        return tuple(Strategy(kind, p) for kind in STRATEGY_KINDS)
    return (Strategy(name, p),)


def _grid(args) -> GridSpec:
    return GridSpec(args.rows, args.cols if args.cols else args.rows)


def _add_grid_flags(parser):
    parser.add_argument("--rows", type=int, required=True, help="grid rows N")
    parser.add_argument("--cols", type=int, default=0,
                        help="grid columns M (defaults to --rows)")


def _add_run_flags(parser):
    parser.add_argument("--robots", "-k", type=int, required=True)
    parser.add_argument("--strategy", choices=STRATEGY_KINDS, default="random")
    parser.add_argument("--p", type=float, default=0.5, help="shift probability")
    parser.add_argument("--duration", type=float, default=None,
                        help="time units to simulate (default 4n)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--meetings", choices=MEETING_RULES, default=MEETINGS_ALL)


def cmd_simulate(args) -> int:
    grid = _grid(args)
    config = SimConfig(grid, args.robots, Strategy(args.strategy, args.p),
                       duration=args.duration, seed=args.seed, meetings=args.meetings)
    log = run(config)
    writer = csv.writer(sys.stdout)
    writer.writerow(["record", "tick", "id", "robots"])
    events = [("traversal", tick, arc, "") for arc, tick in log.traversals()]
    events += [("meeting", tick, vertex, "|".join(map(str, robots)))
               for vertex, tick, robots in log.meetings]
    events.sort(key=lambda e: (e[1], e[0], e[2]))
    writer.writerows(events)
    writer.writerow(["final", log.final_tick, "", ""])
    return EXIT_OK


def cmd_sweep(args) -> int:
    grids = tuple(GridSpec(n, args.cols if args.cols else n)
                  for n in _parse_int_list(str(args.rows)))
    plan = ExperimentPlan(
        grids=grids,
        strategies=_strategies(args.strategy, args.p),
        k_values=tuple(_parse_int_list(args.robots)),
        metrics=tuple(args.metrics.split(",")),
        reps=args.reps,
        duration=args.duration,
        base_seed=args.seed,
        out_dir=Path(args.out),
        meetings=args.meetings,
        jobs=args.jobs,
    )
    paths = run_plan(plan)
    for metric, path in sorted(paths.items()):
        print(f"{metric}: {path}")
    return EXIT_OK


def cmd_broadcast(args) -> int:
    grids = tuple(GridSpec(n, args.cols if args.cols else n)
                  for n in _parse_int_list(str(args.rows)))
    plan = ExperimentPlan(
        grids=grids,
        strategies=_strategies(args.strategy, args.p),
        k_values=tuple(_parse_int_list(args.robots)),
        metrics=("broadcast",),
        broadcast_trials=args.trials,
        duration=args.duration,
        base_seed=args.seed,
        out_dir=Path(args.out),
        meetings=args.meetings,
        jobs=args.jobs,
    )
    paths = run_plan(plan)
    for metric, path in sorted(paths.items()):
        print(f"{metric}: {path}")
    return EXIT_OK


def cmd_dmg(args) -> int:
    grid = _grid(args)
    topo = build_topology(grid)
    mg, matrix = motion_graph_for(topo)
    report = stationary_check(matrix)
    if not report.passed:
        print(f"stationary check failed: {report}", file=sys.stderr)
        return EXIT_RUNTIME
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["i", "j", "c_ij", "m_ij"])
        for i in range(mg.n):
            for j in range(mg.n):
                if (i, j) in mg.link_counts:
                    writer.writerow([i, j, mg.link_counts[(i, j)],
                                     repr(float(matrix[i, j]))])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_mixing(args) -> int:
    sizes = _parse_int_list(str(args.sizes))
    rows = []
    print("n,t_mix,epsilon")
    for size in sizes:
        grid = GridSpec(size, args.cols if args.cols else size)
        _, matrix = motion_graph_for(cached_topology(grid.rows, grid.cols))
        t = mixing_time(matrix, epsilon=args.epsilon, t_max=args.t_max, norm=args.norm)
        print(f"{grid.circles},{t},{args.epsilon}")
        rows.append([str(grid), grid.circles, args.epsilon, t])
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(MIXING_HEADER)
            writer.writerows(rows)
    return EXIT_OK


def cmd_bounds(args) -> int:
    payload = {
        "n": args.n,
        "k": args.k,
        "delta": args.delta,
        "idle_bound": idle_bound(args.n, args.k),
        "expected_visit_window": expected_visit_window(args.n, args.k),
        "isolation_bound": isolation_bound(args.n, args.k) if args.k >= 2 else None,
        "broadcast_regular_bound": (
            broadcast_regular_bound(args.n, args.k, args.delta) if args.k >= 2 else None
        ),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_graph(args) -> int:
    grid = _grid(args)
    topo = build_topology(grid)
    wg, sched = topo.graph, topo.schedule
    payload = {
        "grid": {"rows": grid.rows, "cols": grid.cols, "circles": grid.circles},
        "schedule": {
            "direction": list(sched.direction),
            "phase": list(sched.phase),
        },
        "counts": {
            "vertices": wg.vertex_count,
            "arcs": wg.arc_count,
            "four_times_rows_plus_cols": 4 * (grid.rows + grid.cols),
        },
        "vertices": [
            {"id": v.id, "kind": v.kind, "circles": list(v.circles)}
            for v in wg.vertices
        ],
        "arcs": [
            {"id": a.id, "circle": a.circle, "tail": a.tail, "head": a.head}
            for a in wg.arcs
        ],
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_compare(args) -> int:
    rows = compare_with_theory(Path(args.results), Path(args.out) if args.out else None,
                               delta=args.delta)
    if not args.out:
        writer = csv.writer(sys.stdout)
        writer.writerow(["grid", "metric", "strategy", "p", "k",
                         "empirical", "theoretical", "rel_gap"])
        writer.writerows(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridpatrol",
        description="Randomized patrolling on synchronized grids of circular trajectories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one seeded simulation, stream its events")
    _add_grid_flags(p)
    _add_run_flags(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="run the idle/isolation experiment grid")
    p.add_argument("--rows", required=True,
                   help="grid sizes, e.g. 10 or 10,15,20 (rows; square unless --cols)")
    p.add_argument("--cols", type=int, default=0)
    p.add_argument("--robots", "-k", required=True, help="k values, e.g. 1..99 or 2,5,10")
    p.add_argument("--strategy", choices=STRATEGY_KINDS + ("all",), default="all")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--metrics", default="idle,isolation")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_BASE_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=str(default_out_dir()))
    p.add_argument("--meetings", choices=MEETING_RULES, default=MEETINGS_ALL)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("broadcast", help="estimate broadcast times over many trials")
    p.add_argument("--rows", required=True)
    p.add_argument("--cols", type=int, default=0)
    p.add_argument("--robots", "-k", required=True)
    p.add_argument("--strategy", choices=STRATEGY_KINDS + ("all",), default="all")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=None, help="trials per cell (default n)")
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_BASE_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=str(default_out_dir()))
    p.add_argument("--meetings", choices=MEETING_RULES, default=MEETINGS_ALL)
    p.set_defaults(fn=cmd_broadcast)

    p = sub.add_parser("dmg", help="emit the transition matrix as CSV")
    _add_grid_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_dmg)

    p = sub.add_parser("mixing", help="mixing times for a list of grid sizes")
    p.add_argument("--sizes", required=True, help="e.g. 5,10,15,20,25,30")
    p.add_argument("--cols", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--t-max", type=int, default=10_000)
    p.add_argument("--norm", choices=MIXING_NORMS, default="fro")
    p.add_argument("--out", default=None, help="also write a mixing.csv here")
    p.set_defaults(fn=cmd_mixing)

    p = sub.add_parser("bounds", help="print the closed-form bounds as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, default=16.0)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("graph", help="dump the walking graph as JSON")
    _add_grid_flags(p)
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("compare", help="join sweep results with the theoretical bounds")
    p.add_argument("--results", default=str(default_out_dir()))
    p.add_argument("--out", default=None)
    p.add_argument("--delta", type=float, default=16.0)
    p.set_defaults(fn=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GridPatrolError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
