"""Reduce event logs into idle, isolation and broadcast statistics.

All reductions are deterministic functions of the logs.  Gaps are the
interior differences of an event-time sequence, so the score of a
sequence t_1 < ... < t_m is (t_m - t_1) / (m - 1); anything observed
fewer than twice scores the simulation horizon (4n time units at the
default duration).  Times are reported in time units (ticks / 4).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MetricsError
from .simulator import EventLog
from .topology import GridSpec, WalkingGraph

__all__ = [
    "IdleSummary",
    "IsolationSummary",
    "BroadcastSummary",
    "idle_stats",
    "isolation_stats",
    "broadcast_stats",
]


def _interior_gap_mean(ticks: list[int], cap: float) -> float:
    if len(ticks) < 2:
        return cap
    return (ticks[-1] - ticks[0]) / 4.0 / (len(ticks) - 1)


def _mean(values) -> float:
    # summing in sorted order makes the reduction exactly permutation-invariant
    values = sorted(values)
    return sum(values) / len(values)


@dataclass(frozen=True)
class IdleSummary:
    """Per-arc mean revisit gaps and their extrema over all arcs."""

    per_arc: dict[int, float]
    max_idle: float
    avg_idle: float
    min_idle: float
    reps: int


@dataclass(frozen=True)
class IsolationSummary:
    """Worst/average/best per-robot meeting gaps, averaged over repetitions."""

    max_isolation: float
    avg_isolation: float
    min_isolation: float
    reps: int


@dataclass(frozen=True)
class BroadcastSummary:
    """Mean broadcast time over the trials plus how many hit the cap."""

    mean_broadcast: float
    trials: int
    cap_hits: int


def idle_stats(logs: list[EventLog], wg: WalkingGraph, duration: float) -> IdleSummary:
    """Mean time between consecutive passes through each arc.

    Per repetition an arc traversed at ticks t_1 < ... < t_m scores
    (t_m - t_1)/(m-1) quarter ticks, in time units; arcs seen fewer than
    twice score the full duration.  Per-arc values are means over the
    repetitions; the summary extrema/mean range over arcs.
    """
    if not logs:
        raise MetricsError("idle_stats needs at least one log")
    per_arc: dict[int, float] = {}
    for arc in range(wg.arc_count):
        per_arc[arc] = _mean(
            _interior_gap_mean(log.arc_ticks.get(arc, []), duration) for log in logs
        )
    values = list(per_arc.values())
    return IdleSummary(
        per_arc=per_arc,
        max_idle=max(values),
        avg_idle=_mean(values),
        min_idle=min(values),
        reps=len(logs),
    )


def isolation_stats(logs: list[EventLog], k: int, duration: float) -> IsolationSummary:
    """Mean time between a robot's consecutive meetings, two-stage averaged.

    Within each repetition the max/avg/min of the per-robot gap means is
    taken over the k robots; the summary averages those three statistics
    over the repetitions.  Robots with fewer than two meetings score the
    full duration.
    """
    if k < 2:
        raise MetricsError("isolation is undefined for a single robot")
    per_log = []
    for log in logs:
        if log.robots != k:
            raise MetricsError(f"log has {log.robots} robots, expected {k}")
        gaps = [
            _interior_gap_mean(ticks, duration)
            for ticks in log.meeting_ticks_by_robot()
        ]
        per_log.append((max(gaps), _mean(gaps), min(gaps)))
    if not per_log:
        raise MetricsError("isolation_stats needs at least one log")
    return IsolationSummary(
        max_isolation=_mean(s[0] for s in per_log),
        avg_isolation=_mean(s[1] for s in per_log),
        min_isolation=_mean(s[2] for s in per_log),
        reps=len(per_log),
    )


def broadcast_stats(
    trial_times: list[float],
    grid: GridSpec,
    allow_any_trial_count: bool = False,
) -> BroadcastSummary:
    """Mean of the broadcast trials; expects n trials unless overridden."""
    n = grid.circles
    if not trial_times:
        raise MetricsError("broadcast_stats needs at least one trial")
    if not allow_any_trial_count and len(trial_times) != n:
        raise MetricsError(
            f"expected {n} broadcast trials for {grid}, got {len(trial_times)}"
        )
    cap = 4.0 * n
    return BroadcastSummary(
        mean_broadcast=_mean(trial_times),
        trials=len(trial_times),
        cap_hits=sum(1 for t in trial_times if t >= cap),
    )
