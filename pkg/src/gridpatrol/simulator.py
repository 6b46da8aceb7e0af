"""Tick engine for k synchronized robots under three shifting strategies.

One tick advances every robot a quarter circle along its current
trajectory.  A robot arriving at a link may continue onto the
neighboring circle (a shift); because of the schedule's meeting
property, the neighbor's synchronized position is at that same link, so
shifting never desynchronizes anybody.  Strategy rules:

* deterministic - shift iff the neighboring circle is unoccupied;
* random        - shift with probability p, regardless of occupancy;
* quasi-random  - shift with probability p iff the neighbor is
                  unoccupied, otherwise stay.

All decisions of a tick are evaluated against the pre-shift occupancy,
in robot-index order (that order also fixes RNG consumption), and then
applied atomically.  Events are recorded on arrival, i.e. at ticks >= 1;
the initial placement at tick 0 produces no events.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SimulationError
from .topology import LINK, GridSpec, Topology, build_topology

DETERMINISTIC = "deterministic"
RANDOM = "random"
QUASI_RANDOM = "quasi-random"
STRATEGY_KINDS = (DETERMINISTIC, RANDOM, QUASI_RANDOM)

MEETINGS_ALL = "all"
MEETINGS_LINK_ONLY = "link-only"
MEETING_RULES = (MEETINGS_ALL, MEETINGS_LINK_ONLY)


@dataclass(frozen=True)
class Strategy:
    """Shifting rule plus the shift probability used by the random rules."""

    kind: str
    p: float = 0.5

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy {self.kind!r}, expected one of {STRATEGY_KINDS}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"shift probability must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class SimConfig:
    """One experiment cell: grid, robot count, strategy, horizon, seed."""

    grid: GridSpec
    robots: int
    strategy: Strategy
    duration: float | None = None
    seed: int = 0
    reps: int = 10
    meetings: str = MEETINGS_ALL

    def __post_init__(self):
        n = self.grid.circles
        if not 1 <= self.robots <= n:
            raise ConfigError(f"robot count must be in [1, {n}], got {self.robots}")
        if self.duration is not None and self.duration < 0:
            raise ConfigError(f"duration must be nonnegative, got {self.duration}")
        if self.reps < 1:
            raise ConfigError(f"reps must be positive, got {self.reps}")
        if self.meetings not in MEETING_RULES:
            raise ConfigError(f"meeting rule must be one of {MEETING_RULES}")
        ticks = 4.0 * self.horizon_units
        if abs(ticks - round(ticks)) > 1e-9:
            raise ConfigError("duration must be a whole number of quarter ticks")

    @property
    def horizon_units(self) -> float:
        """Simulated time units; defaults to 4n as in the reference experiments."""
        if self.duration is not None:
            return self.duration
        return 4.0 * self.grid.circles

    @property
    def ticks(self) -> int:
        return round(4.0 * self.horizon_units)


@dataclass(frozen=True)
class SimState:
    """Tick counter plus each robot's current circle."""

    tick: int
    assignment: tuple[int, ...]


@dataclass(frozen=True)
class StepEvents:
    """Events produced while entering one tick."""

    tick: int
    arcs: tuple[int, ...]
    meetings: tuple[tuple[int, tuple[int, ...]], ...]


@dataclass
class EventLog:
    """Arc-traversal and meeting streams of one run.

    Traversals are stored per arc as sorted tick lists (one record per
    (arc, tick), co-travelers collapse); meetings as (vertex, tick,
    robots) groups in tick order, vertex order within a tick.
    """

    grid: GridSpec
    robots: int
    arc_ticks: dict[int, list[int]] = field(default_factory=dict)
    meetings: list[tuple[int, int, tuple[int, ...]]] = field(default_factory=list)
    final_tick: int = 0

    def traversals(self):
        """Flattened (arc, tick) stream sorted by (tick, arc)."""
        stream = [
            (arc, tick) for arc, ticks in self.arc_ticks.items() for tick in ticks
        ]
        stream.sort(key=lambda at: (at[1], at[0]))
        return stream

    def meeting_ticks_by_robot(self) -> list[list[int]]:
        ticks: list[list[int]] = [[] for _ in range(self.robots)]
        for _, tick, members in self.meetings:
            for r in members:
                ticks[r].append(tick)
        return ticks


def place_robots(config: SimConfig, rng: np.random.Generator) -> SimState:
    """Uniform placement on distinct circles, drawn in robot-index order."""
    n = config.grid.circles
    if config.robots > n:
        raise SimulationError(f"cannot place {config.robots} robots on {n} circles")
    remaining = list(range(n))
    assignment = []
    for _ in range(config.robots):
        idx = int(rng.integers(len(remaining)))
        assignment.append(remaining.pop(idx))
    return SimState(0, tuple(assignment))


def _advance(circles, occupancy, tick, kind, p, rng, link_exit):
    """Advance one tick in place: evaluate all shifts on pre-shift occupancy,
    then apply them atomically."""
    tm = tick % 4
    shifts = []
    if kind == DETERMINISTIC:
        for r, c in enumerate(circles):
            d = link_exit[c][tm]
            if d >= 0 and occupancy[d] == 0:
                shifts.append((r, d))
    elif kind == RANDOM:
        for r, c in enumerate(circles):
            if link_exit[c][tm] >= 0 and rng.random() < p:
                shifts.append((r, link_exit[c][tm]))
    else:
        for r, c in enumerate(circles):
            d = link_exit[c][tm]
            if d >= 0 and occupancy[d] == 0 and rng.random() < p:
                shifts.append((r, d))
    for r, d in shifts:
        occupancy[circles[r]] -= 1
        circles[r] = d
        occupancy[d] += 1


def _meeting_groups(circles, position, tm):
    """Robots grouped by occupied vertex; only groups of two or more."""
    groups: dict[int, list[int]] = {}
    for r, c in enumerate(circles):
        groups.setdefault(position[c][tm], []).append(r)
    return [(v, members) for v, members in sorted(groups.items()) if len(members) >= 2]


def _filter_link_only(groups, previous, vertices):
    """Keep groups at a link reached from both of its circles."""
    kept = []
    for v, members in groups:
        vert = vertices[v]
        if vert.kind != LINK:
            continue
        arrived = {previous[r] for r in members}
        if set(vert.circles) <= arrived:
            kept.append((v, members))
    return kept


def step(
    state: SimState,
    strategy: Strategy,
    rng: np.random.Generator,
    topology: Topology,
    meetings: str = MEETINGS_ALL,
) -> tuple[SimState, StepEvents]:
    """Advance one tick and report the arcs traversed and meetings formed."""
    circles = list(state.assignment)
    occupancy = [0] * topology.grid.circles
    for c in circles:
        occupancy[c] += 1
    tick = state.tick + 1
    tm = tick % 4
    arcs = tuple(sorted({topology.entry_arc[c][tm] for c in circles}))
    previous = circles.copy()
    _advance(circles, occupancy, tick, strategy.kind, strategy.p, rng, topology.link_exit)
    groups = _meeting_groups(circles, topology.position, tm)
    if meetings == MEETINGS_LINK_ONLY:
        groups = _filter_link_only(groups, previous, topology.graph.vertices)
    events = StepEvents(tick, arcs, tuple((v, tuple(m)) for v, m in groups))
    return SimState(tick, tuple(circles)), events


def run(config: SimConfig, topology: Topology | None = None) -> EventLog:
    """Execute one seeded run and return its complete event log."""
    topo = topology if topology is not None else build_topology(config.grid)
    rng = np.random.default_rng(config.seed)
    state = place_robots(config, rng)
    circles = list(state.assignment)
    occupancy = [0] * config.grid.circles
    for c in circles:
        occupancy[c] += 1

    log = EventLog(config.grid, config.robots)
    arc_ticks = log.arc_ticks
    entry_arc, position, link_exit = topo.entry_arc, topo.position, topo.link_exit
    kind, p = config.strategy.kind, config.strategy.p
    link_only = config.meetings == MEETINGS_LINK_ONLY
    vertices = topo.graph.vertices
    track_meetings = config.robots >= 2

    for tick in range(1, config.ticks + 1):
        tm = tick % 4
        seen = set()
        for c in circles:
            arc = entry_arc[c][tm]
            if arc not in seen:
                seen.add(arc)
                arc_ticks.setdefault(arc, []).append(tick)
        previous = circles.copy() if link_only else None
        _advance(circles, occupancy, tick, kind, p, rng, link_exit)
        if track_meetings:
            groups = _meeting_groups(circles, position, tm)
            if link_only:
                groups = _filter_link_only(groups, previous, vertices)
            for v, members in groups:
                log.meetings.append((v, tick, tuple(members)))
        log.final_tick = tick
    return log


def run_broadcast(
    config: SimConfig,
    rng: np.random.Generator,
    topology: Topology | None = None,
) -> float:
    """Time units until one robot's message reaches all robots, capped.

    Places robots, marks a uniformly chosen robot informed, then closes
    the informed set over co-located groups at every tick.  Returns the
    completion time, or the horizon (4n units by default) if the message
    has not spread to everyone by then.
    """
    if config.robots < 2:
        raise SimulationError("broadcast needs at least 2 robots")
    topo = topology if topology is not None else build_topology(config.grid)
    state = place_robots(config, rng)
    circles = list(state.assignment)
    occupancy = [0] * config.grid.circles
    for c in circles:
        occupancy[c] += 1
    informed = [False] * config.robots
    informed[int(rng.integers(config.robots))] = True
    remaining = config.robots - 1

    position, link_exit = topo.position, topo.link_exit
    kind, p = config.strategy.kind, config.strategy.p
    for tick in range(1, config.ticks + 1):
        _advance(circles, occupancy, tick, kind, p, rng, link_exit)
        for _, members in _meeting_groups(circles, position, tick % 4):
            if any(informed[r] for r in members):
                for r in members:
                    if not informed[r]:
                        informed[r] = True
                        remaining -= 1
        if remaining == 0:
            return tick / 4.0
    return config.horizon_units
