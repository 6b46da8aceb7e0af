"""Grid of synchronized circular trajectories and its walking graph.

An N x M grid of tangent unit circles, each traversed at constant speed
(one tour per time unit), quantized to quarter-circle steps: one tick is
1/4 time unit.  Each circle touches four waypoints (its E/N/W/S cardinal
points).  A waypoint shared by two adjacent circles is a communication
link; the remaining waypoints touch the bounding box of the grid.

A schedule assigns every circle a travel direction (checkerboarded so
neighbors run in opposite directions) and a phase, i.e. which waypoint
the circle's synchronized position occupies at tick 0.  The schedule
must let every adjacent pair meet: both circles' synchronized positions
coincide at their shared link at exactly one tick out of every four.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import TopologyError

CCW = 1
CW = -1

# Quarter positions around a circle, indexed in CCW angular order.
EAST, NORTH, WEST, SOUTH = 0, 1, 2, 3
QUARTER_NAMES = ("E", "N", "W", "S")

LINK = "link"
BOX = "box"


@dataclass(frozen=True)
class GridSpec:
    """Grid dimensions; circles are numbered row-major."""

    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise TopologyError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def circles(self) -> int:
        return self.rows * self.cols

    def circle_id(self, row: int, col: int) -> int:
        return row * self.cols + col

    def circle_rc(self, circle: int) -> tuple[int, int]:
        return divmod(circle, self.cols)

    def adjacent_pairs(self):
        """Ordered (west, east) and (north, south) neighbor pairs."""
        for r in range(self.rows):
            for c in range(self.cols):
                if c + 1 < self.cols:
                    yield self.circle_id(r, c), self.circle_id(r, c + 1), "h"
                if r + 1 < self.rows:
                    yield self.circle_id(r, c), self.circle_id(r + 1, c), "v"

    def __str__(self):
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True)
class Schedule:
    """Per-circle travel direction (+1 CCW / -1 CW) and starting quarter."""

    direction: tuple[int, ...]
    phase: tuple[int, ...]

    def quarter_at(self, circle: int, tick: int) -> int:
        """Quarter position occupied by the circle's synchronized robot."""
        return (self.phase[circle] + self.direction[circle] * tick) % 4


def meeting_ticks(grid: GridSpec, sched: Schedule, a: int, b: int) -> list[int]:
    """Ticks in 0..3 at which circles a < b are both at their shared waypoint.

    For a horizontal pair that waypoint is EAST of a / WEST of b; for a
    vertical pair SOUTH of a / NORTH of b.
    """
    ra, ca = grid.circle_rc(a)
    rb, cb = grid.circle_rc(b)
    if ra == rb and cb == ca + 1:
        qa, qb = EAST, WEST
    elif ca == cb and rb == ra + 1:
        qa, qb = SOUTH, NORTH
    else:
        raise TopologyError(f"circles {a} and {b} are not adjacent")
    return [
        t for t in range(4)
        if sched.quarter_at(a, t) == qa and sched.quarter_at(b, t) == qb
    ]


def validate_schedule(grid: GridSpec, sched: Schedule) -> None:
    """Raise unless directions checkerboard and every adjacent pair meets once per period."""
    n = grid.circles
    if len(sched.direction) != n or len(sched.phase) != n:
        raise TopologyError("schedule arity does not match the grid")
    if any(d not in (CCW, CW) for d in sched.direction):
        raise TopologyError("directions must be +1 (CCW) or -1 (CW)")
    if any(q not in (0, 1, 2, 3) for q in sched.phase):
        raise TopologyError("phases must be quarter offsets in {0,1,2,3}")
    for a, b, _ in grid.adjacent_pairs():
        if sched.direction[a] == sched.direction[b]:
            raise TopologyError(f"adjacent circles {a},{b} share a travel direction")
        ticks = meeting_ticks(grid, sched, a, b)
        if len(ticks) != 1:
            raise TopologyError(
                f"circles {a},{b} meet at ticks {ticks}, expected exactly one per period"
            )


def _checkerboard_directions(grid: GridSpec) -> tuple[int, ...]:
    return tuple(
        CCW if (r + c) % 2 == 0 else CW
        for r in range(grid.rows)
        for c in range(grid.cols)
    )


def _closed_form_phases(grid: GridSpec) -> tuple[int, ...]:
    # Solves the meeting congruences: within a row phases must sum to 2 mod 4
    # per horizontal pair, across rows to 0 mod 4 per vertical pair.
    return tuple(
        1 if r % 2 == 0 else 3
        for r in range(grid.rows)
        for _ in range(grid.cols)
    )


def _search_phases(grid: GridSpec, direction: tuple[int, ...]) -> tuple[int, ...]:
    """Row-by-row exhaustive search over uniform row phases."""
    row_phase: list[int] = []
    for r in range(grid.rows):
        found = None
        for cand in range(4):
            trial = row_phase + [cand]
            phases = tuple(trial[rr] for rr in range(r + 1) for _ in range(grid.cols))
            sub = GridSpec(r + 1, grid.cols)
            sched = Schedule(direction[: sub.circles], phases)
            try:
                validate_schedule(sub, sched)
            except TopologyError:
                continue
            found = cand
            break
        if found is None:
            raise TopologyError(f"no synchronized phase assignment found for row {r}")
        row_phase.append(found)
    return tuple(row_phase[r] for r in range(grid.rows) for _ in range(grid.cols))


def reverse_schedule(sched: Schedule) -> Schedule:
    """The schedule with every circle's orientation reversed.

    Synchronized positions sit just past their phase waypoint in the
    travel direction, so keeping each start on the same arc segment
    under the opposite orientation advances the phase by one quarter.
    The reversed system's motion graph is the transpose of the original.
    """
    return Schedule(
        tuple(-d for d in sched.direction),
        tuple((p + d) % 4 for p, d in zip(sched.phase, sched.direction)),
    )


def build_schedule(grid: GridSpec) -> Schedule:
    """Deterministic synchronized schedule for the grid.

    Tries the closed-form candidate first and verifies it; falls back to a
    per-row phase search if verification ever fails.
    """
    direction = _checkerboard_directions(grid)
    sched = Schedule(direction, _closed_form_phases(grid))
    try:
        validate_schedule(grid, sched)
        return sched
    except TopologyError:
        pass
    sched = Schedule(direction, _search_phases(grid, direction))
    validate_schedule(grid, sched)
    return sched


@dataclass(frozen=True)
class Vertex:
    """Waypoint of the walking graph; a link joins two circles, a box point one."""

    id: int
    kind: str
    circles: tuple[int, ...]


@dataclass(frozen=True)
class Arc:
    """Directed quarter-circle arc owned by a single circle."""

    id: int
    circle: int
    tail: int
    head: int


@dataclass(frozen=True)
class WalkingGraph:
    """Waypoints plus directed quarter arcs of all circles.

    ``waypoints[c][q]`` is the vertex at quarter position q of circle c;
    ``cycles[c]`` lists circle c's four vertices in travel order starting
    from its phase-0 position, so ``cycles[c][t % 4]`` is the synchronized
    position at tick t.  Arc ``4*c + q`` leaves quarter q of circle c.
    """

    vertices: tuple[Vertex, ...]
    arcs: tuple[Arc, ...]
    waypoints: tuple[tuple[int, int, int, int], ...]
    cycles: tuple[tuple[int, int, int, int], ...]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def arc_count(self) -> int:
        return len(self.arcs)


def build_walking_graph(grid: GridSpec, sched: Schedule) -> WalkingGraph:
    """Construct the walking graph; ids are row-major by circle, then quarter."""
    validate_schedule(grid, sched)
    rows, cols = grid.rows, grid.cols

    # Integer coordinates: circle (r,c) has center (2c, 2r), rows increase
    # downward; each cardinal point is shared with at most one neighbor.
    offsets = {EAST: (1, 0), NORTH: (0, -1), WEST: (-1, 0), SOUTH: (0, 1)}
    point_ids: dict[tuple[int, int], int] = {}
    touching: dict[int, list[int]] = {}
    waypoints = []
    for circle in range(grid.circles):
        r, c = grid.circle_rc(circle)
        ids = []
        for q in (EAST, NORTH, WEST, SOUTH):
            dx, dy = offsets[q]
            point = (2 * c + dx, 2 * r + dy)
            if point not in point_ids:
                point_ids[point] = len(point_ids)
                touching[point_ids[point]] = []
            vid = point_ids[point]
            touching[vid].append(circle)
            ids.append(vid)
        waypoints.append(tuple(ids))

    vertices = []
    for vid in range(len(point_ids)):
        circles = tuple(touching[vid])
        if len(circles) > 2:
            raise TopologyError(f"waypoint {vid} touches {len(circles)} circles")
        vertices.append(Vertex(vid, LINK if len(circles) == 2 else BOX, circles))

    arcs = []
    for circle in range(grid.circles):
        d = sched.direction[circle]
        for q in range(4):
            head_q = (q + d) % 4
            arcs.append(Arc(4 * circle + q, circle,
                            waypoints[circle][q], waypoints[circle][head_q]))

    cycles = []
    for circle in range(grid.circles):
        cycles.append(tuple(
            waypoints[circle][sched.quarter_at(circle, t)] for t in range(4)
        ))

    wg = WalkingGraph(tuple(vertices), tuple(arcs), tuple(waypoints), tuple(cycles))
    expected_vertices = 2 * rows * cols + rows + cols
    if wg.vertex_count != expected_vertices or wg.arc_count != 4 * rows * cols:
        raise TopologyError(
            f"walking graph of {grid} has {wg.vertex_count} vertices / "
            f"{wg.arc_count} arcs, expected {expected_vertices} / {4 * rows * cols}"
        )
    return wg


def position_of(circle: int, tick: int, sched: Schedule, wg: WalkingGraph) -> int:
    """Vertex occupied by the circle's synchronized robot at a tick (period 4)."""
    return wg.cycles[circle][tick % 4]


def link_partner(vertex: int, circle: int, wg: WalkingGraph) -> int | None:
    """The other circle at a link vertex; None at a box vertex."""
    v = wg.vertices[vertex]
    if circle not in v.circles:
        raise TopologyError(f"vertex {vertex} does not touch circle {circle}")
    if v.kind == BOX:
        return None
    a, b = v.circles
    return b if circle == a else a


@dataclass(frozen=True)
class Topology:
    """Immutable bundle of grid, schedule, walking graph and step tables.

    The tables are indexed ``[circle][tick % 4]``: ``position`` gives the
    occupied vertex, ``entry_arc`` the arc traversed while entering that
    tick, and ``link_exit`` the neighboring circle reachable by shifting
    at that tick's vertex (-1 when the vertex is not a link).
    """

    grid: GridSpec
    schedule: Schedule
    graph: WalkingGraph
    position: tuple[tuple[int, ...], ...]
    entry_arc: tuple[tuple[int, ...], ...]
    link_exit: tuple[tuple[int, ...], ...]


def topology_from_parts(grid: GridSpec, sched: Schedule, wg: WalkingGraph) -> Topology:
    """Derive the per-tick lookup tables for an existing schedule and graph."""
    position = wg.cycles
    entry_arc = []
    link_exit = []
    for circle in range(grid.circles):
        arcs = []
        exits = []
        for t in range(4):
            tail_q = sched.quarter_at(circle, t - 1)
            arcs.append(4 * circle + tail_q)
            partner = link_partner(position[circle][t], circle, wg)
            exits.append(-1 if partner is None else partner)
        entry_arc.append(tuple(arcs))
        link_exit.append(tuple(exits))
    return Topology(grid, sched, wg, position, tuple(entry_arc), tuple(link_exit))


def build_topology(grid: GridSpec) -> Topology:
    """Build the schedule, walking graph and per-tick lookup tables."""
    sched = build_schedule(grid)
    wg = build_walking_graph(grid, sched)
    return topology_from_parts(grid, sched, wg)


@lru_cache(maxsize=32)
def cached_topology(rows: int, cols: int) -> Topology:
    """Memoized topologies; safe to share, construction is deterministic."""
    return build_topology(GridSpec(rows, cols))
