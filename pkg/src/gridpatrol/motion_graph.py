"""Discrete motion graph, transition matrix and mixing-time analysis.

One step of the motion graph is one time unit (four ticks).  From each
circle's synchronized position, every binary stay/shift choice sequence
over the next four ticks (branching only on arrival at a link) lands on
some circle's synchronized position.  Distinct choice sequences land on
distinct circles, so the transition probability from i to j under fair
coin flips is (1/2)^c_ij, where c_ij counts the links crossed on the
unique one-unit path; that is verified, not assumed, during the build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MixingConvergenceError, MotionGraphError
from .topology import GridSpec, Schedule, Topology, WalkingGraph, topology_from_parts

__all__ = [
    "MotionGraph",
    "StationaryReport",
    "build_motion_graph",
    "motion_graph_for",
    "stationary_check",
    "spectral_norm",
    "mixing_time",
]


@dataclass(frozen=True)
class MotionGraph:
    """Digraph over circles with per-arc link-crossing counts c_ij."""

    n: int
    link_counts: dict[tuple[int, int], int]

    def out_degree(self, i: int) -> int:
        return sum(1 for (a, _) in self.link_counts if a == i)

    def has_all_self_loops(self) -> bool:
        return all((i, i) in self.link_counts for i in range(self.n))


def _enumerate_unit_paths(topo: Topology, start: int) -> list[tuple[int, int]]:
    """All (landing circle, links crossed) leaves of the 4-tick decision tree."""
    link_exit = topo.link_exit
    leaves = []
    stack = [(start, 0, 0)]
    while stack:
        circle, tick, crossed = stack.pop()
        if tick == 4:
            leaves.append((circle, crossed))
            continue
        t = tick + 1
        other = link_exit[circle][t % 4]
        if other >= 0:
            stack.append((circle, t, crossed + 1))
            stack.append((other, t, crossed + 1))
        else:
            stack.append((circle, t, crossed))
    return leaves


def _aggregate_leaves(start: int, leaves: list[tuple[int, int]]) -> dict[int, int]:
    """Map landing circle -> link count, enforcing uniqueness and exact mass.

    Leaf probabilities are dyadic ((1/2)^crossed with crossed <= 4), so the
    total-mass check is done in integer sixteenths and is exact.
    """
    landed: dict[int, int] = {}
    sixteenths = 0
    for circle, crossed in leaves:
        if circle in landed:
            raise MotionGraphError(
                f"two distinct shift sequences from circle {start} land on circle {circle}"
            )
        landed[circle] = crossed
        sixteenths += 1 << (4 - crossed)
    if sixteenths != 16:
        raise MotionGraphError(
            f"leaf probabilities from circle {start} sum to {sixteenths}/16, not 1"
        )
    return landed


def build_motion_graph(
    grid: GridSpec, sched: Schedule, wg: WalkingGraph
) -> tuple[MotionGraph, np.ndarray]:
    """Motion graph and transition matrix M with M_ij = (1/2)^c_ij.

    Raises MotionGraphError if two distinct decision sequences from one
    circle land on the same circle, or leaf probabilities do not sum to 1.
    """
    return _build_from_topology(topology_from_parts(grid, sched, wg))


def _build_from_topology(topo: Topology) -> tuple[MotionGraph, np.ndarray]:
    n = topo.grid.circles
    counts: dict[tuple[int, int], int] = {}
    matrix = np.zeros((n, n))
    for i in range(n):
        landed = _aggregate_leaves(i, _enumerate_unit_paths(topo, i))
        for j, crossed in landed.items():
            counts[(i, j)] = crossed
            matrix[i, j] = 0.5 ** crossed
    return MotionGraph(n, counts), matrix


def motion_graph_for(topo: Topology) -> tuple[MotionGraph, np.ndarray]:
    """Build directly from a prebuilt topology bundle."""
    return _build_from_topology(topo)


def is_strongly_connected(n: int, edges) -> bool:
    """BFS from vertex 0 in both orientations."""
    if n == 0:
        return False
    fwd: list[list[int]] = [[] for _ in range(n)]
    rev: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        fwd[i].append(j)
        rev[j].append(i)

    def reaches_all(adj):
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return len(seen) == n

    return reaches_all(fwd) and reaches_all(rev)


@dataclass(frozen=True)
class StationaryReport:
    """Checks that the uniform distribution is stationary for M."""

    n: int
    row_sum_error: float
    col_sum_error: float
    uniform_residual: float
    entries_in_range: bool
    irreducible: bool
    aperiodic: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.row_sum_error < self.tolerance
            and self.col_sum_error < self.tolerance
            and self.uniform_residual < self.tolerance
            and self.entries_in_range
            and self.irreducible
            and self.aperiodic
        )


def stationary_check(matrix: np.ndarray, tolerance: float = 1e-12) -> StationaryReport:
    """Verify double stochasticity, uniform stationarity, irreducibility, aperiodicity."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise MotionGraphError(f"transition matrix must be square, got {m.shape}")
    uniform = np.full(n, 1.0 / n)
    edges = zip(*np.nonzero(m > 0))
    return StationaryReport(
        n=n,
        row_sum_error=float(np.abs(m.sum(axis=1) - 1.0).max()),
        col_sum_error=float(np.abs(m.sum(axis=0) - 1.0).max()),
        uniform_residual=float(np.abs(uniform @ m - uniform).max()),
        entries_in_range=bool(((m >= 0.0) & (m <= 1.0)).all()),
        irreducible=is_strongly_connected(n, edges),
        aperiodic=bool((np.diag(m) > 0).all()),
        tolerance=tolerance,
    )


def spectral_norm(
    matrix: np.ndarray,
    rel_tol: float = 1e-6,
    max_iter: int = 10_000,
    seed: int = 0,
) -> float:
    """Largest singular value via power iteration on A^T A.

    Only matrix-vector products are used, so the cost per iteration is
    O(n^2).  The start vector comes from a fixed seed for reproducibility.
    """
    a = np.asarray(matrix, dtype=float)
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(a.shape[1])
    norm = np.linalg.norm(y)
    if norm == 0.0:
        y[0] = 1.0
        norm = 1.0
    y /= norm
    lam = 0.0
    for _ in range(max_iter):
        z = a.T @ (a @ y)
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            return 0.0
        y = z / nz
        if abs(nz - lam) <= rel_tol * nz:
            lam = nz
            break
        lam = nz
    return math.sqrt(lam)


MIXING_NORMS = ("fro", "spectral")


def mixing_time(
    matrix: np.ndarray,
    epsilon: float = 0.25,
    t_max: int = 10_000,
    norm: str = "fro",
) -> int:
    """Smallest t with ||M^t - U|| < epsilon, U the all-1/n matrix.

    Powers are computed by iterated multiplication since every
    intermediate power must be tested anyway.  The reference mixing
    values for grid systems (e.g. 5, 18, 40, 71, 159 for 5x5 through
    30x30 at epsilon = 1/4) correspond to the Frobenius norm, the
    default here; ``norm="spectral"`` switches to the largest singular
    value, computed by power iteration, which bounds the worst-case
    distribution error and yields somewhat smaller times.
    """
    if epsilon <= 0:
        raise MotionGraphError("epsilon must be positive")
    if t_max < 1:
        raise MotionGraphError("t_max must be at least 1")
    if norm not in MIXING_NORMS:
        raise MotionGraphError(f"norm must be one of {MIXING_NORMS}, got {norm!r}")
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    uniform = np.full((n, n), 1.0 / n)
    measure = spectral_norm if norm == "spectral" else np.linalg.norm
    power = m.copy()
    for t in range(1, t_max + 1):
        if measure(power - uniform) < epsilon:
            return t
        power = power @ m
    raise MixingConvergenceError(
        f"no t <= {t_max} with ||M^t - U|| < {epsilon} (n={n}, norm={norm})"
    )
