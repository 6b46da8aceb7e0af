"""Randomized patrolling on synchronized grids of circular trajectories."""

__version__ = "0.1.0"

from .bounds import (
    broadcast_regular_bound,
    expected_visit_window,
    idle_bound,
    isolation_bound,
)
from .errors import (
    ConfigError,
    ExperimentsError,
    GridPatrolError,
    MetricsError,
    MixingConvergenceError,
    MotionGraphError,
    SimulationError,
    TopologyError,
)
from .metrics import (
    BroadcastSummary,
    IdleSummary,
    IsolationSummary,
    broadcast_stats,
    idle_stats,
    isolation_stats,
)
from .motion_graph import (
    MotionGraph,
    StationaryReport,
    build_motion_graph,
    mixing_time,
    motion_graph_for,
    spectral_norm,
    stationary_check,
)
from .simulator import (
    DETERMINISTIC,
    MEETINGS_ALL,
    MEETINGS_LINK_ONLY,
    QUASI_RANDOM,
    RANDOM,
    EventLog,
    SimConfig,
    SimState,
    Strategy,
    place_robots,
    run,
    run_broadcast,
    step,
)
from .topology import (
    BOX,
    CCW,
    CW,
    LINK,
    GridSpec,
    Schedule,
    Topology,
    WalkingGraph,
    build_schedule,
    build_topology,
    build_walking_graph,
    cached_topology,
    link_partner,
    meeting_ticks,
    position_of,
    reverse_schedule,
    topology_from_parts,
    validate_schedule,
)
