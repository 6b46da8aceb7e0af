"""Exception types shared across the package."""


class GridPatrolError(Exception):
    """Base class for all package errors."""


class ConfigError(GridPatrolError, ValueError):
    """Invalid user-supplied configuration (grid, strategy, plan, CLI args)."""


class TopologyError(ConfigError):
    """A grid, schedule or walking-graph constraint is violated."""


class SimulationError(GridPatrolError):
    """A simulation precondition or invariant failed at runtime."""


class MetricsError(GridPatrolError):
    """Metric reduction called with unusable inputs."""


class MotionGraphError(GridPatrolError):
    """Motion-graph construction violated a structural invariant."""


class MixingConvergenceError(GridPatrolError):
    """Matrix powers did not get within epsilon of uniform before t_max."""


class ExperimentsError(GridPatrolError):
    """Experiment harness failure (missing cells, bad plan, cell crash)."""
