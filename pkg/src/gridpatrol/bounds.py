"""Closed-form expected idle/isolation/broadcast quantities for overlays.

All functions are pure and stateless.  ``n`` is the number of circles,
``k`` the number of robots, ``delta`` the degree used by the
regular-graph broadcast asymptotic (16 fits the almost-regular motion
graph of a large grid; boundary circles have lower degree).
"""

from __future__ import annotations

import math

from .errors import ConfigError

__all__ = [
    "idle_bound",
    "expected_visit_window",
    "isolation_bound",
    "broadcast_regular_bound",
]


def _check_nk(n: int, k: int, min_k: int = 1) -> None:
    if n < 1:
        raise ConfigError(f"n must be at least 1, got {n}")
    if k < min_k:
        raise ConfigError(f"k must be at least {min_k}, got {k}")


def idle_bound(n: int, k: int) -> float:
    """Upper bound n/k + 1 on the expected time between visits to a point."""
    _check_nk(n, k)
    return n / k + 1.0


def expected_visit_window(n: int, k: int) -> int:
    """Step window ceil(n/k) over which any fixed vertex expects >= 1 visit."""
    _check_nk(n, k)
    return -(-n // k)


def isolation_bound(n: int, k: int) -> int:
    """Upper bound ceil(1 / (1 - (1 - 1/n)^(k-1))) on steps between meetings.

    Algebraically identical to the integer ratio
    ceil(n^(k-1) / (n^(k-1) - (n-1)^(k-1))) but evaluated in floating
    point via expm1/log1p so huge powers never materialize.  The ratio
    is an exact integer only when n == 1 or k == 2; those cases are
    answered directly so float rounding cannot shift the ceiling.
    """
    _check_nk(n, k, min_k=2)
    if n == 1:
        return 1
    if k == 2:
        return n
    shortfall = -math.expm1((k - 1) * math.log1p(-1.0 / n))
    return math.ceil(1.0 / shortfall)


def broadcast_regular_bound(n: int, k: int, delta: float = 16.0) -> float:
    """Asymptotic expected broadcast time 2 ln(k) (delta-1) n / (k (delta-2))."""
    _check_nk(n, k, min_k=2)
    if delta <= 2:
        raise ConfigError(f"delta must exceed 2, got {delta}")
    return 2.0 * math.log(k) * (delta - 1.0) * n / (k * (delta - 2.0))
