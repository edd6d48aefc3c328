"""One-dimensional convex minimization by difference-quotient bisection.

Locates the leftmost minimizer of a convex function as the sign change of
the forward difference quotient, and the rightmost symmetrically with
backward differences. Unlike golden-section search, this pins down the
*endpoints* of a flat valley, which piecewise-linear objectives produce
routinely.
"""

from __future__ import annotations

from typing import Callable

from .errors import DomainError

_MAX_BISECT = 200


def _sign_slack(gval: float, h: float) -> float:
    # evaluation roundoff (a few ulp of g) divided by the step bounds the
    # quotient noise; without the h term an exactly flat valley flips the
    # quotient sign by +-ulp/h and bisection lands at arbitrary interior
    # points
    return (1e-12 + 32.0 * 2.220446049250313e-16 / h) * (1.0 + abs(gval))


def leftmost_minimizer(
    g: Callable[[float], float], a: float, b: float, tol: float, h: float
) -> float:
    """inf{y in [a,b] : forward difference quotient of g at y >= 0}."""
    if tol <= 0.0:
        raise DomainError(f"tol must be > 0, got {tol!r}")

    def nondecreasing_at(y: float) -> bool:
        gy = g(y)
        return (g(y + h) - gy) / h >= -_sign_slack(gy, h)

    if nondecreasing_at(a):
        return a
    if not nondecreasing_at(b):
        # still descending at b: the constrained minimizer is the endpoint
        return b
    lo, hi = a, b
    for _ in range(_MAX_BISECT):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if nondecreasing_at(mid):
            hi = mid
        else:
            lo = mid
    return hi


def rightmost_minimizer(
    g: Callable[[float], float], a: float, b: float, tol: float, h: float
) -> float:
    """sup{y in [a,b] : backward difference quotient of g at y <= 0}."""
    if tol <= 0.0:
        raise DomainError(f"tol must be > 0, got {tol!r}")

    def nonincreasing_at(y: float) -> bool:
        gy = g(y)
        return (gy - g(y - h)) / h <= _sign_slack(gy, h)

    if nonincreasing_at(b):
        return b
    if not nonincreasing_at(a):
        # already ascending at a: the constrained minimizer is the endpoint
        return a
    lo, hi = a, b
    for _ in range(_MAX_BISECT):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if nonincreasing_at(mid):
            lo = mid
        else:
            hi = mid
    return lo


def minimizer_interval(
    g: Callable[[float], float], a: float, b: float, tol: float, h: float
) -> tuple[float, float]:
    lo = leftmost_minimizer(g, a, b, tol, h)
    hi = rightmost_minimizer(g, a, b, tol, h)
    if lo > hi:
        # near a smooth minimum the quotients are dominated by floating
        # point cancellation (~eps*|g|/h) and the endpoints can cross by
        # far more than tol without any convexity violation; collapse to
        # the midpoint, which stays within the noise of the minimizer set
        lo = hi = 0.5 * (lo + hi)
    return lo, hi


def min_value(g: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Minimum value of convex g on [a,b] by ternary shrinking.

    The bracket converges to a (possibly flat) minimizer set; the value
    converges regardless of flatness.
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    lo, hi = a, b
    for _ in range(_MAX_BISECT):
        if hi - lo <= tol:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if g(m1) < g(m2):
            hi = m2
        else:
            lo = m1
    return min(g(lo), g(0.5 * (lo + hi)), g(hi))
