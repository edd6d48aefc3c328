"""Derivative-free minimization of convex functions on R^d.

Cyclic exact coordinate minimization with a Powell-style acceleration
line search along each sweep's net displacement. Each line problem is
convex and solved by the difference-quotient bisection from `convex1d`,
so flat valleys (piecewise-linear objectives) are handled without
gradient information.

Optimality is certified coordinate-wise: at the returned point the
one-sided difference quotients along every coordinate must bracket zero;
the residual reports the largest violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import convex1d


@dataclass(frozen=True)
class MinimizeResult:
    x: np.ndarray
    value: float
    foc_residual: float
    sweeps: int


def _line_bracket(f1: Callable[[float], float], step: float) -> tuple[float, float]:
    """Expand from 0 until a minimizer of convex f1 lies inside [lo, hi]."""
    f0 = f1(0.0)
    if f1(step) < f0:
        t_prev, t = 0.0, step
        ft = f1(t)
        while True:
            t_next = 2.0 * t
            fn = f1(t_next)
            if fn >= ft or t_next > 1e12:
                return t_prev, t_next
            t_prev, t, ft = t, t_next, fn
    if f1(-step) < f0:
        t_prev, t = 0.0, -step
        ft = f1(t)
        while True:
            t_next = 2.0 * t
            fn = f1(t_next)
            if fn >= ft or t_next < -1e12:
                return t_next, t_prev
            t_prev, t, ft = t, t_next, fn
    return -step, step


def line_minimize(f1: Callable[[float], float], step: float, tol: float) -> float:
    """Midpoint of the minimizer interval of convex f1 over the real line."""
    lo, hi = _line_bracket(f1, step)
    h = max(tol, 1e-9 * (hi - lo))
    a, b = convex1d.minimizer_interval(f1, lo, hi, tol, h)
    return 0.5 * (a + b)


def coordinate_certificate(
    F: Callable[[np.ndarray], float], x: np.ndarray, h: float
) -> float:
    """Largest coordinate-wise violation of dminus <= 0 <= dplus at x."""
    fx = F(x)
    worst = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        dplus = (F(x + e) - fx) / h
        dminus = (fx - F(x - e)) / h
        worst = max(worst, dminus, -dplus)
    return worst


def minimize_convex(
    F: Callable[[np.ndarray], float],
    x0: Sequence[float],
    steps: Sequence[float],
    tol: float = 1e-8,
    max_sweeps: int = 400,
) -> MinimizeResult:
    x = np.asarray(x0, dtype=float).copy()
    steps = np.asarray(steps, dtype=float)
    d = x.size

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        x_start = x.copy()
        for i in range(d):
            e = np.zeros(d)
            e[i] = 1.0
            t = line_minimize(lambda t: F(x + t * e), float(steps[i]), tol)
            x = x + t * e
        delta = x - x_start
        dn = float(np.max(np.abs(delta)))
        if dn > 0.0:
            u = delta / dn
            t = line_minimize(lambda t: F(x + t * u), max(dn, tol), tol)
            x = x + t * u
        moved = float(np.max(np.abs(x - x_start)))
        if moved <= 0.5 * tol:
            break

    h = max(tol, 1e-9 * float(np.max(steps)))
    residual = coordinate_certificate(F, x, h)
    return MinimizeResult(x=x, value=F(x), foc_residual=residual, sweeps=sweeps)
