"""Robust linear regression: conditional risk and deviation.

Fits (mu, beta) minimizing rho(-f(Y - mu - X beta)). Two admission
modes:

- strict: the score must be smooth with strictly increasing derivative,
  so the minimizer is unique and any coherent risk measure is allowed.
- relaxed: non-smooth scores (the pinball family) are admitted with the
  expected-loss measure only; the solution is one minimizer of a
  possibly flat optimum, reported together with its certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import convexnd, solver
from .errors import (
    DimensionError,
    DomainError,
    SingularDesignError,
    UnsupportedScoreError,
)
from .risk import CoherentRiskMeasure, evaluate_batch
from .scores import ScoreFunction
from .spaces import ScenarioVariable

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class RegressionFit:
    mu_star: float
    betas: np.ndarray
    objective: float
    cd: float
    foc_residual: float
    iterations: int

    def predict(self, design: np.ndarray) -> np.ndarray:
        design = np.atleast_2d(np.asarray(design, dtype=float))
        return self.mu_star + design @ self.betas


def _design_matrix(Y: ScenarioVariable, X: list[ScenarioVariable]) -> np.ndarray:
    if not X:
        raise DomainError("need at least one regressor")
    for xi in X:
        if xi.space != Y.space:
            raise DimensionError("regressors must live on the target's scenario space")
    return np.column_stack([xi.values for xi in X])


def _check_design(A: np.ndarray, p: np.ndarray) -> None:
    full = np.column_stack([np.ones(A.shape[0]), A])
    gram = full.T @ (p[:, None] * full)
    if np.linalg.cond(gram) > _COND_LIMIT:
        raise SingularDesignError(
            "design is collinear (intercept included); condition estimate above 1e12"
        )


def fit(rho: CoherentRiskMeasure, s: ScoreFunction, Y: ScenarioVariable,
        X: list[ScenarioVariable], tol: float = 1e-8) -> RegressionFit:
    if tol <= 0.0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    relaxed = not s.smooth_strictly_convex
    if relaxed and rho.kind != "el":
        raise UnsupportedScoreError(
            f"score {s.spec_string()!r} is not smooth with strictly increasing "
            "derivative; only the expected-loss measure admits it (relaxed mode)"
        )
    A = _design_matrix(Y, X)
    p = Y.space.p
    y = Y.values
    n = A.shape[1]
    _check_design(A, p)

    def F(theta: np.ndarray) -> float:
        resid = y - theta[0] - A @ theta[1:]
        return float(evaluate_batch(rho, -s.f(resid)[None, :], p)[0])

    y_range = float(np.ptp(y)) + 1.0
    col_ranges = np.ptp(A, axis=0) + 1.0
    steps = np.concatenate([[y_range], y_range / col_ranges])

    mu0 = -solver.solve(rho, s, Y, tol).r_value
    theta0 = np.concatenate([[mu0], np.zeros(n)])

    if relaxed and s.kind in ("pinball", "cost", "absolute"):
        theta0 = _linear_program_phase(s, y, A, p)

    result = convexnd.minimize_convex(F, theta0, steps, tol)
    betas = result.x[1:].copy()
    # pin mu at the leftmost minimizer of the residual problem so the
    # identity mu* = -R(Y - X beta*) holds even on flat optima
    residual = ScenarioVariable(Y.space, y - A @ betas)
    mu_star = solver.solve(rho, s, residual, tol).argmin_lo
    betas.setflags(write=False)
    theta_star = np.concatenate([[mu_star], betas])
    objective = min(result.value, F(theta_star))

    base = solver.solve(rho, s, Y, tol).d_value
    if objective <= max(1e-12, 1e-9 * abs(base)):
        cd = 1.0
    elif base <= 0.0:
        cd = float("nan")
    else:
        cd = 1.0 - objective / base

    return RegressionFit(
        mu_star=mu_star,
        betas=betas,
        objective=objective,
        cd=cd,
        foc_residual=result.foc_residual,
        iterations=result.sweeps,
    )


def _linear_program_phase(s: ScoreFunction, y: np.ndarray, A: np.ndarray,
                          p: np.ndarray) -> np.ndarray:
    """Exact solve of the piecewise-linear expected-loss fit.

    With residual split r = u - v (u, v >= 0) the pinball objective
    E[a u + (1-a) v] is linear, so the fit is a linear program; solved by
    HiGHS. Coordinate descent alone can stall on the kink ridges of this
    objective, hence the exact phase before the certificate polish.
    """
    from scipy.optimize import linprog

    m, n = A.shape
    wpos, wneg = (1.0, 1.0) if s.kind == "absolute" else (s.param, 1.0 - s.param)
    # variables: mu, beta (free), u, v (>= 0)
    c = np.concatenate([np.zeros(1 + n), wpos * p, wneg * p])
    A_eq = np.hstack([np.ones((m, 1)), A, np.eye(m), -np.eye(m)])
    bounds = [(None, None)] * (1 + n) + [(0.0, None)] * (2 * m)
    res = linprog(c, A_eq=A_eq, b_eq=y, bounds=bounds, method="highs")
    if not res.success:
        raise DomainError(f"piecewise-linear fit LP failed: {res.message}")
    return res.x[: 1 + n].copy()


def conditional_risk_row(fit_result: RegressionFit, x_row) -> float:
    """Pointwise conditional risk -(mu* + beta* . x) at one regressor row."""
    x_row = np.asarray(x_row, dtype=float)
    if x_row.shape != fit_result.betas.shape:
        raise DimensionError(
            f"row has {x_row.size} entries, fit has {fit_result.betas.size} betas"
        )
    return float(-(fit_result.mu_star + np.dot(fit_result.betas, x_row)))


def conditional_risk(fit_result: RegressionFit, X: list[ScenarioVariable]) -> np.ndarray:
    """Conditional risk across all outcomes: -(mu* + X beta*)."""
    A = np.column_stack([xi.values for xi in X])
    return -(fit_result.mu_star + A @ fit_result.betas)


def cd_metric(rho: CoherentRiskMeasure, s: ScoreFunction, Y: ScenarioVariable,
              X: list[ScenarioVariable], fit_result: RegressionFit,
              tol: float = 1e-8) -> float:
    """1 - conditional deviation / unconditional deviation, an R^2 analog."""
    base = solver.solve(rho, s, Y, tol).d_value
    if base <= 0.0:
        raise DomainError("unconditional deviation is zero: target is constant")
    return 1.0 - fit_result.objective / base
