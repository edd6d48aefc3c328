"""Coherent risk measures on finite scenario spaces.

Five kinds: expected loss (el), expected shortfall (es), expectile value
at risk (evar), mean plus semi-deviation (msd), and maximum loss (ml).
Each evaluates exactly on the finite space; el/es/ml additionally expose a
worst-case reweighting attaining the dual representation
rho(Z) = max_q E_q[-Z].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, DomainError, ValidationError
from .spaces import MeasureWeights, ScenarioVariable

_SPEC_HELP = "el | es:<alpha> | evar:<alpha> | msd:<beta> | ml"

_EVAR_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class CoherentRiskMeasure:
    kind: str
    param: float | None

    @staticmethod
    def el() -> "CoherentRiskMeasure":
        return CoherentRiskMeasure("el", None)

    @staticmethod
    def es(alpha: float) -> "CoherentRiskMeasure":
        if not (0.0 < alpha < 1.0):
            raise DomainError(f"es alpha must be in (0,1), got {alpha!r}")
        return CoherentRiskMeasure("es", float(alpha))

    @staticmethod
    def evar(alpha: float) -> "CoherentRiskMeasure":
        # coherence requires alpha <= 0.5
        if not (0.0 < alpha <= 0.5):
            raise DomainError(f"evar alpha must be in (0,0.5], got {alpha!r}")
        return CoherentRiskMeasure("evar", float(alpha))

    @staticmethod
    def msd(beta: float) -> "CoherentRiskMeasure":
        if not (0.0 <= beta <= 1.0):
            raise DomainError(f"msd beta must be in [0,1], got {beta!r}")
        return CoherentRiskMeasure("msd", float(beta))

    @staticmethod
    def ml() -> "CoherentRiskMeasure":
        return CoherentRiskMeasure("ml", None)

    @staticmethod
    def parse(text: str) -> "CoherentRiskMeasure":
        parts = text.strip().lower().split(":")
        kind = parts[0]
        makers = {
            "el": CoherentRiskMeasure.el,
            "es": CoherentRiskMeasure.es,
            "evar": CoherentRiskMeasure.evar,
            "msd": CoherentRiskMeasure.msd,
            "ml": CoherentRiskMeasure.ml,
        }
        if kind not in makers:
            raise ValidationError(f"unknown risk measure {text!r}; expected {_SPEC_HELP}")
        takes_param = kind in ("es", "evar", "msd")
        if takes_param:
            if len(parts) != 2:
                raise ValidationError(f"risk {kind!r} needs one parameter: {_SPEC_HELP}")
            try:
                param = float(parts[1])
            except ValueError:
                raise ValidationError(f"bad risk parameter in {text!r}") from None
            return makers[kind](param)
        if len(parts) != 1:
            raise ValidationError(f"risk {kind!r} takes no parameter")
        return makers[kind]()

    def spec_string(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}:{self.param:g}"

    @property
    def has_dual_maximizer(self) -> bool:
        return self.kind in ("el", "es", "ml")


def _es_tail_weights(Z: ScenarioVariable, alpha: float) -> np.ndarray:
    """Probability mass per outcome clipped to the lower alpha-tail.

    Sorts by (value, index) for a deterministic fractional boundary atom;
    the returned masses sum to alpha.
    """
    values = Z.values
    p = Z.space.p
    order = np.lexsort((np.arange(values.size), values))
    w = np.zeros_like(p)
    remaining = alpha
    for i in order:
        if remaining <= 0.0:
            break
        take = min(p[i], remaining)
        w[i] = take
        remaining -= take
    return w


def evaluate(rho: CoherentRiskMeasure, Z: ScenarioVariable) -> float:
    p = Z.space.p
    z = Z.values
    kind, a = rho.kind, rho.param
    if kind == "el":
        return float(-np.dot(p, z))
    if kind == "es":
        w = _es_tail_weights(Z, a)
        return float(-np.dot(w, z) / a)
    if kind == "evar":
        return -_expectile_root(z, p, a)
    if kind == "msd":
        mean = float(np.dot(p, z))
        semi = float(np.sqrt(np.dot(p, np.maximum(mean - z, 0.0) ** 2)))
        return -mean + a * semi
    if kind == "ml":
        return float(-z.min())
    raise AssertionError(f"unreachable kind {kind!r}")


def _expectile_root(z: np.ndarray, p: np.ndarray, alpha: float) -> float:
    """Unique root of g(x) = alpha E[(Z-x)+] - (1-alpha) E[(x-Z)+].

    g is continuous, strictly decreasing, and piecewise linear with a
    sign change inside [min Z, max Z]; bisection brackets the root, then
    the linear piece containing it is solved in closed form so the result
    is exact to roundoff (downstream difference quotients divide by tiny
    steps and would amplify any fixed root tolerance).
    """

    def g(x: float) -> float:
        return alpha * float(np.dot(p, np.maximum(z - x, 0.0))) - (
            1.0 - alpha
        ) * float(np.dot(p, np.maximum(x - z, 0.0)))

    lo, hi = float(z.min()), float(z.max())
    if lo == hi:
        return lo
    for _ in range(200):
        if hi - lo <= _EVAR_BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    above = z > x
    below = z < x
    num = alpha * float(np.dot(p[above], z[above])) + (1.0 - alpha) * float(
        np.dot(p[below], z[below])
    )
    den = alpha * float(p[above].sum()) + (1.0 - alpha) * float(p[below].sum())
    return num / den if den > 0.0 else x


def evaluate_batch(rho: CoherentRiskMeasure, Z: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Evaluate rho row-wise on a (m, n) matrix of scenario payoffs.

    Row k is treated as one ScenarioVariable on the space with
    probabilities p. Matches `evaluate` up to the same tolerances; used by
    the grid oracle where per-row construction would dominate runtime.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    kind, a = rho.kind, rho.param
    if kind == "el":
        return -(Z @ p)
    if kind == "ml":
        return -Z.min(axis=1)
    if kind == "msd":
        mean = Z @ p
        semi = np.sqrt(np.maximum(mean[:, None] - Z, 0.0) ** 2 @ p)
        return -mean + a * semi
    if kind == "es":
        idx = np.argsort(Z, axis=1, kind="stable")
        Zs = np.take_along_axis(Z, idx, axis=1)
        ps = p[idx]
        before = np.cumsum(ps, axis=1) - ps
        w = np.clip(a - before, 0.0, ps)
        return -(w * Zs).sum(axis=1) / a
    if kind == "evar":
        lo = Z.min(axis=1)
        hi = Z.max(axis=1)
        for _ in range(120):
            if float((hi - lo).max()) <= _EVAR_BISECT_TOL:
                break
            mid = 0.5 * (lo + hi)
            gmid = a * (np.maximum(Z - mid[:, None], 0.0) @ p) - (1.0 - a) * (
                np.maximum(mid[:, None] - Z, 0.0) @ p
            )
            take = gmid > 0.0
            lo = np.where(take, mid, lo)
            hi = np.where(take, hi, mid)
        # solve the bracketed linear piece exactly, as in _expectile_root
        mid = 0.5 * (lo + hi)
        above = Z > mid[:, None]
        below = Z < mid[:, None]
        num = a * (np.where(above, Z, 0.0) @ p) + (1.0 - a) * (
            np.where(below, Z, 0.0) @ p
        )
        den = a * (above @ p) + (1.0 - a) * (below @ p)
        return -np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), mid)
    raise AssertionError(f"unreachable kind {kind!r}")


def payoff_gradient(rho: CoherentRiskMeasure, z: np.ndarray, p: np.ndarray) -> np.ndarray:
    """A subgradient of Z -> rho(Z) at the payoff vector z.

    Entries sum to -1 (translation invariance); for el/es/ml this is the
    negated worst-case reweighting. Used for exact first-order sign tests
    where difference quotients would lose precision to cancellation.
    """
    kind, a = rho.kind, rho.param
    if kind == "el":
        return -p
    if kind == "ml":
        grad = np.zeros_like(p)
        grad[int(np.argmin(z))] = -1.0
        return grad
    if kind == "es":
        order = np.lexsort((np.arange(z.size), z))
        before = np.concatenate([[0.0], np.cumsum(p[order])[:-1]])
        w = np.zeros_like(p)
        w[order] = np.clip(a - before, 0.0, p[order])
        return -w / a
    if kind == "msd":
        mean = float(np.dot(p, z))
        u = np.maximum(mean - z, 0.0)
        s = float(np.sqrt(np.dot(p, u * u)))
        if s == 0.0:
            return -p
        return -p + a * p * (float(np.dot(p, u)) - u) / s
    if kind == "evar":
        e = _expectile_root(z, p, a)
        weight = np.where(z > e, a, 0.0) + np.where(z < e, 1.0 - a, 0.0)
        denom = float(np.dot(p, weight))
        if denom == 0.0:
            return -p
        return -p * weight / denom
    raise AssertionError(f"unreachable kind {kind!r}")


def dual_maximizer(rho: CoherentRiskMeasure, Z: ScenarioVariable) -> MeasureWeights:
    """A reweighting q in the dual set with E_q[-Z] = evaluate(rho, Z).

    Supported for el (q = p), es (lower-tail density 1/alpha with a
    fractional boundary atom), and ml (point mass on the lowest-index
    minimum). evar and msd do not expose a tractable maximizer here.
    """
    if not rho.has_dual_maximizer:
        raise CapabilityError(f"dual_maximizer is unsupported for {rho.spec_string()!r}")
    kind = rho.kind
    if kind == "el":
        return MeasureWeights(Z.space.p)
    if kind == "es":
        w = _es_tail_weights(Z, rho.param)
        return MeasureWeights(w / rho.param)
    q = np.zeros(Z.values.size)
    q[int(np.argmin(Z.values))] = 1.0
    return MeasureWeights(q)
