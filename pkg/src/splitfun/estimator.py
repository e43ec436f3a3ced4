"""The sample-split Taylor estimator and its truncated variant.

Given block estimates theta0 (anchor) and theta_hat_j^(k) (level-k blocks),

    T_f = sum_{k=0}^m  (1/k!) f^(k)(theta0)[theta_1^(k)-theta0, ...,
                                            theta_k^(k)-theta0],

summed in ascending k with exact integer factorials.  Within a level the
blocks are disjoint, so the k-linear term is conditionally unbiased for
f^(k)(theta0)[theta-theta0, ...]; for polynomials of degree <= m the whole
estimator is exactly unbiased.  Truncation clamps the raw value to [-M, M],
which never increases the distance to any target inside the clamp window.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import UnsupportedOrderError
from .functionals import Functional, deriv_apply, evaluate, fd_deriv_apply, holder_bounds
from .models import ModelSpec, base_estimate
from .spaces import Point, check_same_space
from .splitting import SplitPlan

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaseEstimates:
    """Anchor and per-level block estimates, all in one parameter space."""

    theta0: Point
    levels: tuple[tuple[Point, ...], ...]

    def __post_init__(self):
        for k, pts in enumerate(self.levels, start=1):
            if len(pts) != k:
                raise ValueError(f"level {k} must hold exactly {k} estimates")
            for p in pts:
                check_same_space(p.space, self.theta0.space)

    @property
    def m(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class EstimateBreakdown:
    """One estimate with its per-order terms and truncation bookkeeping.

    ``raw`` is the exact fixed-order floating sum of ``order_terms``;
    ``value`` equals ``raw`` clamped to [-trunc_level, trunc_level] when a
    level is set, and ``clipped`` records whether clamping changed it.
    """

    order_terms: tuple[float, ...]
    raw: float
    m: int
    trunc_level: float | None
    value: float
    clipped: bool


def truncate(x: float, level: float) -> float:
    """Clamp x to [-level, level]."""
    if not level >= 0.0:
        raise ValueError("truncation level must be nonnegative")
    if x > level:
        return float(level)
    if x < -level:
        return float(-level)
    return float(x)


def taylor_estimate(f: Functional, base: BaseEstimates, *,
                    fd_fallback: bool = True) -> EstimateBreakdown:
    """Evaluate the order-m expansion from precomputed block estimates."""
    theta0 = base.theta0
    check_same_space(theta0.space, f.space)
    terms = [evaluate(f, theta0)]
    analytic = f.max_analytic_order
    for k, pts in enumerate(base.levels, start=1):
        dirs = tuple(p - theta0 for p in pts)
        if analytic is None or k <= analytic:
            applied = deriv_apply(f, k, theta0, dirs)
        elif fd_fallback:
            applied = fd_deriv_apply(f, k, theta0, dirs)
        else:
            raise UnsupportedOrderError(
                f"order {k} exceeds the analytic order of {type(f).__name__} "
                "and the finite-difference fallback is disabled"
            )
        terms.append(applied / math.factorial(k))
    raw = 0.0
    for t in terms:  # fixed ascending-order summation
        raw += t
    return EstimateBreakdown(order_terms=tuple(terms), raw=raw, m=base.m,
                             trunc_level=None, value=raw, clipped=False)


def apply_truncation(bd: EstimateBreakdown, level: float | None) -> EstimateBreakdown:
    if level is None:
        return bd
    value = truncate(bd.raw, level)
    return EstimateBreakdown(order_terms=bd.order_terms, raw=bd.raw, m=bd.m,
                             trunc_level=float(level), value=value,
                             clipped=(value != bd.raw))


def plug_in(f: Functional, theta_hat: Point) -> float:
    """The naive estimate f(theta_hat)."""
    return evaluate(f, theta_hat)


# -- truncation rules ----------------------------------------------------------

@dataclass(frozen=True)
class TruncRule:
    kind: str  # "none" | "fixed" | "auto"
    level: float | None = None
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "fixed", "auto"):
            raise ValueError(f"unknown truncation rule {self.kind!r}")
        if self.kind == "fixed" and (self.level is None or not self.level >= 0.0):
            raise ValueError("fixed truncation needs a nonnegative level")
        if self.delta < 0.0:
            raise ValueError("auto truncation slack delta must be >= 0")


NO_TRUNC = TruncRule("none")


def fixed_trunc(level: float) -> TruncRule:
    return TruncRule("fixed", level=float(level))


def auto_trunc(delta: float = 0.0) -> TruncRule:
    return TruncRule("auto", delta=float(delta))


def resolve_trunc_level(f: Functional, rule: TruncRule) -> float | None:
    """Concrete clamp level for a functional, or None when truncation is off.

    The auto rule uses the declared sup norm, widened by declared_lip * delta
    when a Lipschitz declaration exists; with no declared sup it degrades to
    no truncation and logs a warning.
    """
    if rule.kind == "none":
        return None
    if rule.kind == "fixed":
        return rule.level
    bounds = holder_bounds(f)
    sup = bounds["sup_norm"]
    if sup is None:
        log.warning(
            "auto truncation requested but %s declares no sup norm; "
            "degrading to no truncation", type(f).__name__,
        )
        return None
    level = sup
    if rule.delta > 0.0 and bounds["grad_sup"] is not None:
        level = sup + bounds["grad_sup"] * rule.delta
    return float(level)


def estimate_from_sample(model: ModelSpec, f: Functional, dataset, plan: SplitPlan,
                         trunc_rule: TruncRule = NO_TRUNC, *,
                         fd_fallback: bool = True) -> EstimateBreakdown:
    """Assemble block estimates from a dataset under a split plan, then expand."""
    rows = dataset.rows if hasattr(dataset, "rows") else dataset
    if len(rows) != plan.n:
        raise ValueError(f"dataset has {len(rows)} rows but the plan expects {plan.n}")
    theta0 = base_estimate(model, rows[list(plan.j0)])
    levels = tuple(
        tuple(base_estimate(model, rows[list(block)]) for block in blocks)
        for blocks in plan.parts
    )
    bd = taylor_estimate(f, BaseEstimates(theta0, levels), fd_fallback=fd_fallback)
    return apply_truncation(bd, resolve_trunc_level(f, trunc_rule))
