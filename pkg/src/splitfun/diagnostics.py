"""Monte Carlo diagnostics: moment growth, distances, tails, and rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._rng import stream
from .errors import DomainError, UnsupportedModelError
from .expfam import sigma_theta_dense
from .functionals import Functional, deriv_apply
from .models import ExpFamModel, GaussianLocation, ModelSpec, base_estimate, sample, true_functional_target
from .spaces import DualElement, Point, SpaceDescriptor, dual_norm, norm, unpack_sym


# -- direction sets -------------------------------------------------------------

@dataclass(frozen=True)
class DirectionSet:
    """Dual directions, each normalized to dual norm 1."""

    directions: tuple[DualElement, ...]

    def __len__(self):
        return len(self.directions)

    def __iter__(self):
        return iter(self.directions)


def build_direction_set(space: SpaceDescriptor, n_random: int = 64,
                        seed: int = 0) -> DirectionSet:
    """Canonical coordinate directions plus seeded random ones, unit dual norm."""
    rng = stream(seed, cell_id=0xD1A0)
    nc = space.ncoords
    cands = [np.eye(nc)[i] for i in range(nc)]
    for _ in range(n_random):
        v = rng.standard_normal(nc)
        while np.linalg.norm(v) < 1e-12:  # essentially impossible, but total
            v = rng.standard_normal(nc)
        cands.append(v)
    out = []
    for v in cands:
        u = DualElement(space, v)
        out.append(DualElement(space, v / dual_norm(u)))
    return DirectionSet(tuple(out))


# -- empirical moments ------------------------------------------------------------

def empirical_lp(errors, p: float) -> float:
    """(mean |e|^p)^(1/p) over a nonempty error sample; needs p >= 1."""
    if not p >= 1.0:
        raise ValueError("empirical_lp requires p >= 1")
    e = np.asarray(errors, dtype=np.float64).reshape(-1)
    if e.size == 0:
        raise ValueError("empirical_lp requires a nonempty sample")
    return float(np.mean(np.abs(e) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class ApDpEstimate:
    """Lower estimates of the direction-wise / norm-wise moment constants.

    a_hat approximates sup_n sup_{|u|_* <= 1} n * |<theta_hat_n - theta, u>|_{L_p}^2
    and d_hat the same with the full norm; both are suprema over an infinite
    family, so finite grids and direction sets can only bound them from below.
    """

    a_hat: float
    d_hat: float


def estimate_ap_dp(model: ModelSpec, directions: DirectionSet, n_grid,
                   reps: int = 100, p: float = 2.0,
                   master_seed: int = 0) -> ApDpEstimate:
    if reps < 100:
        raise ValueError("estimate_ap_dp needs reps >= 100")
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(n < 1 for n in n_grid):
        raise ValueError("estimate_ap_dp needs a nonempty grid of positive n")
    target = true_functional_target(model)
    dmat = np.stack([u.coords for u in directions])
    a_hat = 0.0
    d_hat = 0.0
    for cell, n in enumerate(n_grid):
        pairings = np.empty((reps, len(directions)))
        norms = np.empty(reps)
        for r in range(reps):
            ds = sample(model, n, stream(master_seed, cell, r))
            delta = base_estimate(model, ds.rows) - target
            pairings[r] = dmat @ delta.coords
            norms[r] = norm(delta)
        for j in range(len(directions)):
            a_hat = max(a_hat, n * empirical_lp(pairings[:, j], p) ** 2)
        d_hat = max(d_hat, n * empirical_lp(norms, p) ** 2)
    return ApDpEstimate(a_hat=a_hat, d_hat=d_hat)


# -- one-dimensional Wasserstein ---------------------------------------------------

@dataclass(frozen=True)
class NormalTarget:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("normal target needs sigma >= 0")


def wasserstein_1d(xs, target, p: float = 2.0) -> float:
    """W_p between a sample and either an equal-size sample or a normal law.

    Sample vs sample: sorted matching (the optimal monotone coupling).
    Sample vs normal: the sorted sample is matched against the quantiles at
    levels (i - 0.5)/n.
    """
    if not p >= 1.0:
        raise ValueError("wasserstein_1d requires p >= 1")
    x = np.sort(np.asarray(xs, dtype=np.float64).reshape(-1))
    if x.size == 0:
        raise ValueError("wasserstein_1d requires a nonempty sample")
    if isinstance(target, NormalTarget):
        levels = (np.arange(1, x.size + 1) - 0.5) / x.size
        y = target.mu + target.sigma * ndtri(levels)
    else:
        y = np.sort(np.asarray(target, dtype=np.float64).reshape(-1))
        if y.size != x.size:
            raise ValueError("sample-vs-sample W_p needs equal sizes")
    return float(np.mean(np.abs(x - y) ** p) ** (1.0 / p))


# -- efficiency-bound scale ---------------------------------------------------------

def sigma_f(model: ModelSpec, f: Functional, at: Point | None = None) -> float:
    """sqrt(<I^{-1} f'(theta), f'(theta)>) for models with known Fisher info.

    Supported: gaussian_location (I = C^{-1}) and expfam models in their
    mean parametrization (I(t)^{-1} = Sigma_theta).  The gradient is read off
    by applying the first derivative to the coordinate basis directions.
    """
    if at is None:
        at = true_functional_target(model)
    space = at.space
    nc = space.ncoords
    grad = np.array([
        deriv_apply(f, 1, at, (Point(space, np.eye(nc)[i]),)) for i in range(nc)
    ])
    if isinstance(model, GaussianLocation):
        return float(np.sqrt(np.sum(model.cov_diag * grad * grad)))
    if isinstance(model, ExpFamModel):
        from .expfam import big_psi_inverse

        theta = big_psi_inverse(model.family, at.coords)
        sig = sigma_theta_dense(model.family, theta)
        return float(np.sqrt(grad @ sig @ grad))
    raise UnsupportedModelError(
        f"sigma_f has no Fisher information rule for {type(model).__name__}"
    )


def effective_rank(sigma: Point) -> float:
    """tr(Sigma) / ||Sigma||_op for a symmetric-matrix point."""
    if sigma.space.kind != "sym_matrix":
        raise ValueError("effective_rank needs a sym_matrix-space point")
    opn = norm(sigma)
    if opn == 0.0:
        raise DomainError("effective_rank is undefined for the zero matrix")
    tr = float(np.trace(unpack_sym(sigma.coords, sigma.space.side)))
    return tr / opn


# -- Bernstein-shape tail check -------------------------------------------------------

@dataclass(frozen=True)
class TailRow:
    t: float
    level: float       # 1 - e^{-t}
    quantile: float    # empirical quantile of |stat| at that level
    bound: float       # sigma * sqrt(t/n)  or  U * t/n, whichever is larger


@dataclass(frozen=True)
class BernsteinReport:
    rows: tuple[TailRow, ...]
    c_fit: float  # smallest C with quantile <= C * bound on the whole grid


def bernstein_tail_check(samples, sigma: float, u_bound: float, n: int,
                         t_grid=(0.5, 1.0, 2.0, 3.0, 5.0)) -> BernsteinReport:
    """Compare empirical tails of |samples| against C(sigma sqrt(t/n) v U t/n)."""
    s = np.abs(np.asarray(samples, dtype=np.float64).reshape(-1))
    if s.size == 0:
        raise ValueError("bernstein_tail_check requires a nonempty sample")
    if sigma < 0.0 or u_bound < 0.0 or n < 1:
        raise ValueError("bernstein_tail_check needs sigma, U >= 0 and n >= 1")
    rows = []
    c_fit = 0.0
    for t in t_grid:
        level = 1.0 - np.exp(-float(t))
        q = float(np.quantile(s, level))
        bound = max(sigma * np.sqrt(t / n), u_bound * t / n)
        if bound > 0.0:
            c_fit = max(c_fit, q / bound)
        elif q > 0.0:
            c_fit = float("inf")
        rows.append(TailRow(t=float(t), level=float(level), quantile=q,
                            bound=float(bound)))
    return BernsteinReport(rows=tuple(rows), c_fit=float(c_fit))


# -- log-log rate fits ---------------------------------------------------------------

@dataclass(frozen=True)
class RateCurve:
    """(n, error) pairs with their least-squares log-log fit."""

    points: tuple[tuple[int, float], ...]
    slope: float
    intercept: float


def fit_rate_curve(ns, errors) -> RateCurve:
    ns = [int(n) for n in ns]
    errs = [float(e) for e in errors]
    if len(ns) != len(errs) or len(ns) < 3:
        raise ValueError("rate fit needs at least 3 (n, error) pairs")
    if any(n < 1 for n in ns) or sorted(set(ns)) != ns:
        raise ValueError("rate fit needs strictly increasing positive n")
    if any(not e > 0.0 for e in errs):
        raise ValueError("rate fit needs strictly positive errors")
    slope, intercept = np.polyfit(np.log(np.asarray(ns, float)), np.log(errs), 1)
    return RateCurve(points=tuple(zip(ns, errs)), slope=float(slope),
                     intercept=float(intercept))


def rate_slope(curve: RateCurve) -> float:
    return curve.slope
