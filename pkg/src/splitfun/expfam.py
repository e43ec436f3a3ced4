"""Regular exponential families in natural/mean parametrization.

A family here is a log-partition function psi on Theta = R^d together with

* ``big_psi``       Psi = grad psi, the natural-to-mean bijection,
* ``big_psi_inverse``  its inverse (closed-form where available, otherwise a
  bracketed 1-D radial root solve),
* ``sigma_theta``   Sigma_theta = hess psi = Cov_theta(T(X)),
* ``psi_star``      the convex conjugate, computed as
  psi*(t) = <t, Psi^-1(t)> - psi(Psi^-1(t)),
* ``entropy``       H(theta) = -psi*(Psi(theta)).

Shipped families: ``BernoulliProduct`` (uniform base measure on {0,1}^d, so
psi(theta) = sum log((1+e^theta_i)/2)), ``GaussianNatural`` (psi = |theta|^2/2)
and the radially symmetric ``Spherical`` family psi(theta) = phi(|theta|)
built from a profile Phi = phi' that is strictly increasing with Phi(0) = 0.
Spherical families are analytic-only: no base measure is fixed, so they
support all the calculus here but cannot be sampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from .errors import DomainError, SolverError
from .spaces import Point, pack_sym, sym_matrix

_LOG2 = float(np.log(2.0))


def _vec(x) -> np.ndarray:
    if isinstance(x, Point):
        return np.asarray(x.coords, dtype=np.float64)
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise DomainError("parameter vector must be finite")
    return arr


# -- radial profiles ----------------------------------------------------------

class PhiProfile:
    """Radial profile Phi: value, derivatives to order 3, and antiderivative."""

    sup_value: float  # sup_rho Phi(rho); the open image of |t| is [0, sup)

    def integral(self, rho: float) -> float:
        raise NotImplementedError

    def value(self, rho: float) -> float:
        raise NotImplementedError

    def deriv(self, rho: float, order: int = 1) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityProfile(PhiProfile):
    """Phi(rho) = rho; the spherical family degenerates to the Gaussian one."""

    sup_value: float = float("inf")

    def integral(self, rho):
        return 0.5 * rho * rho

    def value(self, rho):
        return float(rho)

    def deriv(self, rho, order=1):
        if order == 1:
            return 1.0
        if order in (2, 3):
            return 0.0
        raise ValueError("profile derivatives available up to order 3")


@dataclass(frozen=True)
class LogisticLikeProfile(PhiProfile):
    """Phi(rho) = scale * tanh(rho/2); saturating, image [0, scale)."""

    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("profile scale must be positive")
        object.__setattr__(self, "sup_value", float(self.scale))

    def integral(self, rho):
        # antiderivative of scale*tanh(rho/2); log(cosh) written stably
        half = 0.5 * abs(rho)
        logcosh = half + np.log1p(np.exp(-2.0 * half)) - _LOG2
        return float(2.0 * self.scale * logcosh)

    def value(self, rho):
        return float(self.scale * np.tanh(0.5 * rho))

    def deriv(self, rho, order=1):
        th = np.tanh(0.5 * rho)
        sech2 = 1.0 - th * th
        if order == 1:
            return float(0.5 * self.scale * sech2)
        if order == 2:
            return float(-0.5 * self.scale * th * sech2)
        if order == 3:
            return float(0.25 * self.scale * sech2 * (3.0 * th * th - 1.0))
        raise ValueError("profile derivatives available up to order 3")


# -- family specs -------------------------------------------------------------

@dataclass(frozen=True)
class BernoulliProduct:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("family dimension must be >= 1")


@dataclass(frozen=True)
class GaussianNatural:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("family dimension must be >= 1")


@dataclass(frozen=True)
class Spherical:
    d: int
    profile: PhiProfile

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("family dimension must be >= 1")


ExpFamily = BernoulliProduct | GaussianNatural | Spherical


def family_dim(fam: ExpFamily) -> int:
    return fam.d


# -- cumulant function and friends --------------------------------------------

def psi(fam: ExpFamily, theta) -> float:
    th = _vec(theta)
    if isinstance(fam, BernoulliProduct):
        # log((1+e^x)/2) = logaddexp(0, x) - log 2, stable for large |x|
        return float(np.sum(np.logaddexp(0.0, th) - _LOG2))
    if isinstance(fam, GaussianNatural):
        return float(0.5 * np.dot(th, th))
    return float(fam.profile.integral(float(np.linalg.norm(th))))


def big_psi(fam: ExpFamily, theta) -> np.ndarray:
    """Mean parameter Psi(theta) = grad psi(theta)."""
    th = _vec(theta)
    if isinstance(fam, BernoulliProduct):
        return expit(th)
    if isinstance(fam, GaussianNatural):
        return th.copy()
    rho = float(np.linalg.norm(th))
    if rho == 0.0:
        return np.zeros_like(th)
    return (fam.profile.value(rho) / rho) * th


def _radial_inverse(profile: PhiProfile, r: float) -> float:
    """Solve Phi(rho) = r for rho >= 0: bracket, bisect, Newton polish."""
    if r == 0.0:
        return 0.0
    if r < 0.0 or r >= profile.sup_value:
        raise DomainError(f"target norm {r} outside the open image [0, {profile.sup_value})")
    iters = 0
    lo, hi = 0.0, 1.0
    while profile.value(hi) < r:
        lo, hi = hi, 2.0 * hi
        iters += 1
        if hi > 1e8 or iters > 100:
            raise SolverError("radial inverse: bracketing exceeded its budget")
    while hi - lo > 1e-8:
        iters += 1
        if iters > 100:
            raise SolverError("radial inverse: bisection exceeded 100 iterations")
        mid = 0.5 * (lo + hi)
        if profile.value(mid) < r:
            lo = mid
        else:
            hi = mid
    rho = 0.5 * (lo + hi)
    resid = profile.value(rho) - r
    while abs(resid) > 1e-12:
        iters += 1
        if iters > 100:
            raise SolverError("radial inverse: no convergence after 100 iterations")
        slope = profile.deriv(rho, 1)
        if not slope > 0.0:
            raise SolverError("radial inverse: nonpositive slope in Newton polish")
        rho -= resid / slope
        resid = profile.value(rho) - r
    return float(rho)


def big_psi_inverse(fam: ExpFamily, t) -> np.ndarray:
    tv = _vec(t)
    if isinstance(fam, BernoulliProduct):
        if np.any(tv <= 0.0) or np.any(tv >= 1.0):
            raise DomainError("bernoulli mean parameters must lie in (0,1)")
        return logit(tv)
    if isinstance(fam, GaussianNatural):
        return tv.copy()
    r = float(np.linalg.norm(tv))
    if r == 0.0:
        return np.zeros_like(tv)
    rho = _radial_inverse(fam.profile, r)
    return (rho / r) * tv


def sigma_theta_dense(fam: ExpFamily, theta) -> np.ndarray:
    """Sigma_theta = hess psi(theta) = Cov_theta(T(X)) as a dense matrix."""
    th = _vec(theta)
    if isinstance(fam, BernoulliProduct):
        p = expit(th)
        return np.diag(p * (1.0 - p))
    if isinstance(fam, GaussianNatural):
        return np.eye(th.size)
    rho = float(np.linalg.norm(th))
    if rho == 0.0:
        return fam.profile.deriv(0.0, 1) * np.eye(th.size)
    u = th / rho
    proj = np.outer(u, u)
    h = fam.profile.value(rho) / rho
    return fam.profile.deriv(rho, 1) * proj + h * (np.eye(th.size) - proj)


def sigma_theta(fam: ExpFamily, theta) -> Point:
    """Covariance of the sufficient statistic, as a symmetric-matrix point."""
    dense = sigma_theta_dense(fam, theta)
    return Point(sym_matrix(family_dim(fam)), pack_sym(dense))


def sigma_solve(fam: ExpFamily, theta, v: np.ndarray) -> np.ndarray:
    """Sigma_theta^{-1} v, using the diagonal / radial structure directly."""
    th = _vec(theta)
    v = np.asarray(v, dtype=np.float64)
    if isinstance(fam, BernoulliProduct):
        p = expit(th)
        return v / (p * (1.0 - p))
    if isinstance(fam, GaussianNatural):
        return v.copy()
    rho = float(np.linalg.norm(th))
    d1 = fam.profile.deriv(rho, 1)
    if rho == 0.0:
        return v / d1
    u = th / rho
    h = fam.profile.value(rho) / rho
    along = np.dot(u, v) * u
    return along / d1 + (v - along) / h


def psi_d3_apply(fam: ExpFamily, theta, v1, v2, v3) -> float:
    """Third derivative of psi at theta applied to three directions."""
    th = _vec(theta)
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    v3 = np.asarray(v3, dtype=np.float64)
    if isinstance(fam, BernoulliProduct):
        p = expit(th)
        w = p * (1.0 - p) * (1.0 - 2.0 * p)  # third cumulant of a Bernoulli
        return float(np.sum(w * v1 * v2 * v3))
    if isinstance(fam, GaussianNatural):
        return 0.0
    rho = float(np.linalg.norm(th))
    prof = fam.profile
    if rho == 0.0:
        # odd profiles have Phi''(0)=0 and h'(0)=0, so the tensor vanishes
        return 0.0
    u = th / rho
    h = prof.value(rho) / rho
    hp = (prof.deriv(rho, 1) - h) / rho  # h'(rho)
    s1, s2, s3 = np.dot(u, v1), np.dot(u, v2), np.dot(u, v3)
    sym_part = s3 * np.dot(v1, v2) + s2 * np.dot(v1, v3) + s1 * np.dot(v2, v3)
    return float(hp * sym_part + (prof.deriv(rho, 2) - 3.0 * hp) * s1 * s2 * s3)


def psi_star(fam: ExpFamily, t) -> float:
    """Convex conjugate psi*(t) = <t, Psi^-1(t)> - psi(Psi^-1(t))."""
    tv = _vec(t)
    th = big_psi_inverse(fam, tv)
    return float(np.dot(tv, th) - psi(fam, th))


def entropy(fam: ExpFamily, theta) -> float:
    """H(theta) = -psi*(Psi(theta)) (entropy relative to the base measure)."""
    th = _vec(theta)
    return -psi_star(fam, big_psi(fam, th))


def entropy_sup_norm(fam: ExpFamily) -> float | None:
    """sup_t |psi*(t)| over the mean domain, where finite; else None.

    Bernoulli products: psi* per coordinate lies in [0, log 2].  Saturating
    logistic-like spherical profiles: psi*(t) -> 2*scale*log 2 at the image
    boundary.  Gaussian: unbounded.
    """
    if isinstance(fam, BernoulliProduct):
        return fam.d * _LOG2
    if isinstance(fam, Spherical) and isinstance(fam.profile, LogisticLikeProfile):
        return 2.0 * fam.profile.scale * _LOG2
    return None
