"""Smooth functionals f: parameter space -> R with derivative access.

Each functional exposes its value and the application of its k-th derivative
at a point to k direction vectors (a symmetric k-linear form; only pointwise
applications are provided, never operator norms).  Orders beyond
``max_analytic_order`` are served by nested central differences when the
caller allows the fallback.

Holder-type norm declarations (``declared_sup_norm``, ``declared_lip_norm``)
are carried as metadata; built-ins declare them where the bound is exact
(|sin| <= 1, the bump profile peaks at 1, bernoulli entropy is bounded by
d*log 2, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expfam as ef
from .errors import DomainError, UnsupportedOrderError
from .spaces import (
    DualElement,
    Point,
    SpaceDescriptor,
    as_matrix,
    check_same_space,
    dual_norm,
    euclidean,
)

_EPS = float(np.finfo(np.float64).eps)


class Functional:
    """Base class: subclasses fill in space, orders, and derivatives."""

    space: SpaceDescriptor
    max_analytic_order: int | None = None  # None = every order is analytic
    declared_sup_norm: float | None = None
    declared_lip_norm: float | None = None

    def value(self, t: Point) -> float:
        raise NotImplementedError

    def _deriv(self, k: int, t: Point, dirs: tuple[Point, ...]) -> float:
        raise NotImplementedError


def _check_args(f: Functional, k: int, t: Point, dirs) -> tuple[Point, ...]:
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError("derivative order must be a nonnegative integer")
    check_same_space(t.space, f.space)
    dirs = tuple(dirs)
    if len(dirs) != k:
        raise ValueError(f"expected {k} directions, got {len(dirs)}")
    for v in dirs:
        check_same_space(v.space, f.space)
    return dirs


def evaluate(f: Functional, t: Point) -> float:
    check_same_space(t.space, f.space)
    return float(f.value(t))


def deriv_apply(f: Functional, k: int, t: Point, dirs) -> float:
    """Apply the k-th derivative of f at t to the given directions."""
    dirs = _check_args(f, k, t, dirs)
    if k == 0:
        return evaluate(f, t)
    if f.max_analytic_order is not None and k > f.max_analytic_order:
        raise UnsupportedOrderError(
            f"{type(f).__name__} has analytic derivatives up to order "
            f"{f.max_analytic_order}; got k={k} (use fd_deriv_apply)"
        )
    return float(f._deriv(k, t, dirs))


def fd_deriv_apply(f: Functional, k: int, t: Point, dirs) -> float:
    """Nested central differences along the k directions (k <= 4).

    The step is order-aware, h = eps^(1/(k+2)) * (1 + |t|), balancing the
    O(h^2) truncation error against the eps/h^k roundoff amplification of a
    k-fold nested stencil.
    """
    dirs = _check_args(f, k, t, dirs)
    if k > 4:
        raise UnsupportedOrderError("fd_deriv_apply supports orders k <= 4")
    if k == 0:
        return evaluate(f, t)
    h = _EPS ** (1.0 / (k + 2)) * (1.0 + float(np.linalg.norm(t.coords)))
    vs = [v.coords for v in dirs]
    space = f.space

    def rec(x: np.ndarray, j: int) -> float:
        if j < 0:
            return f.value(Point(space, x))
        step = h * vs[j]
        return (rec(x + step, j - 1) - rec(x - step, j - 1)) / (2.0 * h)

    return float(rec(np.asarray(t.coords), k - 1))


@dataclass(frozen=True)
class SymDerivative:
    """A lazily applied symmetric k-linear form f^(k)(t)[., ..., .]."""

    functional: Functional
    order: int
    point: Point

    def __call__(self, *dirs: Point) -> float:
        return deriv_apply(self.functional, self.order, self.point, dirs)


def derivative(f: Functional, k: int, t: Point) -> SymDerivative:
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError("derivative order must be a nonnegative integer")
    check_same_space(t.space, f.space)
    return SymDerivative(f, int(k), t)


def holder_bounds(f: Functional, ball=None) -> dict[str, float | None]:
    """Declared smoothness bounds; absent declarations map to None.

    ``sup_norm`` is the declared sup of |f|, ``grad_sup`` the declared
    Lipschitz constant (= sup of the gradient's dual norm).  No functional
    currently declares a higher-order constant, so ``lip_m`` is None.  The
    ball descriptor is accepted for signature stability and unused by the
    passthrough implementation.
    """
    del ball
    return {
        "sup_norm": f.declared_sup_norm,
        "grad_sup": f.declared_lip_norm,
        "lip_m": None,
    }


# -- concrete functionals ------------------------------------------------------

@dataclass(frozen=True)
class Linear(Functional):
    """f(t) = <t, u>."""

    u: DualElement
    space: SpaceDescriptor = field(init=False)
    declared_sup_norm = None

    def __post_init__(self):
        object.__setattr__(self, "space", self.u.space)
        object.__setattr__(self, "declared_lip_norm", dual_norm(self.u))

    def value(self, t):
        return float(np.dot(t.coords, self.u.coords))

    def _deriv(self, k, t, dirs):
        if k == 1:
            return float(np.dot(dirs[0].coords, self.u.coords))
        return 0.0


@dataclass(frozen=True)
class AffineQuadratic(Functional):
    """f(t) = <A t, t> + <b, t> + c with A a symmetric coordinate matrix."""

    a: np.ndarray
    b: DualElement
    c: float = 0.0
    space: SpaceDescriptor = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        n = self.b.space.ncoords
        if a.shape != (n, n):
            raise ValueError("quadratic matrix shape does not match the space")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(a).max())):
            raise ValueError("quadratic matrix must be symmetric")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "space", self.b.space)

    def value(self, t):
        x = t.coords
        return float(x @ self.a @ x + np.dot(self.b.coords, x) + self.c)

    def _deriv(self, k, t, dirs):
        if k == 1:
            return float(2.0 * (self.a @ t.coords) @ dirs[0].coords
                         + np.dot(self.b.coords, dirs[0].coords))
        if k == 2:
            return float(2.0 * dirs[0].coords @ self.a @ dirs[1].coords)
        return 0.0


@dataclass(frozen=True)
class SquaredNorm(Functional):
    """f(t) = <t, t> (coordinate dot; Frobenius norm squared on matrices)."""

    space: SpaceDescriptor

    def value(self, t):
        return float(np.dot(t.coords, t.coords))

    def _deriv(self, k, t, dirs):
        if k == 1:
            return float(2.0 * np.dot(t.coords, dirs[0].coords))
        if k == 2:
            return float(2.0 * np.dot(dirs[0].coords, dirs[1].coords))
        return 0.0


@dataclass(frozen=True)
class MonomialPairing(Functional):
    """f(t) = <t, u>^q for an integer power q >= 1."""

    u: DualElement
    q: int
    space: SpaceDescriptor = field(init=False)

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 1:
            raise ValueError("monomial power q must be an integer >= 1")
        object.__setattr__(self, "space", self.u.space)

    def value(self, t):
        return float(np.dot(t.coords, self.u.coords) ** self.q)

    def _deriv(self, k, t, dirs):
        if k > self.q:
            return 0.0
        s = np.dot(t.coords, self.u.coords)
        coef = math.perm(self.q, k)  # q! / (q-k)!
        prod = 1.0
        for v in dirs:
            prod *= np.dot(v.coords, self.u.coords)
        return float(coef * s ** (self.q - k) * prod)


@dataclass(frozen=True)
class SmoothSqrt(Functional):
    """f(t) = sqrt(1 + <t, t>); analytic derivatives through order 3."""

    space: SpaceDescriptor
    max_analytic_order = 3

    def value(self, t):
        return float(np.sqrt(1.0 + np.dot(t.coords, t.coords)))

    def _deriv(self, k, t, dirs):
        x = t.coords
        fval = np.sqrt(1.0 + np.dot(x, x))
        tv = [np.dot(x, v.coords) for v in dirs]
        if k == 1:
            return float(tv[0] / fval)
        if k == 2:
            vw = np.dot(dirs[0].coords, dirs[1].coords)
            return float(vw / fval - tv[0] * tv[1] / fval**3)
        # k == 3
        d01 = np.dot(dirs[0].coords, dirs[1].coords)
        d02 = np.dot(dirs[0].coords, dirs[2].coords)
        d12 = np.dot(dirs[1].coords, dirs[2].coords)
        term = d01 * tv[2] + d02 * tv[1] + d12 * tv[0]
        return float(-term / fval**3 + 3.0 * tv[0] * tv[1] * tv[2] / fval**5)


@dataclass(frozen=True)
class SinPairing(Functional):
    """f(t) = sin(<t, u>); every order is analytic and |f| <= 1."""

    u: DualElement
    space: SpaceDescriptor = field(init=False)
    declared_sup_norm = 1.0

    def __post_init__(self):
        object.__setattr__(self, "space", self.u.space)
        object.__setattr__(self, "declared_lip_norm", dual_norm(self.u))

    def value(self, t):
        return float(np.sin(np.dot(t.coords, self.u.coords)))

    def _deriv(self, k, t, dirs):
        s = np.dot(t.coords, self.u.coords)
        cycle = (np.sin(s), np.cos(s), -np.sin(s), -np.cos(s))[k % 4]
        prod = 1.0
        for v in dirs:
            prod *= np.dot(v.coords, self.u.coords)
        return float(cycle * prod)


@dataclass(frozen=True)
class MatrixLinear(Functional):
    """f(Sigma) = <Sigma, U> = tr(Sigma U) on a symmetric-matrix space."""

    u: DualElement
    space: SpaceDescriptor = field(init=False)

    def __post_init__(self):
        if self.u.space.kind != "sym_matrix":
            raise ValueError("matrix_linear needs a sym_matrix-space dual")
        object.__setattr__(self, "space", self.u.space)

    def value(self, t):
        return float(np.dot(t.coords, self.u.coords))

    def _deriv(self, k, t, dirs):
        if k == 1:
            return float(np.dot(dirs[0].coords, self.u.coords))
        return 0.0


@dataclass(frozen=True)
class MatrixQuadratic(Functional):
    """f(Sigma) = <Sigma^2, U> = tr(Sigma Sigma U)."""

    u: DualElement
    space: SpaceDescriptor = field(init=False)

    def __post_init__(self):
        if self.u.space.kind != "sym_matrix":
            raise ValueError("matrix_quadratic needs a sym_matrix-space dual")
        object.__setattr__(self, "space", self.u.space)

    def value(self, t):
        s = as_matrix(t)
        umat = as_matrix(self.u)
        return float(np.trace(s @ s @ umat))

    def _deriv(self, k, t, dirs):
        umat = as_matrix(self.u)
        if k == 1:
            s = as_matrix(t)
            v = as_matrix(dirs[0])
            return float(np.trace(v @ (s @ umat + umat @ s)))
        if k == 2:
            v = as_matrix(dirs[0])
            w = as_matrix(dirs[1])
            return float(np.trace(v @ w @ umat) + np.trace(v @ umat @ w))
        return 0.0


@dataclass(frozen=True)
class ExpfamEntropy(Functional):
    """f(t) = -psi*(t): entropy of the family member with mean parameter t.

    Derivatives use the conjugate-duality identities
    grad(-psi*)(t) = -Psi^{-1}(t),
    hess(-psi*)(t) = -Sigma_theta^{-1},
    d^3(-psi*)(t)[v1,v2,v3] = +d^3 psi(theta)[S v1, S v2, S v3]
    with theta = Psi^{-1}(t) and S = Sigma_theta^{-1}; order 4 and beyond go
    through the finite-difference fallback.
    """

    family: ef.ExpFamily
    space: SpaceDescriptor = field(init=False)
    max_analytic_order = 3

    def __post_init__(self):
        object.__setattr__(self, "space", euclidean(ef.family_dim(self.family)))
        object.__setattr__(self, "declared_sup_norm", ef.entropy_sup_norm(self.family))

    def value(self, t):
        return -ef.psi_star(self.family, t.coords)

    def _deriv(self, k, t, dirs):
        fam = self.family
        theta = ef.big_psi_inverse(fam, t.coords)
        if k == 1:
            return float(-np.dot(theta, dirs[0].coords))
        if k == 2:
            return float(-np.dot(ef.sigma_solve(fam, theta, dirs[0].coords),
                                 dirs[1].coords))
        s1 = ef.sigma_solve(fam, theta, dirs[0].coords)
        s2 = ef.sigma_solve(fam, theta, dirs[1].coords)
        s3 = ef.sigma_solve(fam, theta, dirs[2].coords)
        return float(ef.psi_d3_apply(fam, theta, s1, s2, s3))


def _bump_profile(x: float, order: int) -> float:
    """phi(x) = exp(1 - 1/(1-x^2)) on |x| < 1, 0 outside; derivatives 0..2."""
    if abs(x) >= 1.0:
        return 0.0
    one_m = 1.0 - x * x
    val = math.exp(1.0 - 1.0 / one_m)
    if order == 0:
        return val
    g = -2.0 * x / one_m**2  # (d/dx) of the exponent
    if order == 1:
        return val * g
    gp = -2.0 / one_m**2 - 8.0 * x * x / one_m**3
    return val * (g * g + gp)


@dataclass(frozen=True)
class BumpPairing(Functional):
    """f(t) = phi((<t,u> - center)/width) with the standard C-infinity bump."""

    u: DualElement
    center: float = 0.0
    width: float = 1.0
    space: SpaceDescriptor = field(init=False)
    max_analytic_order = 2
    declared_sup_norm = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("bump width must be positive")
        object.__setattr__(self, "space", self.u.space)

    def _arg(self, t):
        return (np.dot(t.coords, self.u.coords) - self.center) / self.width

    def value(self, t):
        return _bump_profile(self._arg(t), 0)

    def _deriv(self, k, t, dirs):
        prod = 1.0
        for v in dirs:
            prod *= np.dot(v.coords, self.u.coords)
        return float(_bump_profile(self._arg(t), k) / self.width**k * prod)


def squared_norm(space: SpaceDescriptor) -> SquaredNorm:
    return SquaredNorm(space)


def smooth_sqrt(space: SpaceDescriptor) -> SmoothSqrt:
    return SmoothSqrt(space)
