"""Sampling models: data law, base estimator, and true parameter.

Every model ties together (i) a law for i.i.d. observations, (ii) the base
estimator theta_hat (always the mean of the sufficient statistic here) and
(iii) the target parameter theta(P) living in one of the spaces from
:mod:`splitfun.spaces`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expfam as ef
from .errors import UnsupportedModelError
from .spaces import Point, euclidean, pack_sym, product_space, sym_matrix

_SQRT3 = float(np.sqrt(3.0))
XI_LAWS = ("gaussian", "rademacher", "uniform_sym")


@dataclass(frozen=True)
class Dataset:
    """n i.i.d. observations as rows of an (n, obs_dim) array."""

    model: "ModelSpec"
    rows: np.ndarray


class ModelSpec:
    """Base class; concrete models implement the three hooks below."""

    def parameter_space(self):
        raise NotImplementedError

    def _sample_rows(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _estimate(self, rows: np.ndarray) -> Point:
        raise NotImplementedError

    def _true_target(self) -> Point:
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianLocation(ModelSpec):
    """X ~ N(theta, diag(cov_diag)) on R^d; theta_hat is the sample mean."""

    theta: np.ndarray
    cov_diag: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.cov_diag, dtype=np.float64).reshape(-1)
        if th.size < 1 or cov.size != th.size:
            raise ValueError("theta and cov_diag must be equal-length, nonempty")
        if np.any(cov < 0.0):
            raise ValueError("cov_diag entries must be nonnegative")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "cov_diag", cov)

    @property
    def d(self) -> int:
        return self.theta.size

    def parameter_space(self):
        return euclidean(self.d)

    def _sample_rows(self, n, rng):
        z = rng.standard_normal((n, self.d))
        return self.theta + np.sqrt(self.cov_diag) * z

    def _estimate(self, rows):
        return Point(self.parameter_space(), rows.mean(axis=0))

    def _true_target(self):
        return Point(self.parameter_space(), self.theta)


@dataclass(frozen=True)
class GaussianComponent:
    mean: float
    sigma: float

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("component sigma must be nonnegative")


@dataclass(frozen=True)
class BernoulliComponent:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("component success probability must lie in [0,1]")


@dataclass(frozen=True)
class ProductModel(ModelSpec):
    """Independent 1-D components (gaussian or bernoulli), mean-MLE each."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("product model needs at least one component")
        for c in comps:
            if not isinstance(c, (GaussianComponent, BernoulliComponent)):
                raise ValueError(f"unknown component type {type(c).__name__}")
        object.__setattr__(self, "components", comps)

    def parameter_space(self):
        return product_space((1,) * len(self.components))

    def _sample_rows(self, n, rng):
        cols = []
        for c in self.components:
            if isinstance(c, GaussianComponent):
                cols.append(c.mean + c.sigma * rng.standard_normal(n))
            else:
                cols.append((rng.random(n) < c.p).astype(np.float64))
        return np.column_stack(cols)

    def _estimate(self, rows):
        return Point(self.parameter_space(), rows.mean(axis=0))

    def _true_target(self):
        means = [c.mean if isinstance(c, GaussianComponent) else c.p
                 for c in self.components]
        return Point(self.parameter_space(), np.array(means))


@dataclass(frozen=True)
class CovarianceModel(ModelSpec):
    """X = S xi with S = sigma_sqrt symmetric and xi isotropic, E xi xi^T = I.

    The estimand is Sigma = S^2 and the base estimator the uncentered second
    moment Sigma_hat = n^{-1} sum x_j x_j^T (the model is mean-zero).
    """

    sigma_sqrt: np.ndarray
    xi_law: str = "gaussian"

    def __post_init__(self):
        s = np.asarray(self.sigma_sqrt, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("sigma_sqrt must be a square matrix")
        if not np.allclose(s, s.T, rtol=0.0, atol=1e-10 * (1.0 + np.abs(s).max())):
            raise ValueError("sigma_sqrt must be symmetric")
        if self.xi_law not in XI_LAWS:
            raise ValueError(f"xi_law must be one of {XI_LAWS}")
        object.__setattr__(self, "sigma_sqrt", s)

    @property
    def side(self) -> int:
        return self.sigma_sqrt.shape[0]

    def parameter_space(self):
        return sym_matrix(self.side)

    def _sample_rows(self, n, rng):
        shape = (n, self.side)
        if self.xi_law == "gaussian":
            xi = rng.standard_normal(shape)
        elif self.xi_law == "rademacher":
            xi = rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
        else:  # uniform_sym: uniform on [-sqrt(3), sqrt(3)], unit variance
            xi = rng.uniform(-_SQRT3, _SQRT3, size=shape)
        return xi @ self.sigma_sqrt  # sigma_sqrt is symmetric

    def _estimate(self, rows):
        second_moment = rows.T @ rows / rows.shape[0]
        return Point(self.parameter_space(), pack_sym(second_moment))

    def _true_target(self):
        sigma = self.sigma_sqrt @ self.sigma_sqrt
        return Point(self.parameter_space(), pack_sym(sigma))


@dataclass(frozen=True)
class ExpFamModel(ModelSpec):
    """An exponential-family law observed through its sufficient statistic.

    The parameter of interest is the mean parameter t = Psi(theta), and the
    base estimator is the MLE-equivalent sample mean of T(X).  Sampling is
    defined for bernoulli products (coordinates Bernoulli(Psi(theta)_i)) and
    gaussian families (exact); spherical profiles are analytic-only.
    """

    family: ef.ExpFamily
    theta: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        if th.size != ef.family_dim(self.family):
            raise ValueError("theta length does not match the family dimension")
        object.__setattr__(self, "theta", th)

    def parameter_space(self):
        return euclidean(ef.family_dim(self.family))

    def _sample_rows(self, n, rng):
        if isinstance(self.family, ef.BernoulliProduct):
            p = ef.big_psi(self.family, self.theta)
            return (rng.random((n, p.size)) < p).astype(np.float64)
        if isinstance(self.family, ef.GaussianNatural):
            return self.theta + rng.standard_normal((n, self.theta.size))
        raise UnsupportedModelError(
            "spherical families are analytic-only (no base measure is fixed); "
            "use gaussian_natural for the identity profile"
        )

    def _estimate(self, rows):
        return Point(self.parameter_space(), rows.mean(axis=0))

    def _true_target(self):
        return Point(self.parameter_space(), ef.big_psi(self.family, self.theta))


# -- module-level operations ----------------------------------------------------

def sample(model: ModelSpec, n: int, rng: np.random.Generator) -> Dataset:
    """Draw n i.i.d. observations from the model using the given stream."""
    if n < 1:
        raise ValueError("sample size must be >= 1")
    return Dataset(model=model, rows=model._sample_rows(int(n), rng))


def base_estimate(model: ModelSpec, rows) -> Point:
    """The base estimator on a dataset slice (rows array or Dataset)."""
    arr = rows.rows if isinstance(rows, Dataset) else np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("base_estimate needs a nonempty 2-D slice of observations")
    return model._estimate(arr)


def true_functional_target(model: ModelSpec) -> Point:
    """theta(P): the point at which functionals of the model are evaluated."""
    return model._true_target()
