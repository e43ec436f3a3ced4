"""TOML experiment configuration: schema, validation, and builders.

The file format is plain TOML with the tables

    [model] [functional] [estimator] [estimator.trunc] [split]
    [grid] [grid.d_rule] [run]

Vector-valued fields accept either an explicit list (``theta = [0.0, 1.0]``),
a fill (``theta_fill = 0.0``) broadcast to the cell dimension, or for dual
vectors a basis index (``u_basis = 0``).  Explicit lists pin the dimension
and are rejected under a ``power`` d-rule, where d = ceil(n^alpha) varies
across the grid.

Everything is validated -- field by field, with the offending path in the
error message -- before any sampling happens.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from . import expfam as ef
from .errors import ConfigError
from .estimator import TruncRule
from .functionals import (
    AffineQuadratic,
    BumpPairing,
    ExpfamEntropy,
    Functional,
    Linear,
    MatrixLinear,
    MatrixQuadratic,
    MonomialPairing,
    SinPairing,
    SmoothSqrt,
    SquaredNorm,
)
from .models import (
    BernoulliComponent,
    CovarianceModel,
    ExpFamModel,
    GaussianComponent,
    GaussianLocation,
    ModelSpec,
    ProductModel,
)
from .spaces import DualElement, pack_sym
from .splitting import MAX_ORDER, make_split

KINDS = ("taylor", "truncated", "plugin")


@dataclass(frozen=True)
class ExperimentConfig:
    model_table: dict
    functional_table: dict
    m: int
    kinds: tuple[str, ...]
    trunc: TruncRule
    split_mode: str
    split_shuffle: bool
    n_grid: tuple[int, ...]
    d_rule: tuple  # ("fixed", d) | ("power", alpha)
    reps: int
    p_list: tuple[float, ...]
    master_seed: int
    out_dir: str | None = None
    workers: int = 1


def _req(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"{where}.{key}: required field is missing")
    return table[key]


def _int(value, where: str, lo=None, hi=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{where}: must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{where}: must be <= {hi}, got {value}")
    return value


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _vector(table: dict, name: str, d: int | None, where: str,
            default_fill: float | None = None) -> np.ndarray:
    """Resolve `<name>` (list) / `<name>_fill` (+ d) into a vector."""
    has_list = name in table
    has_fill = f"{name}_fill" in table
    if has_list and has_fill:
        raise ConfigError(f"{where}.{name}: give either a list or a _fill, not both")
    if has_list:
        vals = table[name]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"{where}.{name}: expected a nonempty list")
        arr = np.array([_num(v, f"{where}.{name}[{i}]") for i, v in enumerate(vals)])
        if d is not None and arr.size != d:
            raise ConfigError(
                f"{where}.{name}: length {arr.size} does not match the cell "
                f"dimension {d} (use {name}_fill with a power d-rule)"
            )
        return arr
    if d is None:
        raise ConfigError(
            f"{where}.{name}: the dimension is not determined; give an explicit list"
        )
    fill = default_fill
    if has_fill:
        fill = _num(table[f"{name}_fill"], f"{where}.{name}_fill")
    if fill is None:
        raise ConfigError(f"{where}: needs {name} = [...] or {name}_fill = x")
    return np.full(d, fill, dtype=np.float64)


# -- model construction ----------------------------------------------------------

def build_model(table: dict, d: int | None = None) -> ModelSpec:
    kind = _req(table, "kind", "model")
    if kind == "gaussian_location":
        theta = _vector(table, "theta", d, "model", default_fill=0.0)
        cov = _vector(table, "cov", theta.size, "model", default_fill=1.0)
        if np.any(cov <= 0.0):
            raise ConfigError("model.cov: entries must be positive")
        return GaussianLocation(theta=theta, cov_diag=cov)
    if kind == "product":
        comps_raw = _req(table, "components", "model")
        if not isinstance(comps_raw, list) or not comps_raw:
            raise ConfigError("model.components: expected a nonempty list of tables")
        comps = []
        for i, c in enumerate(comps_raw):
            where = f"model.components[{i}]"
            ckind = _req(c, "kind", where)
            if ckind == "gaussian":
                comps.append(GaussianComponent(mean=_num(_req(c, "mean", where), where),
                                               sigma=_num(_req(c, "sigma", where), where)))
            elif ckind == "bernoulli":
                comps.append(BernoulliComponent(p=_num(_req(c, "p", where), where)))
            else:
                raise ConfigError(f"{where}.kind: unknown component {ckind!r}")
        if d is not None and len(comps) != d:
            raise ConfigError("model.components: length conflicts with the d-rule")
        return ProductModel(components=tuple(comps))
    if kind == "covariance":
        if "sigma_sqrt" in table:
            rows = table["sigma_sqrt"]
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ConfigError("model.sigma_sqrt: expected a list of rows")
            s = np.array(rows, dtype=np.float64)
            if d is not None and s.shape != (d, d):
                raise ConfigError("model.sigma_sqrt: shape conflicts with the d-rule")
        else:
            diag = _vector(table, "sigma_sqrt_diag", d, "model")
            s = np.diag(diag)
        xi_law = table.get("xi_law", "gaussian")
        try:
            return CovarianceModel(sigma_sqrt=s, xi_law=xi_law)
        except ValueError as e:
            raise ConfigError(f"model: {e}") from e
    if kind == "expfam":
        family = _req(table, "family", "model")
        theta = _vector(table, "theta", d, "model")
        if family == "bernoulli_product":
            fam = ef.BernoulliProduct(theta.size)
        elif family == "gaussian_natural":
            fam = ef.GaussianNatural(theta.size)
        elif family == "spherical":
            raise ConfigError(
                "model.family: spherical families are analytic-only and cannot "
                "be sampled; use gaussian_natural instead"
            )
        else:
            raise ConfigError(f"model.family: unknown family {family!r}")
        return ExpFamModel(family=fam, theta=theta)
    raise ConfigError(f"model.kind: unknown model {kind!r}")


# -- functional construction -------------------------------------------------------

def _dual(table: dict, model: ModelSpec, where: str) -> DualElement:
    space = model.parameter_space()
    if "u_basis" in table:
        if "u" in table or "u_fill" in table:
            raise ConfigError(f"{where}: give exactly one of u, u_fill, u_basis")
        i = _int(table["u_basis"], f"{where}.u_basis", lo=0, hi=space.ncoords - 1)
        return DualElement(space, np.eye(space.ncoords)[i])
    coords = _vector(table, "u", space.ncoords, where)
    return DualElement(space, coords)


def _dual_matrix(table: dict, model: ModelSpec, where: str) -> DualElement:
    space = model.parameter_space()
    if space.kind != "sym_matrix":
        raise ConfigError(f"{where}: matrix functionals need a covariance model")
    side = space.side
    if "u_matrix" in table:
        rows = table["u_matrix"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ConfigError(f"{where}.u_matrix: expected a list of rows")
        m = np.array(rows, dtype=np.float64)
        if m.shape != (side, side):
            raise ConfigError(f"{where}.u_matrix: expected shape {(side, side)}")
    else:
        diag = _vector(table, "u_matrix_diag", side, where, default_fill=None)
        m = np.diag(diag)
    try:
        return DualElement(space, pack_sym(m))
    except ValueError as e:
        raise ConfigError(f"{where}.u_matrix: {e}") from e


def build_functional(table: dict, model: ModelSpec) -> Functional:
    kind = _req(table, "kind", "functional")
    space = model.parameter_space()
    where = "functional"
    try:
        if kind == "linear":
            return Linear(u=_dual(table, model, where))
        if kind == "squared_norm":
            return SquaredNorm(space)
        if kind == "smooth_sqrt":
            return SmoothSqrt(space)
        if kind == "monomial_pairing":
            return MonomialPairing(u=_dual(table, model, where),
                                   q=_int(_req(table, "q", where), f"{where}.q", lo=1))
        if kind == "sin_pairing":
            return SinPairing(u=_dual(table, model, where))
        if kind == "bump_pairing":
            return BumpPairing(u=_dual(table, model, where),
                               center=_num(table.get("center", 0.0), f"{where}.center"),
                               width=_num(table.get("width", 1.0), f"{where}.width"))
        if kind == "affine_quadratic":
            rows = _req(table, "a", where)
            if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
                raise ConfigError(f"{where}.a: expected a list of rows")
            a = np.array(rows, dtype=np.float64)
            b = _vector(table, "b", space.ncoords, where, default_fill=0.0)
            return AffineQuadratic(a=a, b=DualElement(space, b),
                                   c=_num(table.get("c", 0.0), f"{where}.c"))
        if kind == "matrix_linear":
            return MatrixLinear(u=_dual_matrix(table, model, where))
        if kind == "matrix_quadratic":
            return MatrixQuadratic(u=_dual_matrix(table, model, where))
        if kind == "expfam_entropy":
            if not isinstance(model, ExpFamModel):
                raise ConfigError(
                    "functional.kind: expfam_entropy needs an expfam model"
                )
            return ExpfamEntropy(family=model.family)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e
    raise ConfigError(f"functional.kind: unknown functional {kind!r}")


# -- whole-config assembly ----------------------------------------------------------

def cell_dim(cfg: ExperimentConfig, n: int) -> int:
    rule, value = cfg.d_rule
    if rule == "fixed":
        return int(value)
    return max(1, math.ceil(n ** value))


def instantiate_cell(cfg: ExperimentConfig, n: int) -> tuple[ModelSpec, Functional, int]:
    d = cell_dim(cfg, n)
    model = build_model(cfg.model_table, d)
    return model, build_functional(cfg.functional_table, model), d


def config_from_dict(raw: dict) -> ExperimentConfig:
    for t in ("model", "functional", "estimator", "grid"):
        if t not in raw or not isinstance(raw[t], dict):
            raise ConfigError(f"{t}: required table is missing")
    est = raw["estimator"]
    m = _int(_req(est, "m", "estimator"), "estimator.m", lo=1, hi=MAX_ORDER)
    kinds_raw = est.get("kinds", list(KINDS))
    if (not isinstance(kinds_raw, list) or not kinds_raw
            or any(k not in KINDS for k in kinds_raw)):
        raise ConfigError(f"estimator.kinds: expected a nonempty subset of {KINDS}")
    kinds = tuple(k for k in KINDS if k in kinds_raw)  # canonical order
    trunc_table = est.get("trunc", {"kind": "none"})
    if not isinstance(trunc_table, dict):
        raise ConfigError("estimator.trunc: expected a table")
    tkind = trunc_table.get("kind", "none")
    try:
        if tkind == "fixed":
            trunc = TruncRule("fixed", level=_num(_req(trunc_table, "level",
                                                       "estimator.trunc"),
                                                  "estimator.trunc.level"))
        elif tkind == "auto":
            trunc = TruncRule("auto", delta=_num(trunc_table.get("delta", 0.0),
                                                 "estimator.trunc.delta"))
        elif tkind == "none":
            trunc = TruncRule("none")
        else:
            raise ConfigError(f"estimator.trunc.kind: unknown rule {tkind!r}")
    except ValueError as e:
        raise ConfigError(f"estimator.trunc: {e}") from e

    split = raw.get("split", {})
    mode = split.get("mode", "balanced")
    if mode not in ("balanced", "efficient"):
        raise ConfigError(f"split.mode: expected balanced|efficient, got {mode!r}")
    shuffle = split.get("shuffle", False)
    if not isinstance(shuffle, bool):
        raise ConfigError("split.shuffle: expected a boolean")

    grid = raw["grid"]
    n_raw = _req(grid, "n", "grid")
    if not isinstance(n_raw, list) or not n_raw:
        raise ConfigError("grid.n: expected a nonempty list of sample sizes")
    n_grid = tuple(_int(v, f"grid.n[{i}]", lo=2) for i, v in enumerate(n_raw))
    if sorted(set(n_grid)) != list(n_grid):
        raise ConfigError("grid.n: sample sizes must be strictly increasing")
    reps = _int(_req(grid, "reps", "grid"), "grid.reps", lo=1)
    p_raw = grid.get("p", [2.0])
    if not isinstance(p_raw, list) or not p_raw:
        raise ConfigError("grid.p: expected a nonempty list")
    p_list = tuple(_num(v, f"grid.p[{i}]") for i, v in enumerate(p_raw))
    if any(p < 1.0 for p in p_list):
        raise ConfigError("grid.p: moment orders must be >= 1")
    d_table = grid.get("d_rule", {"kind": "fixed"})
    if not isinstance(d_table, dict):
        raise ConfigError("grid.d_rule: expected a table")
    dkind = d_table.get("kind", "fixed")
    if dkind == "fixed":
        if "d" in d_table:
            d_rule = ("fixed", _int(d_table["d"], "grid.d_rule.d", lo=1))
        else:
            d_rule = ("fixed", None)  # resolved from the model table below
    elif dkind == "power":
        alpha = _num(_req(d_table, "alpha", "grid.d_rule"), "grid.d_rule.alpha")
        if not 0.0 < alpha < 1.0:
            raise ConfigError("grid.d_rule.alpha: must lie in (0, 1)")
        d_rule = ("power", alpha)
    else:
        raise ConfigError(f"grid.d_rule.kind: expected fixed|power, got {dkind!r}")

    run = raw.get("run", {})
    master_seed = _int(run.get("master_seed", 0), "run.master_seed", lo=0)
    out_dir = run.get("out")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("run.out: expected a path string")
    workers = _int(run.get("workers", 1), "run.workers", lo=1)

    if d_rule == ("fixed", None):
        # infer a fixed dimension by building the model once without a hint
        probe = build_model(raw["model"], None)
        d_rule = ("fixed", probe.parameter_space().ncoords
                  if probe.parameter_space().kind != "sym_matrix"
                  else probe.parameter_space().side)

    cfg = ExperimentConfig(
        model_table=dict(raw["model"]),
        functional_table=dict(raw["functional"]),
        m=m, kinds=kinds, trunc=trunc, split_mode=mode, split_shuffle=shuffle,
        n_grid=n_grid, d_rule=d_rule, reps=reps, p_list=p_list,
        master_seed=master_seed, out_dir=out_dir, workers=workers,
    )
    validate_cells(cfg)
    return cfg


def validate_cells(cfg: ExperimentConfig) -> None:
    """Instantiate every grid cell and check split feasibility up front."""
    for n in cfg.n_grid:
        instantiate_cell(cfg, n)  # raises ConfigError on bad shapes
        make_split(n, cfg.m, cfg.split_mode)  # raises ConfigError when infeasible


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config {path!r} is not valid TOML: {e}") from e
    return config_from_dict(raw)


def with_overrides(cfg: ExperimentConfig, *, master_seed: int | None = None,
                   out_dir: str | None = None,
                   workers: int | None = None) -> ExperimentConfig:
    """CLI/env overrides; None keeps the configured value."""
    kw = {}
    if master_seed is not None:
        kw["master_seed"] = _int(master_seed, "run.master_seed", lo=0)
    if out_dir is not None:
        kw["out_dir"] = out_dir
    if workers is not None:
        kw["workers"] = _int(workers, "run.workers", lo=1)
    return replace(cfg, **kw) if kw else cfg
