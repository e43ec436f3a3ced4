"""Sample-split Taylor estimators of smooth functionals of distribution
parameters, with plug-in baselines and a Monte Carlo diagnostics harness.

Quick tour::

    import numpy as np
    from splitfun import (GaussianLocation, make_split, sample,
                          estimate_from_sample, smooth_sqrt)
    from splitfun._rng import stream

    model = GaussianLocation(theta=np.zeros(4), cov_diag=np.ones(4))
    f = smooth_sqrt(model.parameter_space())
    plan = make_split(n=200, m=2, mode="balanced")
    ds = sample(model, 200, stream(master_seed=7))
    bd = estimate_from_sample(model, f, ds, plan)
    print(bd.value, bd.order_terms)
"""

from ._rng import mix_seed, stream
from .config import (
    ExperimentConfig,
    build_functional,
    build_model,
    cell_dim,
    config_from_dict,
    instantiate_cell,
    load_config,
    validate_cells,
    with_overrides,
)
from .diagnostics import (
    ApDpEstimate,
    BernsteinReport,
    DirectionSet,
    NormalTarget,
    RateCurve,
    TailRow,
    bernstein_tail_check,
    build_direction_set,
    effective_rank,
    empirical_lp,
    estimate_ap_dp,
    fit_rate_curve,
    rate_slope,
    sigma_f,
    wasserstein_1d,
)
from .errors import (
    ConfigError,
    DomainError,
    SolverError,
    UnsupportedModelError,
    UnsupportedOrderError,
)
from .estimator import (
    NO_TRUNC,
    BaseEstimates,
    EstimateBreakdown,
    TruncRule,
    apply_truncation,
    auto_trunc,
    estimate_from_sample,
    fixed_trunc,
    plug_in,
    resolve_trunc_level,
    taylor_estimate,
    truncate,
)
from .expfam import (
    BernoulliProduct,
    GaussianNatural,
    IdentityProfile,
    LogisticLikeProfile,
    Spherical,
    big_psi,
    big_psi_inverse,
    entropy,
    entropy_sup_norm,
    psi,
    psi_star,
    sigma_theta,
)
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
    derivative,
    deriv_apply,
    evaluate,
    fd_deriv_apply,
    holder_bounds,
    smooth_sqrt,
    squared_norm,
)
from .models import (
    BernoulliComponent,
    CovarianceModel,
    Dataset,
    ExpFamModel,
    GaussianComponent,
    GaussianLocation,
    ModelSpec,
    ProductModel,
    base_estimate,
    sample,
    true_functional_target,
)
from .spaces import (
    DualElement,
    Point,
    SpaceDescriptor,
    as_matrix,
    dual_norm,
    euclidean,
    norm,
    pack_sym,
    pairing,
    product_space,
    sym_dual,
    sym_matrix,
    sym_point,
    unpack_sym,
)
from .harness import (
    CSV_COLUMNS,
    CSV_VERSION_LINE,
    CellStats,
    ResultRow,
    RunResult,
    parse_csv,
    rows_to_csv,
    run_experiment,
    summarize,
    write_outputs,
)
from .splitting import MAX_ORDER, SplitPlan, anchor_size, make_split, validate_plan


def cli_main(argv=None) -> int:
    """Entry point of the ``splitfun`` command (importable for testing)."""
    from .cli import main

    return main(argv)


__version__ = "0.1.0"

__all__ = [
    "ApDpEstimate", "AffineQuadratic", "BaseEstimates", "BernoulliComponent",
    "BernoulliProduct", "BernsteinReport", "BumpPairing", "CSV_COLUMNS",
    "CSV_VERSION_LINE", "CellStats", "ConfigError",
    "CovarianceModel", "Dataset", "DirectionSet", "DomainError", "DualElement",
    "EstimateBreakdown", "ExpFamModel", "ExpfamEntropy", "ExperimentConfig",
    "Functional",
    "GaussianComponent", "GaussianLocation", "GaussianNatural",
    "IdentityProfile", "Linear", "LogisticLikeProfile", "MAX_ORDER",
    "MatrixLinear", "MatrixQuadratic", "ModelSpec", "MonomialPairing",
    "NO_TRUNC", "NormalTarget", "Point", "ProductModel", "RateCurve",
    "ResultRow", "RunResult",
    "SinPairing", "SmoothSqrt", "SolverError", "SpaceDescriptor", "Spherical",
    "SplitPlan", "SquaredNorm", "TailRow", "TruncRule", "UnsupportedModelError",
    "UnsupportedOrderError", "anchor_size", "apply_truncation", "as_matrix",
    "auto_trunc", "base_estimate", "bernstein_tail_check",
    "build_direction_set", "build_functional", "build_model", "big_psi",
    "big_psi_inverse", "cell_dim", "cli_main", "config_from_dict",
    "deriv_apply",
    "derivative", "dual_norm", "effective_rank", "empirical_lp", "entropy",
    "evaluate", "fd_deriv_apply",
    "entropy_sup_norm", "estimate_ap_dp", "estimate_from_sample",
    "euclidean", "fit_rate_curve", "fixed_trunc", "holder_bounds",
    "instantiate_cell", "load_config",
    "make_split", "mix_seed", "norm", "pack_sym", "pairing", "parse_csv",
    "plug_in",
    "product_space", "psi", "psi_star", "rate_slope", "resolve_trunc_level",
    "rows_to_csv", "run_experiment",
    "sample", "sigma_f", "sigma_theta", "smooth_sqrt", "squared_norm",
    "stream", "summarize", "sym_dual", "sym_matrix", "sym_point",
    "taylor_estimate",
    "true_functional_target", "truncate", "unpack_sym", "validate_cells",
    "validate_plan", "wasserstein_1d", "with_overrides", "write_outputs",
]
