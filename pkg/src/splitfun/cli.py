"""Command-line entry point.

Subcommands:
    run    execute one experiment config and write results.csv + summary.txt
    sweep  execute several configs, one output subdirectory per config
    diag   model diagnostics (moment-growth estimates, tail check, normal
           distance) driven by a TOML file containing a [model] table

Exit codes: 0 success, 2 configuration error, 3 runtime failure
(including any grid cell with more than 1% failed repetitions).

Environment: SPLITFUN_SEED and SPLITFUN_OUT override the config file;
explicit --seed / --out flags override both.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from ._rng import stream
from .config import build_model, load_config, with_overrides
from .diagnostics import (
    NormalTarget,
    bernstein_tail_check,
    build_direction_set,
    estimate_ap_dp,
    sigma_f,
    wasserstein_1d,
)
from .errors import ConfigError, DomainError, SolverError, UnsupportedModelError
from .functionals import Linear
from .harness import run_experiment, summarize
from .models import base_estimate, sample, true_functional_target
from .spaces import DualElement, pairing

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent import
    import tomli as tomllib

DIAG_VERSION_LINE = "# splitfun-diag v1"


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name}: expected an integer, got {raw!r}") from None


def _resolve_overrides(args) -> tuple[int | None, str | None]:
    seed = args.seed if args.seed is not None else _env_int("SPLITFUN_SEED")
    out = args.out if args.out is not None else os.environ.get("SPLITFUN_OUT")
    return seed, out


def _cmd_run(args) -> int:
    seed, out = _resolve_overrides(args)
    cfg = load_config(args.config)
    cfg = with_overrides(cfg, master_seed=seed, out_dir=out, workers=args.workers)
    if cfg.out_dir is None:
        cfg = with_overrides(cfg, out_dir=".")
    result = run_experiment(cfg)
    sys.stdout.write(summarize(result))
    print(f"results: {os.path.join(cfg.out_dir, 'results.csv')}")
    return 0 if result.ok else 3


def _cmd_sweep(args) -> int:
    seed, out_base = _resolve_overrides(args)
    if out_base is None:
        out_base = "."
    cfgs = []
    for path in args.configs:
        cfg = load_config(path)
        stem = os.path.splitext(os.path.basename(path))[0]
        cfg = with_overrides(cfg, master_seed=seed,
                             out_dir=os.path.join(out_base, stem),
                             workers=args.workers)
        cfgs.append((path, cfg))
    all_ok = True
    for path, cfg in cfgs:
        print(f"== {path} -> {cfg.out_dir}")
        result = run_experiment(cfg)
        sys.stdout.write(summarize(result))
        all_ok = all_ok and result.ok
    return 0 if all_ok else 3


def _load_model_table(path: str):
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read model file {path!r}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"model file {path!r} is not valid TOML: {e}") from e
    if "model" not in raw or not isinstance(raw["model"], dict):
        raise ConfigError("model file needs a [model] table")
    return build_model(raw["model"], None)


def _first_direction(model) -> DualElement:
    space = model.parameter_space()
    return DualElement(space, np.eye(space.ncoords)[0])


def _linear_sigma(model, u: DualElement, seed: int, reps: int, n: int) -> float:
    """Exact sigma for <theta_hat, u> when the model supports it, else MC."""
    try:
        return sigma_f(model, Linear(u=u))
    except (UnsupportedModelError, DomainError):
        rng = stream(seed, cell_id=0x51F0, rep=0)
        vals = np.empty(reps)
        for r in range(reps):
            ds = sample(model, n, rng)
            vals[r] = pairing(u, base_estimate(model, ds))
        return float(np.std(vals, ddof=1) * math.sqrt(n))


def _pairing_samples(model, u: DualElement, n: int, reps: int, seed: int,
                     cell_id: int) -> np.ndarray:
    out = np.empty(reps)
    for rep in range(reps):
        rng = stream(seed, cell_id=cell_id, rep=rep)
        ds = sample(model, n, rng)
        out[rep] = pairing(u, base_estimate(model, ds))
    return out


def _write_diag(out: str | None, name: str, header: str, lines: list[str]) -> None:
    if out is None:
        return
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w") as fh:
        fh.write("\n".join([DIAG_VERSION_LINE, header] + lines) + "\n")
    print(f"wrote {path}")


def _cmd_diag(args) -> int:
    model = _load_model_table(args.model)
    seed = args.seed if args.seed is not None else (_env_int("SPLITFUN_SEED") or 0)
    out = args.out if args.out is not None else os.environ.get("SPLITFUN_OUT")
    ns = args.n or [64, 256]

    if args.what == "ap_dp":
        dirs = build_direction_set(model.parameter_space(), seed=seed)
        est = estimate_ap_dp(model, dirs, n_grid=ns, reps=args.reps,
                             p=args.p, master_seed=seed)
        print(f"a_hat(p={args.p:g}) >= {est.a_hat!r}")
        print(f"d_hat(p={args.p:g}) >= {est.d_hat!r}")
        print("(lower estimates over a finite direction set)")
        _write_diag(out, "diag_ap_dp.csv", "p,a_hat,d_hat",
                    [f"{args.p!r},{est.a_hat!r},{est.d_hat!r}"])
        return 0

    if args.what == "tail":
        n = max(ns)
        u = _first_direction(model)
        target = pairing(u, true_functional_target(model))
        devs = _pairing_samples(model, u, n, args.reps, seed, 0x7A11) - target
        sigma = args.sigma if args.sigma is not None else \
            _linear_sigma(model, u, seed, min(args.reps, 200), n)
        u_bound = args.u_bound if args.u_bound is not None else 3.0 * sigma
        report = bernstein_tail_check(devs, sigma=sigma, u_bound=u_bound, n=n)
        print(f"n={n} sigma={sigma!r} u_bound={u_bound!r}")
        lines = []
        for row in report.rows:
            print(f"  t={row.t:g}: quantile {row.quantile!r} vs bound "
                  f"{row.bound!r}")
            lines.append(f"{row.t!r},{row.level!r},{row.quantile!r},{row.bound!r}")
        print(f"fitted constant c = {report.c_fit!r}")
        _write_diag(out, "diag_tail.csv", "t,level,quantile,bound", lines)
        return 0

    if args.what == "wass":
        u = _first_direction(model)
        target = pairing(u, true_functional_target(model))
        sigma = args.sigma if args.sigma is not None else \
            _linear_sigma(model, u, seed, min(args.reps, 200), max(ns))
        if not sigma > 0:
            raise ConfigError("the first-coordinate pairing is degenerate "
                              "(sigma = 0); pass --sigma explicitly")
        lines = []
        for n in ns:
            devs = _pairing_samples(model, u, n, args.reps, seed, 0x3A55 + n)
            zs = math.sqrt(n) * (devs - target) / sigma
            w2 = wasserstein_1d(zs, NormalTarget(0.0, 1.0), p=2.0)
            print(f"n={n}: W2 to standard normal = {w2!r}")
            lines.append(f"{n},{w2!r}")
        _write_diag(out, "diag_wass.csv", "n,w2", lines)
        return 0

    raise ConfigError(f"diag: unknown check {args.what!r}")  # pragma: no cover


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitfun",
        description="Sample-split estimators of smooth functionals: "
                    "batch experiments and diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("--config", required=True, help="TOML experiment file")
    p_run.add_argument("--seed", type=int, default=None, help="master seed override")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--workers", type=int, default=None, help="worker processes")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run several configs")
    p_sweep.add_argument("configs", nargs="+", help="TOML experiment files")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default=None, help="base output directory")
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_diag = sub.add_parser("diag", help="model diagnostics")
    p_diag.add_argument("--model", required=True,
                        help="TOML file with a [model] table")
    p_diag.add_argument("--what", required=True,
                        choices=("ap_dp", "tail", "wass"))
    p_diag.add_argument("--n", type=int, nargs="+", default=None,
                        help="sample sizes (default: 64 256)")
    p_diag.add_argument("--reps", type=int, default=200)
    p_diag.add_argument("--p", type=float, default=2.0)
    p_diag.add_argument("--seed", type=int, default=None)
    p_diag.add_argument("--sigma", type=float, default=None,
                        help="override the noise scale used by tail/wass")
    p_diag.add_argument("--u-bound", type=float, default=None,
                        help="override the sup-norm proxy used by tail")
    p_diag.add_argument("--out", default=None, help="directory for diag CSVs")
    p_diag.set_defaults(fn=_cmd_diag)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (DomainError, SolverError, UnsupportedModelError, ValueError,
            OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
