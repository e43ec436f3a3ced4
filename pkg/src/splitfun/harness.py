"""Monte Carlo harness: run a configured grid, aggregate, and serialize.

Determinism contract: every repetition draws from its own counter-based
stream keyed by (master_seed, cell index, rep index), and aggregation walks
repetitions in index order.  The produced CSV is therefore byte-identical
for any worker count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._rng import mix_seed, stream
from .config import ExperimentConfig, cell_dim, instantiate_cell, validate_cells
from .diagnostics import NormalTarget, fit_rate_curve, sigma_f, wasserstein_1d
from .errors import DomainError, SolverError, UnsupportedModelError
from .estimator import (
    NO_TRUNC,
    estimate_from_sample,
    fixed_trunc,
    plug_in,
    resolve_trunc_level,
)
from .functionals import evaluate
from .models import base_estimate, sample, true_functional_target
from .splitting import make_split

CSV_VERSION_LINE = "# splitfun-csv v1"
CSV_COLUMNS = ("n", "d", "estimator_kind", "p", "lp_error", "bias",
               "empirical_sd", "w2_normal", "clipped_fraction", "reps")

# Columns of the per-rep estimate matrix produced by _run_rep_range.
_COL = {"taylor": 0, "truncated": 1, "clipped": 2, "plugin": 3}


@dataclass(frozen=True)
class ResultRow:
    n: int
    d: int
    estimator_kind: str
    p: float
    lp_error: float
    bias: float
    empirical_sd: float
    w2_normal: float | None
    clipped_fraction: float
    reps: int
    wall_time: float | None = None  # in-memory only; never serialized


@dataclass(frozen=True)
class CellStats:
    cell_id: int
    n: int
    d: int
    reps_requested: int
    reps_failed: int
    wall_time: float
    first_error: str | None = None

    @property
    def failed(self) -> bool:
        return self.reps_failed > 0.01 * self.reps_requested


@dataclass(frozen=True)
class RunResult:
    rows: tuple[ResultRow, ...]
    cells: tuple[CellStats, ...]

    @property
    def ok(self) -> bool:
        return all(not c.failed for c in self.cells)


def _run_rep_range(cfg: ExperimentConfig, n: int, cell_id: int,
                   lo: int, hi: int):
    """Estimates for reps [lo, hi) of one grid cell.

    Returns (values, ok, first_error): values is (hi-lo, 4) with columns
    raw Taylor / truncated Taylor / clipped flag / plug-in; rows with
    ok == False carry NaNs.
    """
    model, f, _ = instantiate_cell(cfg, n)
    fixed_plan = None
    if not cfg.split_shuffle:
        fixed_plan = make_split(n, cfg.m, cfg.split_mode)
    level = resolve_trunc_level(f, cfg.trunc)
    rule = NO_TRUNC if level is None else fixed_trunc(level)
    values = np.full((hi - lo, 4), np.nan)
    ok = np.ones(hi - lo, dtype=bool)
    first_error = None
    for i, rep in enumerate(range(lo, hi)):
        rng = stream(cfg.master_seed, cell_id=cell_id, rep=rep)
        try:
            ds = sample(model, n, rng)
            plan = fixed_plan
            if plan is None:
                plan = make_split(n, cfg.m, cfg.split_mode,
                                  seed=mix_seed(cfg.master_seed, cell_id, rep),
                                  shuffle=True)
            bd = estimate_from_sample(model, f, ds, plan, rule)
            pi = plug_in(f, base_estimate(model, ds))
            values[i] = (bd.raw, bd.value, float(bd.clipped), pi)
        except (DomainError, SolverError, FloatingPointError) as e:
            ok[i] = False
            if first_error is None:
                first_error = f"rep {rep}: {type(e).__name__}: {e}"
    return values, ok, first_error


def _chunks(reps: int, workers: int) -> list[tuple[int, int]]:
    k = min(reps, max(1, workers) * 4)
    q, r = divmod(reps, k)
    bounds, lo = [], 0
    for i in range(k):
        hi = lo + q + (1 if i < r else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def _cell_rows(cfg: ExperimentConfig, n: int, cell_id: int, values: np.ndarray,
               ok: np.ndarray, wall: float) -> list[ResultRow]:
    model, f, d = instantiate_cell(cfg, n)
    target = evaluate(f, true_functional_target(model))
    good = values[ok]
    reps_ok = good.shape[0]
    sigma = None
    try:
        s = sigma_f(model, f)
        if s > 1e-300:
            sigma = s
    except (UnsupportedModelError, DomainError):
        sigma = None

    rows = []
    for kind in cfg.kinds:
        est = good[:, _COL[kind]]
        errors = est - target
        clipped = float(np.mean(good[:, _COL["clipped"]])) if kind == "truncated" else 0.0
        w2 = None
        if sigma is not None and reps_ok > 1:
            zs = np.sqrt(n) * errors / sigma
            w2 = wasserstein_1d(zs, NormalTarget(0.0, 1.0), p=2.0)
        sd = float(np.std(errors, ddof=1)) if reps_ok > 1 else 0.0
        for p in cfg.p_list:
            lp = float(np.mean(np.abs(errors) ** p) ** (1.0 / p))
            rows.append(ResultRow(
                n=n, d=d, estimator_kind=kind, p=p,
                lp_error=lp, bias=float(np.mean(errors)), empirical_sd=sd,
                w2_normal=w2, clipped_fraction=clipped, reps=reps_ok,
                wall_time=wall,
            ))
    return rows


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> RunResult:
    """Run the whole grid; returns rows in (n, kind, p) order.

    A cell with more than 1% failed repetitions is marked failed; its rows
    are still produced from the repetitions that succeeded (reps records
    how many).  A cell with no surviving repetition produces no rows.
    """
    validate_cells(cfg)
    if workers is None:
        workers = cfg.workers
    rows: list[ResultRow] = []
    cells: list[CellStats] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for cell_id, n in enumerate(cfg.n_grid):
            t0 = time.perf_counter()
            parts = _chunks(cfg.reps, workers)
            if pool is None:
                results = [_run_rep_range(cfg, n, cell_id, lo, hi)
                           for lo, hi in parts]
            else:
                futures = [pool.submit(_run_rep_range, cfg, n, cell_id, lo, hi)
                           for lo, hi in parts]
                results = [fu.result() for fu in futures]
            values = np.vstack([r[0] for r in results])
            ok = np.concatenate([r[1] for r in results])
            first_error = next((r[2] for r in results if r[2] is not None), None)
            wall = time.perf_counter() - t0
            nfail = int((~ok).sum())
            cells.append(CellStats(cell_id=cell_id, n=n, d=cell_dim(cfg, n),
                                   reps_requested=cfg.reps, reps_failed=nfail,
                                   wall_time=wall, first_error=first_error))
            if nfail < cfg.reps:
                rows.extend(_cell_rows(cfg, n, cell_id, values, ok, wall))
    finally:
        if pool is not None:
            pool.shutdown()
    result = RunResult(rows=tuple(rows), cells=tuple(cells))
    if cfg.out_dir is not None:
        write_outputs(cfg.out_dir, result)
    return result


# -- CSV ------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))  # repr round-trips float64 exactly


def rows_to_csv(rows) -> str:
    lines = [CSV_VERSION_LINE, ",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[ResultRow]:
    lines = text.splitlines()
    if not lines or lines[0] != CSV_VERSION_LINE:
        raise ValueError(f"not a results CSV: expected leading {CSV_VERSION_LINE!r}")
    if len(lines) < 2 or lines[1] != ",".join(CSV_COLUMNS):
        raise ValueError("results CSV has an unexpected column header")
    rows = []
    for ln in lines[2:]:
        if not ln:
            continue
        parts = ln.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(f"malformed results row: {ln!r}")
        rows.append(ResultRow(
            n=int(parts[0]), d=int(parts[1]), estimator_kind=parts[2],
            p=float(parts[3]), lp_error=float(parts[4]), bias=float(parts[5]),
            empirical_sd=float(parts[6]),
            w2_normal=None if parts[7] == "" else float(parts[7]),
            clipped_fraction=float(parts[8]), reps=int(parts[9]),
        ))
    return rows


def write_outputs(out_dir: str, result: RunResult) -> str:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    with open(csv_path, "w") as fh:
        fh.write(rows_to_csv(result.rows))
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(summarize(result))
    return csv_path


# -- summary ---------------------------------------------------------------------

def summarize(result) -> str:
    """Human-readable digest: rate slopes, bias comparison, failures, timing."""
    rows = list(result.rows) if isinstance(result, RunResult) else list(result)
    cells = list(result.cells) if isinstance(result, RunResult) else []
    out = []

    if cells:
        bad = [c for c in cells if c.failed]
        total = sum(c.wall_time for c in cells)
        out.append(f"cells: {len(cells) - len(bad)}/{len(cells)} clean, "
                   f"total wall time {total:.2f}s")
        for c in cells:
            note = f" FAILED ({c.reps_failed}/{c.reps_requested} reps)" if c.failed else ""
            err = f" [{c.first_error}]" if c.first_error else ""
            out.append(f"  n={c.n} d={c.d}: {c.wall_time:.2f}s{note}{err}")

    kinds = sorted({r.estimator_kind for r in rows},
                   key=lambda k: ("taylor", "truncated", "plugin").index(k))
    ps = sorted({r.p for r in rows})
    for kind in kinds:
        for p in ps:
            pts = sorted((r.n, r.lp_error) for r in rows
                         if r.estimator_kind == kind and r.p == p)
            ns = [n for n, _ in pts]
            errs = [e for _, e in pts]
            if len(pts) >= 3 and all(e > 0 for e in errs):
                curve = fit_rate_curve(ns, errs)
                out.append(f"rate slope {kind} p={p:g}: {curve.slope:+.3f} "
                           f"over {len(pts)} sample sizes")
            else:
                out.append(f"rate slope {kind} p={p:g}: not fitted "
                           f"(needs >= 3 sample sizes with positive error)")

    by_n: dict[int, dict[str, float]] = {}
    for r in rows:
        by_n.setdefault(r.n, {})[r.estimator_kind] = r.bias
    for n in sorted(by_n):
        b = by_n[n]
        for kind in ("taylor", "truncated"):
            if kind in b and "plugin" in b and abs(b[kind]) > 0:
                out.append(f"bias at n={n}: plugin/{kind} = "
                           f"{abs(b['plugin']) / abs(b[kind]):.2f}x "
                           f"({b['plugin']:+.3e} vs {b[kind]:+.3e})")

    if not rows:
        out.append("no result rows (all cells failed)")
    return "\n".join(out) + "\n"


__all__ = [
    "CSV_COLUMNS", "CSV_VERSION_LINE", "CellStats", "ResultRow", "RunResult",
    "parse_csv", "rows_to_csv", "run_experiment", "summarize", "write_outputs",
]
