"""Sample-index split plans for the multi-level estimator.

A plan reserves an anchor block J0 and, for every level k = 1..m,
re-partitions the *same* complement into k near-equal blocks (contiguous in
the working order, larger blocks first).  Blocks within one level are
disjoint, which is what makes the level-k term an unbiased multilinear
estimate; blocks of different levels deliberately reuse observations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .errors import ConfigError

MAX_ORDER = 10
_MODES = ("balanced", "efficient")


@dataclass(frozen=True)
class SplitPlan:
    n: int
    m: int
    j0: tuple[int, ...]
    # parts[k-1] holds the k blocks of level k, each a sorted index tuple
    parts: tuple[tuple[tuple[int, ...], ...], ...]


def anchor_size(n: int, mode: str) -> int:
    """|J0| for a sample of size n under the given mode."""
    if mode == "balanced":
        return (n + 1) // 2  # ceil(n/2)
    return max(1, math.ceil(n / max(math.log(n), 2.0)))


def _min_feasible_n(m: int, mode: str) -> int:
    n = m + 1
    while n - anchor_size(n, mode) < m:
        n += 1
    return n


def make_split(n: int, m: int, mode: str = "balanced", seed: int = 0,
               shuffle: bool = False) -> SplitPlan:
    if not isinstance(n, (int, np.integer)) or not isinstance(m, (int, np.integer)):
        raise ConfigError("split: n and m must be integers")
    if m < 1 or m > MAX_ORDER:
        raise ConfigError(f"split: m must be in 1..{MAX_ORDER}, got {m}")
    if mode not in _MODES:
        raise ConfigError(f"split: mode must be one of {_MODES}, got {mode!r}")
    if n < m + 1:
        raise ConfigError(f"split: need n >= m+1 = {m + 1}, got n = {n}")
    n0 = anchor_size(n, mode)
    if n - n0 < m:
        raise ConfigError(
            f"split: complement of the anchor has {n - n0} < m = {m} indices "
            f"under mode {mode!r}; the smallest feasible n is {_min_feasible_n(m, mode)}"
        )
    order = np.arange(n)
    if shuffle:
        order = stream(seed, cell_id=0x5EED).permutation(n)
    j0 = tuple(sorted(int(i) for i in order[:n0]))
    complement = order[n0:]
    c = n - n0
    levels = []
    for k in range(1, m + 1):
        q, r = divmod(c, k)
        sizes = [q + 1] * r + [q] * (k - r)  # near-equal, larger first
        blocks, pos = [], 0
        for s in sizes:
            blocks.append(tuple(sorted(int(i) for i in complement[pos:pos + s])))
            pos += s
        levels.append(tuple(blocks))
    return SplitPlan(n=int(n), m=int(m), j0=j0, parts=tuple(levels))


def validate_plan(plan: SplitPlan) -> str | None:
    """Return None if the plan satisfies every invariant, else the first violation."""
    full = frozenset(range(plan.n))
    j0 = plan.j0
    if len(j0) == 0:
        return "anchor J0 is empty"
    if list(j0) != sorted(set(j0)):
        return "anchor J0 is not a sorted set of indices"
    if not set(j0) <= full:
        return "anchor J0 contains out-of-range indices"
    if len(plan.parts) != plan.m:
        return f"expected {plan.m} levels, found {len(plan.parts)}"
    j0set = set(j0)
    for k, blocks in enumerate(plan.parts, start=1):
        if len(blocks) != k:
            return f"level {k} has {len(blocks)} blocks, expected {k}"
        seen: set[int] = set()
        sizes = []
        for b in blocks:
            if len(b) == 0:
                return f"level {k} contains an empty block"
            if list(b) != sorted(set(b)):
                return f"level {k} has an unsorted or duplicated block"
            bs = set(b)
            if bs & seen:
                return f"level {k} blocks are not disjoint"
            if bs & j0set:
                return f"level {k} blocks overlap the anchor"
            seen |= bs
            sizes.append(len(b))
        if max(sizes) - min(sizes) > 1:
            return f"level {k} block sizes differ by more than one"
        if j0set | seen != full:
            return f"level {k} blocks plus the anchor do not cover 0..n-1"
    return None
