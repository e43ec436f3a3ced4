"""Deterministic random streams.

Every stochastic routine in the package draws from a Philox counter-based
generator keyed by (master_seed, cell_id, rep_index).  Distinct keys give
statistically independent streams, so replications can be computed in any
order -- or on any number of workers -- and still produce identical draws.
"""

from __future__ import annotations

import numpy as np

_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF


def stream(master_seed: int, cell_id: int = 0, rep: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, cell, replication) triple."""
    if master_seed < 0 or cell_id < 0 or rep < 0:
        raise ValueError("stream keys must be nonnegative integers")
    key = np.array(
        [master_seed & _MASK64, ((cell_id & _MASK32) << 32) | (rep & _MASK32)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def mix_seed(master_seed: int, cell_id: int = 0, rep: int = 0) -> int:
    """Fold a (seed, cell, rep) triple into a single nonnegative int.

    Used where an API takes a plain seed (e.g. split shuffling) but the
    caller needs a distinct deterministic value per replication.
    """
    h = (master_seed & _MASK64) * 0x9E3779B97F4A7C15
    h ^= (cell_id + 1) * 0xBF58476D1CE4E5B9
    h ^= (rep + 1) * 0x94D049BB133111EB
    return h & _MASK64
