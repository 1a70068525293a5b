"""Deterministic fan-out over trial blocks.

Work is cut into fixed-size blocks of trial indices and mapped in order;
because every trial derives its randomness from (seed, trial) alone, the
concatenated output is bitwise independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

BLOCK = 64


def trial_blocks(trials: int, offset: int = 0) -> list:
    """Half-open index ranges [(lo, hi), ...] covering offset..offset+trials."""
    return [(t, min(t + BLOCK, offset + trials)) for t in range(offset, offset + trials, BLOCK)]


def map_blocks(fn, jobs: list, workers: int) -> list:
    """Order-preserving map; falls back to in-process when pooling cannot help."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=1))
