"""Deterministic parallel execution of independent trial blocks.

Work is split into fixed-size blocks of trial indices.  Block boundaries
depend only on the block size, never on the worker count, and every random
stream is keyed by absolute trial index, so the per-block results are pure
functions of (config, block).  Results are reduced in block order, which
makes every study output independent of how many workers ran it.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

JOBS_ENV_VAR = "WIGNER_LAB_JOBS"

_BLAS_LIMIT = None


def _limit_blas_threads() -> None:
    """Pin BLAS to one thread inside trial execution.

    Parallelism lives at the process level; a fixed BLAS thread count avoids
    core oversubscription and keeps dense-solver results bit-identical
    between the inline path and pool workers.
    """
    global _BLAS_LIMIT
    if _BLAS_LIMIT is None:
        try:
            from threadpoolctl import threadpool_limits

            _BLAS_LIMIT = threadpool_limits(limits=1)
        except Exception:  # pragma: no cover - threadpoolctl unavailable
            _BLAS_LIMIT = False


def resolve_jobs(jobs: int | None) -> int:
    """Explicit value, else the WIGNER_LAB_JOBS environment default, else 1."""
    if jobs is not None:
        if jobs < 1:
            raise ValueError("jobs must be >= 1")
        return int(jobs)
    env = os.environ.get(JOBS_ENV_VAR)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{JOBS_ENV_VAR} must be >= 1, got {env}")
        return n
    return 1


def block_ranges(n_items: int, block_size: int) -> list[tuple[int, int]]:
    if n_items < 0 or block_size < 1:
        raise ValueError("need n_items >= 0 and block_size >= 1")
    return [(a, min(a + block_size, n_items)) for a in range(0, n_items, block_size)]


def run_blocks(fn, n_items: int, block_size: int, jobs: int = 1) -> list:
    """Evaluate ``fn(start, stop)`` over fixed blocks, results in block order.

    ``fn`` must be picklable (a module-level function or functools.partial of
    one) when jobs > 1.
    """
    ranges = block_ranges(n_items, block_size)
    if jobs <= 1 or len(ranges) <= 1:
        _limit_blas_threads()
        return [fn(a, b) for a, b in ranges]
    starts = [a for a, _ in ranges]
    stops = [b for _, b in ranges]
    with ProcessPoolExecutor(max_workers=min(jobs, len(ranges)), initializer=_limit_blas_threads) as ex:
        return list(ex.map(fn, starts, stops, chunksize=1))
