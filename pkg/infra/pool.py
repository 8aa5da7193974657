# infra/pool.py
"""
Process pools for the factoring loop, the high-bits bridge and the sieve.

Spawn context only: workers start from a clean interpreter on every platform.
A worker count of 1 runs everything in-process.
"""
from __future__ import annotations

import multiprocessing
import multiprocessing.pool
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


@contextmanager
def spawn_pool(workers: int) -> Iterator[Optional[multiprocessing.pool.Pool]]:
    """
    Yield a spawn pool for workers > 1, otherwise None.

    The pool is terminated on exit, so jobs still queued when the caller
    leaves the block (first hit found, cancel) are dropped.
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1 (got {workers}).")
    pool = multiprocessing.get_context("spawn").Pool(workers) if workers > 1 else None
    try:
        yield pool
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()


def ordered_map(fn: Callable[[T], R], items: Sequence[T], pool: Optional[multiprocessing.pool.Pool]) -> List[R]:
    """fn over items, results in input order, in the pool when there is one."""
    if pool is None:
        return [fn(item) for item in items]
    return pool.map(fn, items)
