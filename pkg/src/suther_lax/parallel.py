"""Bounded thread pool with order-preserving results."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

THREADS_ENV = "SUTHER_LAX_THREADS"


def worker_count(limit: Optional[int] = None) -> int:
    """Pool size: ``SUTHER_LAX_THREADS`` if set, else the CPU count, capped at ``limit``."""
    env = os.environ.get(THREADS_ENV, "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, limit or cap))


def parallel_map(fn, items) -> list:
    items = list(items)
    workers = worker_count(len(items))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
