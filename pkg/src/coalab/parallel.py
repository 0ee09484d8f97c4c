"""Deterministic fan-out of independent jobs over a thread pool sized by ``COALAB_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("COALAB_THREADS", "1")))
    except ValueError:
        return 1


def map_jobs(fn, jobs: list) -> list:
    """``[fn(j) for j in jobs]``, possibly threaded; results keep job order."""
    threads = worker_count()
    if threads == 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))
