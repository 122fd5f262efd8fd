"""Worker-thread helper.

HARMAP_THREADS caps the thread count for sweep-style workloads; the default
is sequential.  Results are always collected in input order, so a parallel
schedule produces identical output to the sequential one.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    env = os.environ.get("HARMAP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def work_map(fn, items):
    """map() preserving order, threaded when HARMAP_THREADS > 1."""
    items = list(items)
    workers = min(max_workers(), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
