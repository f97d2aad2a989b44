"""Deterministic fan-out of independent work items over a thread pool."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def chunk_bounds(n, workers):
    n_chunks = max(1, min(n, 8 * max(1, workers)))
    edges = np.linspace(0, n, n_chunks + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_chunks(fn, n, workers=1):
    """Call ``fn(start, stop)`` over contiguous chunks of ``range(n)``.

    Results come back in chunk order regardless of completion order.
    """
    bounds = chunk_bounds(n, workers)
    if workers <= 1:
        return [fn(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), bounds))
