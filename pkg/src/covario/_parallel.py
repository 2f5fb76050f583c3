"""Deterministic map with optional process parallelism (COVARIO_THREADS)."""

from __future__ import annotations

import os


def thread_count():
    env = os.environ.get("COVARIO_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def parallel_map(fn, items):
    """map(fn, items) with results in submission order; processes when allowed."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    import multiprocessing
    from concurrent.futures import ProcessPoolExecutor

    try:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=min(n, len(items)), mp_context=ctx) as ex:
            return list(ex.map(fn, items))
    except (OSError, ValueError):
        return [fn(it) for it in items]
