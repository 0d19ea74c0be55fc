"""Order-preserving map over corpus items, bounded by ``FREDPAIR_THREADS``."""
from __future__ import annotations

import contextvars
import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ArgumentError

THREADS_ENV = "FREDPAIR_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ArgumentError(f"{THREADS_ENV} must be a positive integer") from None
    if n < 1:
        raise ArgumentError(f"{THREADS_ENV} must be a positive integer")
    return n


def parallel_map(fn, items):
    items = list(items)
    n = min(thread_count(), max(len(items), 1))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        # each task runs in a copy of the caller's context so gap monitors see it
        futures = [pool.submit(contextvars.copy_context().run, fn, x) for x in items]
        return [f.result() for f in futures]
