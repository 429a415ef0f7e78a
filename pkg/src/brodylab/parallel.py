"""Order-preserving thread map and exact reductions.

Results never depend on the thread count: work items are independent, the
map preserves input order, and sums go through ``math.fsum`` (correctly
rounded, hence order-independent).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "BRODYLAB_THREADS"


def default_threads() -> int:
    try:
        return max(int(os.environ.get(THREADS_ENV, "1")), 1)
    except ValueError:
        return 1


def pmap(fn, items, threads: int | None = None) -> list:
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def exact_sum(values) -> float:
    return math.fsum(values)
