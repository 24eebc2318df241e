"""Trial-level parallelism with a deterministic, ordered merge."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")

DEFAULT_CHUNK = 1 << 14


def chunk_bounds(total: int, chunk: int = DEFAULT_CHUNK) -> list[tuple[int, int]]:
    return [(lo, min(total, lo + chunk)) for lo in range(0, total, chunk)]


def map_chunks(func: Callable[[int, int], T], total: int, workers: int = 1,
               chunk: int = DEFAULT_CHUNK) -> list[T]:
    """Apply ``func(lo, hi)`` over consecutive index chunks of ``range(total)``.

    Chunk boundaries do not depend on ``workers``, so results are identical
    for any worker count.  ``func`` must be picklable when ``workers > 1``.
    """
    bounds = chunk_bounds(total, chunk)
    if workers <= 1 or len(bounds) <= 1:
        return [func(lo, hi) for lo, hi in bounds]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, lo, hi) for lo, hi in bounds]
        return [f.result() for f in futures]
