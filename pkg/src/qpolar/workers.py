"""Split Monte Carlo trials across worker threads.

Chunks are contiguous ranges of trial indices and results come back in
chunk order, so any fold keyed by trial index is independent of the number
of workers.  Integer counts can use one chunk per worker; float sums use
fixed-size blocks.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .context import get_current_context

T = TypeVar('T')


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else the ``threads`` setting of the current context."""
    if threads is None:
        threads = getattr(get_current_context(), 'threads', 1)
    if threads < 1:
        raise ValueError(f"Thread count must be at least 1, got {threads}")
    return int(threads)


def chunk_ranges(total: int, parts: int) -> list[range]:
    parts = max(1, min(parts, total))
    size, extra = divmod(total, parts)
    ranges = []
    start = 0
    for i in range(parts):
        stop = start + size + (1 if i < extra else 0)
        ranges.append(range(start, stop))
        start = stop
    return ranges


def block_ranges(total: int, size: int) -> list[range]:
    """Consecutive ranges of ``size`` trials; the last one may be shorter."""
    if size < 1:
        raise ValueError(f"Block size must be at least 1, got {size}")
    return [range(start, min(start + size, total)) for start in range(0, total, size)]


def _map_ranges(fn: Callable[[range], T], ranges: list[range], workers: int) -> list[T]:
    if workers == 1 or len(ranges) == 1:
        return [fn(r) for r in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, ranges))


def run_chunks(fn: Callable[[range], T], total: int, threads: int | None = None) -> list[T]:
    """Apply fn to every chunk of range(total); results in chunk order."""
    workers = resolve_threads(threads)
    return _map_ranges(fn, chunk_ranges(total, workers), workers)


def run_blocks(fn: Callable[[range], T], total: int, size: int, threads: int | None = None) -> list[T]:
    """Apply fn to fixed blocks of range(total); results in block order.

    The blocks do not depend on the thread count, so floating-point folds over
    the results are reproducible too.
    """
    return _map_ranges(fn, block_ranges(total, size), resolve_threads(threads))
