"""Partition index ranges across worker processes."""

import logging
from multiprocessing import Pool
from typing import Any, Callable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)


def split_range(n: int, parts: int) -> List[Tuple[int, int]]:
    """Split 0..n-1 into at most `parts` contiguous, nearly equal ranges."""
    parts = max(1, min(parts, n))
    step, extra = divmod(n, parts)
    ranges = []
    start = 0
    for i in range(parts):
        stop = start + step + (1 if i < extra else 0)
        if stop > start:
            ranges.append((start, stop))
        start = stop
    return ranges


def scan_ranges(fn: Callable[..., Any], n: int, args: Sequence[Any], workers: int = 1) -> List[Any]:
    """
    Run fn(*args, start, stop) over a partition of 0..n-1.

    Results come back in range order regardless of scheduling. `fn` must be a
    module-level function so it can be pickled.
    """
    ranges = split_range(n, workers)
    if workers <= 1 or len(ranges) == 1:
        return [fn(*args, start, stop) for start, stop in ranges]

    logger.debug(f"Scanning {n} indices with {len(ranges)} workers")
    with Pool(processes=len(ranges)) as pool:
        return pool.starmap(fn, [(*args, start, stop) for start, stop in ranges])


def first_witness(results: Sequence[Optional[Any]]) -> Optional[Any]:
    """First non-None result in range order."""
    for result in results:
        if result is not None:
            return result
    return None
