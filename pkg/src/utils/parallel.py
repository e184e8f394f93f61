"""
Order-preserving trial runner.

Results come back in index order whatever the worker count, so campaign output
is identical for every --jobs value.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, TypeVar

from ..core.config import LOGGER_NAME

logger = logging.getLogger(f"{LOGGER_NAME}.parallel")

T = TypeVar("T")


def run_indexed(fn: Callable[[int], T], count: int, jobs: int = 1) -> List[T]:
    """
    Evaluate fn(0), ..., fn(count - 1), optionally across processes.

    Args:
        fn: Picklable callable taking a trial index
        count: Number of indices
        jobs: Worker processes; 1 runs inline

    Returns:
        List of results ordered by index
    """
    if count <= 0:
        return []
    if jobs <= 1 or count == 1:
        return [fn(i) for i in range(count)]

    workers = min(jobs, count)
    chunksize = max(1, count // (workers * 4))
    logger.debug(f"Running {count} trials on {workers} workers (chunksize={chunksize})")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count), chunksize=chunksize))
