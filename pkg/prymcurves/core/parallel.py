"""
Worker pools for the search stages.

Work units are submitted to a fork-based process pool when the platform has
one and to a thread pool otherwise. Results are returned in submission order
so that the output never depends on the number of workers.
"""

import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from .logger import get_logger

logger = get_logger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def make_executor(max_workers: Optional[int] = None) -> Executor:
    """Process pool with the 'fork' start method, or a thread pool when fork is unavailable."""
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=max_workers, mp_context=ctx)
    except Exception as e:
        logger.warning("Process pool unavailable, falling back to threads", error=str(e))
        return ThreadPoolExecutor(max_workers=max_workers)


def run_units(func: Callable[[T], R], units: Sequence[T], jobs: int = 1,
              desc: str = "", progress: bool = False) -> List[R]:
    """
    Evaluate ``func`` on every unit and return the results in unit order.

    ``func`` must be a module-level function; with ``jobs <= 1`` everything
    runs in the calling process.
    """
    results: List[Optional[R]] = [None] * len(units)
    if jobs <= 1 or len(units) <= 1:
        for i, unit in enumerate(tqdm(units, desc=desc, disable=not progress, leave=False)):
            results[i] = func(unit)
        return results  # type: ignore[return-value]

    with make_executor(max_workers=jobs) as executor:
        futures = {executor.submit(func, unit): i for i, unit in enumerate(units)}
        with tqdm(total=len(futures), desc=desc, disable=not progress, leave=False) as pbar:
            for future in as_completed(futures):
                index = futures[future]
                try:
                    results[index] = future.result()
                except Exception as e:
                    raise RuntimeError(f"{desc or 'work unit'} {units[index]!r} failed: {e}") from e
                finally:
                    pbar.update(1)
    return results  # type: ignore[return-value]
