"""
Worker pool for Monte Carlo trial chunks.

Selects a ThreadPoolExecutor on free-threaded interpreters, a
ProcessPoolExecutor otherwise, and runs inline when parallelism is disabled
or the job is too small to amortize worker start-up. Chunk results are
integer hit counts, so the summed outcome does not depend on the executor.
"""

import logging
from concurrent.futures import Future, ProcessPoolExecutor, ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Optional

from src.utils.runtime_detection import (
    get_optimal_worker_count,
    log_runtime_info,
    read_bool_env,
    read_int_env,
    should_use_threads,
)

logger = logging.getLogger(__name__)

DEFAULT_MIN_TRIALS_FOR_PARALLEL = 20000


class ProcessingPoolManager:
    """
    Context-managed executor for simulation chunks.

    Args:
        max_workers: Worker count; None picks it from MAX_WORKERS or the CPU count
        use_sequential: Run every task inline in the caller
    """

    _runtime_info_logged = False

    def __init__(self, max_workers: Optional[int] = None, use_sequential: bool = False):
        self.max_workers = get_optimal_worker_count(max_workers)
        self.use_sequential = use_sequential
        self.executor = None
        self.executor_type = None

        if not ProcessingPoolManager._runtime_info_logged:
            log_runtime_info()
            ProcessingPoolManager._runtime_info_logged = True

    def __enter__(self):
        self._initialize_executor()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self._cleanup_executor()
        return False

    def _initialize_executor(self):
        if not read_bool_env("PARALLEL_SIMULATION_ENABLED", True):
            logger.info("Parallel simulation disabled via PARALLEL_SIMULATION_ENABLED")
            self.use_sequential = True

        if self.use_sequential or self.max_workers == 1:
            logger.debug("Running trial chunks sequentially")
            self.use_sequential = True
            self.executor_type = "sequential"
            self.executor = None
            return

        if should_use_threads():
            self.executor_type = "thread"
            self.executor = ThreadPoolExecutor(max_workers=self.max_workers)
        else:
            self.executor_type = "process"
            self.executor = ProcessPoolExecutor(max_workers=self.max_workers)
        logger.info(f"Simulating with a {self.executor_type} pool of {self.max_workers} workers")

    def _cleanup_executor(self):
        if self.executor:
            try:
                self.executor.shutdown(wait=True)
                logger.debug(f"Executor ({self.executor_type}) shut down")
            except Exception as e:
                logger.error(f"Error shutting down executor: {e}")
            finally:
                self.executor = None

    def submit(self, fn: Callable, *args, **kwargs) -> Future:
        """
        Submit one trial chunk; inline mode returns an already completed Future.

        Exceptions raised by the chunk surface from ``Future.result()`` in
        both modes.
        """
        if self.use_sequential or self.executor is None:
            future = Future()
            try:
                future.set_result(fn(*args, **kwargs))
            except Exception as e:
                future.set_exception(e)
            return future
        return self.executor.submit(fn, *args, **kwargs)


@contextmanager
def get_processing_pool(
    max_workers: Optional[int] = None,
    min_items_for_parallel: Optional[int] = None,
    item_count: Optional[int] = None,
):
    """
    Pool sized to the job: inline below MIN_TRIALS_FOR_PARALLEL trials.

    Args:
        max_workers: Worker count
        min_items_for_parallel: Trial count below which tasks run inline;
            None reads MIN_TRIALS_FOR_PARALLEL (default 20000)
        item_count: Total number of trials in the job

    Yields:
        ProcessingPoolManager instance

    Example:
        >>> with get_processing_pool(item_count=100000) as pool:
        ...     futures = [pool.submit(count_hits, *task) for task in tasks]
        ...     hits = sum(f.result() for f in futures)
    """
    if min_items_for_parallel is None:
        min_items_for_parallel = read_int_env("MIN_TRIALS_FOR_PARALLEL", DEFAULT_MIN_TRIALS_FOR_PARALLEL)

    use_sequential = item_count is not None and item_count < min_items_for_parallel
    if use_sequential:
        logger.debug(
            f"Using sequential simulation ({item_count} trials < "
            f"MIN_TRIALS_FOR_PARALLEL={min_items_for_parallel})"
        )

    manager = ProcessingPoolManager(max_workers=max_workers, use_sequential=use_sequential)
    try:
        with manager as pool:
            yield pool
    except KeyboardInterrupt:
        logger.warning("Simulation interrupted by user (Ctrl+C)")
        raise
    except Exception as e:
        logger.error(f"Error in simulation pool: {e}", exc_info=True)
        raise
