"""
Runtime detection and environment settings for Monte Carlo workers.

Decides between thread and process pools from the interpreter's
free-threading support, and reads the integer/boolean parallelism settings
from the environment. Invalid environment values log a warning and fall
back to the default.
"""

import logging
import os
import sys
import sysconfig
from typing import Optional

logger = logging.getLogger(__name__)

DEFAULT_MAX_WORKERS_CAP = 8
FALSE_VALUES = ("false", "0", "no", "off")
TRUE_VALUES = ("true", "1", "yes", "on")


def read_int_env(name: str, default: int, minimum: int = 1) -> int:
    """Integer environment setting, clamped to ``minimum``."""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return max(minimum, int(raw))
    except (ValueError, TypeError):
        logger.warning(f"Invalid {name} value '{raw}', using default {default}")
        return default


def read_bool_env(name: str, default: bool) -> bool:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = raw.strip().lower()
    if value in FALSE_VALUES:
        return False
    if value in TRUE_VALUES:
        return True
    logger.warning(f"Invalid {name} value '{raw}', using default {default}")
    return default


def is_free_threading_available() -> bool:
    """True if the interpreter was built with Py_GIL_DISABLED."""
    return sysconfig.get_config_var("Py_GIL_DISABLED") == 1


def is_gil_enabled() -> bool:
    """True if the GIL is active now; always True before Python 3.13."""
    if hasattr(sys, '_is_gil_enabled'):
        return sys._is_gil_enabled()
    return True


def should_use_threads() -> bool:
    """
    Whether trial chunks should run on a ThreadPoolExecutor.

    Threads only pay off when the build is free-threaded and the GIL is
    actually off; otherwise chunks go to a ProcessPoolExecutor.
    """
    return is_free_threading_available() and not is_gil_enabled()


def get_optimal_worker_count(max_workers: Optional[int] = None) -> int:
    """
    Number of Monte Carlo workers.

    Args:
        max_workers: Explicit count (e.g. from --workers). If None, MAX_WORKERS
                    from the environment, else min(os.cpu_count(), 8).

    Returns:
        int: Worker count, at least 1
    """
    if max_workers is not None:
        return max(1, max_workers)

    env_workers = os.environ.get("MAX_WORKERS")
    if env_workers:
        try:
            return max(1, int(env_workers))
        except (ValueError, TypeError):
            logger.warning(f"Invalid MAX_WORKERS value '{env_workers}', using default")

    cpu_count = os.cpu_count() or 4
    return min(cpu_count, DEFAULT_MAX_WORKERS_CAP)


def get_runtime_info() -> dict:
    """Interpreter and parallelism facts recorded alongside simulation runs."""
    return {
        "python_version": sys.version,
        "python_version_info": sys.version_info[:3],
        "free_threading_available": is_free_threading_available(),
        "gil_enabled": is_gil_enabled(),
        "should_use_threads": should_use_threads(),
        "optimal_worker_count": get_optimal_worker_count(),
        "cpu_count": os.cpu_count(),
    }


def log_runtime_info() -> None:
    """Log the runtime facts once, when the first simulation pool is created."""
    info = get_runtime_info()
    logger.info(
        f"Python {'.'.join(map(str, info['python_version_info']))}, "
        f"free-threading={info['free_threading_available']}, GIL={info['gil_enabled']}, "
        f"cpus={info['cpu_count']}, workers={info['optimal_worker_count']}"
    )
    if info['free_threading_available'] and info['gil_enabled']:
        logger.warning("Free-threaded build with the GIL re-enabled; trial chunks will use processes")
