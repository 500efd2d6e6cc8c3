"""Runtime detection and environment helpers."""

from src.utils.runtime_detection import (
    is_free_threading_available,
    is_gil_enabled,
    should_use_threads,
    get_optimal_worker_count,
    get_runtime_info,
    log_runtime_info,
    read_bool_env,
    read_int_env,
)

__all__ = [
    'is_free_threading_available',
    'is_gil_enabled',
    'should_use_threads',
    'get_optimal_worker_count',
    'get_runtime_info',
    'log_runtime_info',
    'read_bool_env',
    'read_int_env',
]
