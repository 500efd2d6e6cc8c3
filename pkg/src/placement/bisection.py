"""
Bisection search for the Lagrange multiplier of a capacity constraint.

``budget_fn(u)`` is the capacity used by the placement that is optimal for
multiplier ``u``; it is non-increasing in ``u``. The search finds the ``u``
at which it meets the target capacity.
"""

import logging
from typing import Callable, NamedTuple

from src.model.errors import BracketError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
BUDGET_TOL = 1e-10
MAX_ITERATIONS = 200
MAX_EXPANSIONS = 64


class BisectionResult(NamedTuple):
    multiplier: float
    iterations: int


def _expand_bracket(budget_fn: Callable[[float], float], target: float, lo: float, hi: float):
    """Widen [lo, hi] geometrically until budget_fn(lo) >= target >= budget_fn(hi)."""
    for _ in range(MAX_EXPANSIONS):
        if budget_fn(lo) >= target:
            break
        lo = lo / 2.0 if lo > 0 else lo - (hi - lo)
    else:
        raise BracketError(f"budget at lower end {lo:.6g} stays below target {target:.6g}")

    for _ in range(MAX_EXPANSIONS):
        if budget_fn(hi) <= target:
            break
        hi = hi * 2.0 if hi > 0 else hi + (hi - lo)
    else:
        raise BracketError(f"budget at upper end {hi:.6g} stays above target {target:.6g}")
    return lo, hi


def bisect(
    budget_fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_ITERATIONS,
) -> BisectionResult:
    """Bisection returning the multiplier and the number of halvings."""
    if not lo < hi:
        raise BracketError(f"invalid bracket [{lo}, {hi}]")
    lo, hi = _expand_bracket(budget_fn, target, lo, hi)

    iterations = 0
    mid = 0.5 * (lo + hi)
    while iterations < max_iter:
        mid = 0.5 * (lo + hi)
        used = budget_fn(mid)
        iterations += 1
        if abs(used - target) < BUDGET_TOL:
            break
        if used > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * (1.0 + abs(mid)):
            mid = 0.5 * (lo + hi)
            break
    else:
        logger.debug(f"Bisection stopped at the iteration cap with bracket [{lo:.15g}, {hi:.15g}]")

    logger.debug(f"Bisection finished after {iterations} iterations at u={mid:.15g}")
    return BisectionResult(mid, iterations)


def bisect_multiplier(
    budget_fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_ITERATIONS,
) -> float:
    """Find u* with budget_fn(u*) = target by bisection.

    Args:
        budget_fn: Non-increasing capacity usage as a function of the multiplier
        target: Capacity to meet
        lo: Initial lower end of the bracket
        hi: Initial upper end of the bracket
        tol: Relative bracket width at which to stop

    Returns:
        The multiplier u*

    Raises:
        BracketError: if the bracket cannot be validated after bounded expansion
    """
    return bisect(budget_fn, target, lo, hi, tol=tol, max_iter=max_iter).multiplier
