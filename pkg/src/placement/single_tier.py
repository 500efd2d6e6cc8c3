"""
Optimal placement for a single tier and the offset-popularity-proportional map.

Maximizing sum_m q_m x_m / (w x_m + v) subject to sum_m x_m = budget and
0 <= x_m <= upper is a concave problem whose KKT solution is

    x_m = clip((sqrt(q_m v / u) - v) / w, 0, upper)

for the multiplier u that meets the budget. Files with q_m <= T0 = u v get
nothing, files with q_m >= T1 = u (w upper + v)^2 / v get ``upper``. The
single-tier problem, the uniform-threshold relaxation and the per-tier
sub-optimal decomposition all reduce to this map with different (w, v,
upper, budget).
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.model.errors import DomainError
from src.model.interference import interference_terms
from src.model.types import PopularityProfile
from src.placement.bisection import bisect

logger = logging.getLogger(__name__)

PopularityLike = Union[PopularityProfile, np.ndarray]


def _as_vector(q: PopularityLike) -> np.ndarray:
    if isinstance(q, PopularityProfile):
        return q.q
    return np.asarray(q, dtype=float)


def opp_placement(q: np.ndarray, u: float, w: float, v: float, upper: float = 1.0) -> np.ndarray:
    """Offset-popularity-proportional placement for multiplier ``u``."""
    q = np.asarray(q, dtype=float)
    if u <= 0:
        return np.full(q.shape, upper)
    return np.clip((np.sqrt(q * v / u) - v) / w, 0.0, upper)


def opp_thresholds(u: float, w: float, v: float, upper: float = 1.0) -> Tuple[float, float]:
    """Popularity thresholds (T0, T1) below/above which the map saturates."""
    return u * v, u * (w * upper + v) ** 2 / v


@dataclass(frozen=True, eq=False)
class OppSolution:
    x: np.ndarray
    multiplier: float
    thresholds: Tuple[float, float]
    iterations: int


def _polish(x: np.ndarray, budget: float, upper: float) -> np.ndarray:
    """Spread the residual budget over interior entries so the sum is exact."""
    residual = budget - x.sum()
    interior = (x > 0.0) & (x < upper)
    if residual != 0.0 and np.any(interior):
        x = x.copy()
        x[interior] = np.clip(x[interior] + residual / interior.sum(), 0.0, upper)
    return x


def solve_opp(q: PopularityLike, budget: float, w: float, v: float, upper: float = 1.0) -> OppSolution:
    """Solve max sum q x/(w x + v) s.t. sum x = budget, 0 <= x <= upper.

    Args:
        q: Non-increasing popularity vector
        budget: Total capacity, 0 <= budget <= M * upper
        w: Slope of the per-file denominator, > 0
        v: Offset of the per-file denominator, > 0
        upper: Per-file cap

    Returns:
        OppSolution with the placement, multiplier, thresholds and iteration count
    """
    q = _as_vector(q)
    num_files = q.size
    if w <= 0 or v <= 0:
        raise DomainError(f"offset-proportional map needs w > 0 and v > 0, got w={w}, v={v}")
    if budget < 0:
        raise DomainError(f"budget must be >= 0, got {budget}")

    if budget >= num_files * upper * (1.0 - 1e-15):
        u = float(q[-1] * v / (w * upper + v) ** 2)
        return OppSolution(np.full(num_files, upper), u, opp_thresholds(u, w, v, upper), 0)
    if budget == 0.0:
        u = float(q[0] / v)
        return OppSolution(np.zeros(num_files), u, opp_thresholds(u, w, v, upper), 0)

    popular = q > 0
    if budget >= popular.sum() * upper:
        # every requested file saturates; unrequested files split the remainder
        x = np.where(popular, upper, (budget - popular.sum() * upper) / max(1, (~popular).sum()))
        u = float(q[popular][-1] * v / (w * upper + v) ** 2) if np.any(popular) else 0.0
        return OppSolution(x, u, opp_thresholds(u, w, v, upper), 0)

    q_min = float(q[popular][-1])
    lo = q_min * v / (w * upper + v) ** 2
    hi = float(q[0]) / v

    def budget_fn(u: float) -> float:
        return float(opp_placement(q, u, w, v, upper).sum())

    result = bisect(budget_fn, budget, lo, hi)
    x = _polish(opp_placement(q, result.multiplier, w, v, upper), budget, upper)
    return OppSolution(x, result.multiplier, opp_thresholds(result.multiplier, w, v, upper), result.iterations)


@dataclass(frozen=True, eq=False)
class SingleTierSolution:
    """Optimal single-tier placement.

    Attributes:
        p: placement probability of each file
        multiplier: Lagrange multiplier u* of the capacity constraint
        thresholds: (T0, T1) popularity thresholds
        w: W(beta) of the tier
        v: V(beta) of the tier
        iterations: bisection steps used
    """

    p: np.ndarray
    multiplier: float
    thresholds: Tuple[float, float]
    w: float
    v: float
    iterations: int = 0

    @property
    def levels(self) -> np.ndarray:
        return self.p

    @property
    def upper(self) -> float:
        return 1.0

    def objective(self, q: PopularityLike) -> float:
        return float(np.sum(_as_vector(q) * self.p / (self.w * self.p + self.v)))


def solve_single_tier(q: PopularityLike, C: float, beta: float, delta: float) -> SingleTierSolution:
    """Optimal placement probabilities of a single-tier network.

    Args:
        q: Popularity of the M files, non-increasing
        C: Cache capacity, 0 <= C <= M
        beta: Linear SIR threshold
        delta: 2 / path-loss exponent

    Returns:
        SingleTierSolution whose probabilities sum to C
    """
    vec = _as_vector(q)
    if C > vec.size + 1e-9:
        raise DomainError(f"capacity {C} exceeds the number of files {vec.size}")
    terms = interference_terms(beta, delta)
    sol = solve_opp(vec, min(C, vec.size), terms.w, terms.v, 1.0)
    p = sol.x.copy()
    p.setflags(write=False)
    logger.debug(
        f"Single-tier solve: C={C}, u*={sol.multiplier:.6g}, "
        f"T0={sol.thresholds[0]:.6g}, T1={sol.thresholds[1]:.6g}, iterations={sol.iterations}"
    )
    return SingleTierSolution(p, sol.multiplier, sol.thresholds, terms.w, terms.v, sol.iterations)
