"""
Optimal placement for multi-tier networks whose tiers share one SIR threshold.

With a common threshold the hit probability depends on a placement only
through the per-file weighted sums g_m = sum_k p_mk z_k. The solve runs in
two stages: the relaxed problem over g is another instance of the
offset-popularity-proportional map, and a sequential fill then realizes
the optimal g row by row with the remaining tier capacities.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.model.errors import FillInfeasible, UniformBetaRequired
from src.model.hit_probability import hit_probability
from src.model.interference import interference_terms
from src.model.types import NetworkModel, PlacementMatrix
from src.placement.projected_gradient import solve_convex_uniform
from src.placement.report import SolverReport
from src.placement.single_tier import PopularityLike, _as_vector, solve_opp

logger = logging.getLogger(__name__)

IDENTITY_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class WeightedSumSolution:
    """Optimal tier-weighted placement sums of the relaxed problem.

    Attributes:
        g: weighted sum sum_k p_mk z_k of every file
        multiplier: Lagrange multiplier eta* of the pooled capacity
        thresholds: (T0', T1') popularity thresholds
        total_weight: sum_k z_k, the largest possible g_m
        budget: sum_k C_k z_k, the pooled weighted capacity
        iterations: bisection steps used
    """

    g: np.ndarray
    multiplier: float
    thresholds: Tuple[float, float]
    total_weight: float
    budget: float
    iterations: int = 0

    @property
    def levels(self) -> np.ndarray:
        return self.g

    @property
    def upper(self) -> float:
        return self.total_weight


def _require_uniform(model: NetworkModel) -> None:
    if not model.has_uniform_sir():
        raise UniformBetaRequired(
            f"tiers have different SIR thresholds {model.sir_thresholds().tolist()}"
        )


def solve_uniform_relaxed(q: PopularityLike, model: NetworkModel) -> WeightedSumSolution:
    """Solve the relaxed problem over the weighted sums g.

    Raises:
        UniformBetaRequired: if the tiers' thresholds differ
    """
    _require_uniform(model)
    vec = _as_vector(q)
    model.check_capacities(vec.size)
    terms = interference_terms(model.tiers[0].sir_threshold, model.delta())
    z = model.weights()
    total = float(z.sum())
    budget = float(np.dot(model.capacities(), z))

    # w' = W * total and v' = V * total; dividing both by total rescales x to g / total
    sol = solve_opp(vec, budget, terms.w, terms.v * total, total)
    g = sol.x.copy()
    g.setflags(write=False)
    logger.debug(f"Relaxed uniform solve: eta*={sol.multiplier:.6g}, iterations={sol.iterations}")
    return WeightedSumSolution(g, sol.multiplier, sol.thresholds, total, budget, sol.iterations)


def sequential_fill(gsol: WeightedSumSolution, model: NetworkModel, q: PopularityLike) -> PlacementMatrix:
    """Realize the weighted sums row by row from the remaining tier capacities.

    Each file takes from tier k the share g_m / sum_{i>=m} g_i of the
    capacity C'_k that earlier files left over. Entries clipped at 1 pass
    their shortfall on to later tiers of the same row, and any shortfall left
    after the last tier is water-filled backward over unsaturated tiers.

    Raises:
        FillInfeasible: if a row cannot reach its weighted sum
    """
    vec = _as_vector(q)
    z = model.weights()
    num_files, num_tiers = vec.size, model.num_tiers
    g = np.array(gsol.g, dtype=float)
    if g.size != num_files:
        raise FillInfeasible(num_files - 1, float("nan"))

    remaining = model.capacities().astype(float)
    suffix = np.cumsum(g[::-1])[::-1]
    p = np.zeros((num_files, num_tiers))
    repaired = 0

    for m in range(num_files):
        if g[m] <= 0.0:
            continue
        # remaining weighted capacity equals suffix[m] when earlier rows were exact
        rest = float(np.dot(remaining, z))
        share = g[m] / rest if rest > 0 else 0.0
        caps = np.minimum(1.0, remaining)

        row = np.zeros(num_tiers)
        carry = 0.0
        for k in range(num_tiers):
            want = share * remaining[k] + carry / z[k]
            row[k] = min(want, caps[k])
            carry = (want - row[k]) * z[k]

        if carry > IDENTITY_ATOL * max(1.0, g[m]):
            repaired += 1
            for k in reversed(range(num_tiers)):
                room = caps[k] - row[k]
                if room <= 0.0:
                    continue
                add = min(room, carry / z[k])
                row[k] += add
                carry -= add * z[k]
                if carry <= 0.0:
                    break

        achieved = float(np.dot(row, z))
        if abs(achieved - g[m]) > IDENTITY_ATOL * max(1.0, g[m]):
            raise FillInfeasible(m, g[m] - achieved)

        p[m] = row
        remaining = np.maximum(remaining - row, 0.0)
        if suffix[m] > 0 and abs(rest - suffix[m]) > 1e-6 * max(1.0, suffix[m]):
            logger.debug(f"Row {m}: remaining weighted capacity {rest:.12g} drifted from {suffix[m]:.12g}")

    if repaired:
        logger.warning(f"Sequential fill needed the repair pass on {repaired} of {num_files} rows")
    return PlacementMatrix(p)


def solve_uniform(model: NetworkModel, q: PopularityLike) -> Tuple[PlacementMatrix, SolverReport]:
    """Optimal placement for a network whose tiers share one SIR threshold.

    Falls back to the projected-gradient solver when the sequential fill
    cannot realize the relaxed solution.
    """
    vec = _as_vector(q)
    num_files = vec.size
    if np.all(model.capacities() >= num_files):
        placement = PlacementMatrix.ones(num_files, model.num_tiers)
        return placement, SolverReport(hit_probability(model, placement, vec), 0, True, method="saturated")

    gsol = solve_uniform_relaxed(vec, model)
    try:
        placement = sequential_fill(gsol, model, vec)
        method = "sequential-fill"
        iterations = gsol.iterations
    except FillInfeasible as exc:
        logger.warning(f"{exc}; falling back to the projected-gradient solver")
        placement, fallback = solve_convex_uniform(model, vec)
        return placement, SolverReport(
            fallback.objective, gsol.iterations + fallback.iterations, fallback.converged,
            method="projected-gradient",
        )

    objective = hit_probability(model, placement, vec)
    logger.info(f"Uniform-threshold placement: hit probability {objective:.6f} after {iterations} bisection steps")
    return placement, SolverReport(objective, iterations, True, method=method)
