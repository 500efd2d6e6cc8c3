"""
Per-tier decomposition for networks with different SIR thresholds.

Each tier is solved as a single-tier problem in which interference from
the other tiers is folded into an inflated offset
V~(beta_k) = V(beta_k) * sum_i z_i / z_k.
"""

import logging
from typing import Tuple

import numpy as np

from src.model.hit_probability import hit_probability
from src.model.interference import interference_terms
from src.model.types import NetworkModel, PlacementMatrix
from src.placement.report import SolverReport
from src.placement.single_tier import PopularityLike, _as_vector, solve_opp

logger = logging.getLogger(__name__)


def inflated_offset(model: NetworkModel, k: int) -> float:
    """V~ of tier k: V(beta_k) scaled by the tier's share of the total weight."""
    terms = interference_terms(model.tiers[k].sir_threshold, model.delta())
    z = model.weights()
    return terms.v * float(z.sum()) / float(z[k])


def solve_nonuniform_suboptimal(model: NetworkModel, q: PopularityLike) -> Tuple[PlacementMatrix, SolverReport]:
    """Column k is the single-tier optimum for (W(beta_k), V~(beta_k), C_k)."""
    vec = _as_vector(q)
    model.check_capacities(vec.size)
    delta = model.delta()
    columns = []
    iterations = 0
    for k, tier in enumerate(model.tiers):
        terms = interference_terms(tier.sir_threshold, delta)
        sol = solve_opp(vec, min(tier.cache_capacity, vec.size), terms.w, inflated_offset(model, k), 1.0)
        columns.append(sol.x)
        iterations += sol.iterations
        logger.debug(f"Tier {k}: multiplier {sol.multiplier:.6g}, thresholds {sol.thresholds}")

    placement = PlacementMatrix(np.column_stack(columns))
    objective = hit_probability(model, placement, vec)
    logger.info(f"Sub-optimal per-tier placement: hit probability {objective:.6f}")
    return placement, SolverReport(objective, iterations, True, method="per-tier")
