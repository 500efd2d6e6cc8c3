"""
Benchmark placement policies: most-popular (MPCP) and hybrid (HCP).
"""

import logging
import math

import numpy as np

from src.model.errors import KRequired2
from src.model.interference import interference_terms
from src.model.types import NetworkModel, PlacementMatrix, PopularityProfile
from src.baselines.popularity import renormalized_tail
from src.placement.single_tier import solve_opp
from src.placement.suboptimal import inflated_offset

logger = logging.getLogger(__name__)

__all__ = [
    'most_popular_column',
    'mpcp_placement',
    'hcp_placement',
]


def most_popular_column(capacity: float, num_files: int) -> np.ndarray:
    """Cache the floor(C) most popular files, plus C - floor(C) of the next one."""
    column = np.zeros(num_files)
    full = min(int(math.floor(capacity)), num_files)
    column[:full] = 1.0
    fraction = capacity - math.floor(capacity)
    if full < num_files and fraction > 0:
        column[full] = fraction
    return column


def mpcp_placement(model: NetworkModel, num_files: int) -> PlacementMatrix:
    """Every BS of tier k caches its C_k most popular files."""
    model.check_capacities(num_files)
    columns = [most_popular_column(tier.cache_capacity, num_files) for tier in model.tiers]
    return PlacementMatrix(np.column_stack(columns))


def hcp_placement(
    model: NetworkModel,
    popularity: PopularityProfile,
    interference_corrected: bool = False,
) -> PlacementMatrix:
    """Macro tier caches the most popular files, the small tier optimizes the rest.

    Args:
        model: Two-tier network, tier 0 being the macro tier
        popularity: File popularity
        interference_corrected: Use V~ (interference from the macro tier folded
            in) instead of the plain single-tier V for the small-tier column

    Raises:
        KRequired2: if the network does not have exactly two tiers
    """
    if model.num_tiers != 2:
        raise KRequired2(f"hybrid placement needs exactly two tiers, got {model.num_tiers}")
    num_files = popularity.num_files
    model.check_capacities(num_files)

    macro = most_popular_column(model.tiers[0].cache_capacity, num_files)
    small = np.zeros(num_files)
    start = int(np.sum(macro >= 1.0))
    if start < num_files and not np.any(popularity.q[start:] > 0):
        # nothing left to optimize; fill the budget in index order
        budget = min(model.tiers[1].cache_capacity, num_files - start)
        small[start:] = most_popular_column(budget, num_files - start)
        logger.debug("Files outside the macro cache have zero popularity; small tier caches them in order")
    elif start < num_files:
        tail = renormalized_tail(popularity, start)
        small_tier = model.tiers[1]
        terms = interference_terms(small_tier.sir_threshold, model.delta())
        offset = inflated_offset(model, 1) if interference_corrected else terms.v
        budget = min(small_tier.cache_capacity, num_files - start)
        small[start:] = solve_opp(tail, budget, terms.w, offset, 1.0).x
    else:
        logger.debug("Macro tier caches every file; small-tier column stays empty")
    return PlacementMatrix(np.column_stack([macro, small]))
