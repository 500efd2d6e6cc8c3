"""
Backhaul latency of requests that miss every cache.

Missed requests travel over a wired backhaul to a gateway; the mean delay
grows with the miss rate through the queueing term
1.28 * (1 - P) * lambda_b / lambda_g.
"""

import math

from src.model.errors import DomainError
from src.model.types import LatencyParams

QUEUEING_COEFFICIENT = 1.28


def backhaul_latency(hit_prob: float, params: LatencyParams) -> float:
    """Mean backhaul latency in milliseconds for a given hit probability.

    Args:
        hit_prob: Hit probability in [0, 1]
        params: Densities and delay constants (c1, c2 in milliseconds)

    Returns:
        (1-P)(1 + 1.28 (1-P) lambda_b/lambda_g) c1 + c2
    """
    if not (math.isfinite(hit_prob) and 0.0 <= hit_prob <= 1.0):
        raise DomainError(f"hit probability must lie in [0, 1], got {hit_prob}")
    miss = 1.0 - hit_prob
    return miss * (1.0 + QUEUEING_COEFFICIENT * miss * params.density_ratio) * params.c1 + params.c2
