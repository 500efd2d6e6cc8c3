"""
Content popularity models.
"""

import math
from dataclasses import dataclass

import numpy as np

from src.model.errors import DomainError
from src.model.types import PopularityProfile

__all__ = [
    'ZipfParams',
    'zipf_popularity',
    'renormalized_tail',
]


@dataclass(frozen=True)
class ZipfParams:
    """Truncated Zipf law over ``num_files`` files with exponent ``exponent``."""

    num_files: int
    exponent: float

    def __post_init__(self):
        if int(self.num_files) != self.num_files or self.num_files < 1:
            raise DomainError(f"num_files must be an integer >= 1, got {self.num_files}")
        if not (math.isfinite(self.exponent) and self.exponent >= 0):
            raise DomainError(f"Zipf exponent must be >= 0, got {self.exponent}")


def zipf_popularity(params: ZipfParams) -> PopularityProfile:
    """q_m = m^-gamma / sum_i i^-gamma for m = 1..M."""
    ranks = np.arange(1, int(params.num_files) + 1, dtype=float)
    weights = ranks ** -params.exponent
    return PopularityProfile(weights / weights.sum())


def renormalized_tail(popularity: PopularityProfile, start: int) -> PopularityProfile:
    """Popularity of files ``start..M-1`` conditioned on a request among them."""
    if not 0 <= start < popularity.num_files:
        raise DomainError(f"tail start {start} outside [0, {popularity.num_files})")
    return PopularityProfile.from_weights(popularity.q[start:])
