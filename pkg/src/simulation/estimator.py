"""
Monte Carlo estimates with normal-approximation confidence intervals.
"""

import math
from dataclasses import asdict, dataclass
from typing import Sequence, Tuple

import numpy as np

from src.model.errors import DimensionMismatch, DomainError

Z_95 = 1.959963984540054


@dataclass(frozen=True)
class SimEstimate:
    """Estimated probability with its standard error and 95% interval."""

    mean: float
    stderr: float
    trials: int
    ci95: Tuple[float, float]

    def __post_init__(self):
        lo, hi = self.ci95
        if not (lo <= self.mean <= hi):
            raise DomainError(f"confidence interval {self.ci95} does not contain the mean {self.mean}")
        if self.stderr < 0:
            raise DomainError(f"stderr must be >= 0, got {self.stderr}")

    def contains(self, value: float, sigmas: float = Z_95) -> bool:
        return abs(value - self.mean) <= sigmas * self.stderr

    def to_dict(self) -> dict:
        return asdict(self)


def _interval(mean: float, stderr: float) -> Tuple[float, float]:
    return max(0.0, mean - Z_95 * stderr), min(1.0, mean + Z_95 * stderr)


def bernoulli_estimate(hits: int, trials: int) -> SimEstimate:
    """Plain Bernoulli estimate: stderr = sqrt(mean (1 - mean) / trials)."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not 0 <= hits <= trials:
        raise DomainError(f"hits {hits} outside [0, {trials}]")
    mean = hits / trials
    stderr = math.sqrt(mean * (1.0 - mean) / trials)
    return SimEstimate(mean, stderr, trials, _interval(mean, stderr))


def stratified_estimate(weights: Sequence[float], hits: Sequence[int], trials: Sequence[int]) -> SimEstimate:
    """Combine per-stratum Bernoulli estimates with weights q_m.

    mean = sum q_m p_m and stderr = sqrt(sum q_m^2 p_m (1 - p_m) / n_m);
    strata with no trials must carry zero weight.
    """
    q = np.asarray(weights, dtype=float)
    h = np.asarray(hits, dtype=float)
    n = np.asarray(trials, dtype=float)
    if not (q.shape == h.shape == n.shape):
        raise DimensionMismatch("weights, hits and trials must have the same length")
    if np.any((n == 0) & (q > 0)):
        raise DomainError("every stratum with positive weight needs at least one trial")
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = np.where(n > 0, h / n, 0.0)
        variance = np.where(n > 0, q ** 2 * rates * (1.0 - rates) / n, 0.0)
    mean = float(min(max(np.dot(q, rates), 0.0), 1.0))
    stderr = float(math.sqrt(variance.sum()))
    return SimEstimate(mean, stderr, int(n.sum()), _interval(mean, stderr))
