"""
Domain value types for cache-enabled K-tier heterogeneous networks.

All types are immutable after construction: scalar fields live in frozen
dataclasses and array fields are stored as read-only numpy arrays, so the
values can be shared freely between threads and pickled to worker
processes.

Indexing is zero-based throughout the package: file ``m`` is row ``m`` of a
placement matrix and tier ``k`` is column ``k``.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from src.model.errors import DimensionMismatch, DomainError

# Tolerances for the type invariants
CAPACITY_ATOL = 1e-9
NORMALIZATION_ATOL = 1e-12
ENTRY_ATOL = 1e-12


def _readonly(values: Iterable[float], ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DomainError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


def dbm_to_watts(dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    """Convert a ratio in dB to a linear ratio."""
    return 10.0 ** (db / 10.0)


def linear_to_db(linear: float) -> float:
    return 10.0 * math.log10(linear)


def sir_from_rate(rate_bits_per_hz: float) -> float:
    """SIR threshold that supports a per-link spectral efficiency of ``rate`` bit/s/Hz."""
    if rate_bits_per_hz <= 0:
        raise DomainError(f"rate must be positive, got {rate_bits_per_hz}")
    return 2.0 ** rate_bits_per_hz - 1.0


@dataclass(frozen=True)
class TierParams:
    """Physical and caching parameters of one BS tier.

    Attributes:
        density: BSs per square kilometre
        power: transmit power in watts
        sir_threshold: linear SIR threshold for a successful delivery
        cache_capacity: files per BS (unit-size files); zero excludes the tier from placement
        name: optional label used in logs and results
    """

    density: float
    power: float
    sir_threshold: float
    cache_capacity: float
    name: str = ""

    def __post_init__(self):
        for attr in ("density", "power", "sir_threshold"):
            value = getattr(self, attr)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{attr} must be finite and > 0, got {value}")
        if not (math.isfinite(self.cache_capacity) and self.cache_capacity >= 0):
            raise DomainError(f"cache_capacity must be finite and >= 0, got {self.cache_capacity}")


@dataclass(frozen=True)
class NetworkModel:
    """Path-loss exponent plus the ordered list of tiers (tier 0 first)."""

    path_loss_exponent: float
    tiers: Tuple[TierParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if not (math.isfinite(self.path_loss_exponent) and self.path_loss_exponent > 2):
            raise DomainError(
                f"path_loss_exponent must be > 2 so that delta lies in (0, 1), got {self.path_loss_exponent}"
            )
        if len(self.tiers) == 0:
            raise DomainError("a network needs at least one tier")

    @property
    def num_tiers(self) -> int:
        return len(self.tiers)

    def delta(self) -> float:
        return 2.0 / self.path_loss_exponent

    def z(self, k: int) -> float:
        """Tier weight lambda_k * P_k**delta."""
        tier = self.tiers[k]
        return tier.density * tier.power ** self.delta()

    def weights(self) -> np.ndarray:
        return np.array([self.z(k) for k in range(self.num_tiers)])

    def densities(self) -> np.ndarray:
        return np.array([t.density for t in self.tiers])

    def powers(self) -> np.ndarray:
        return np.array([t.power for t in self.tiers])

    def sir_thresholds(self) -> np.ndarray:
        return np.array([t.sir_threshold for t in self.tiers])

    def capacities(self) -> np.ndarray:
        return np.array([t.cache_capacity for t in self.tiers])

    def has_uniform_sir(self, rtol: float = 1e-12) -> bool:
        betas = self.sir_thresholds()
        return bool(np.all(np.abs(betas - betas[0]) <= rtol * np.abs(betas[0])))

    def check_capacities(self, num_files: int) -> None:
        """Enforce C_k <= M once the library size is known."""
        for k, tier in enumerate(self.tiers):
            if tier.cache_capacity > num_files + CAPACITY_ATOL:
                raise DomainError(
                    f"tier {k} cache_capacity {tier.cache_capacity} exceeds the number of files {num_files}"
                )

    def with_tiers(self, tiers: Sequence[TierParams]) -> "NetworkModel":
        return NetworkModel(self.path_loss_exponent, tuple(tiers))


@dataclass(frozen=True, eq=False)
class PopularityProfile:
    """Request probabilities of M files, sorted by decreasing popularity."""

    q: np.ndarray

    def __post_init__(self):
        q = _readonly(self.q, 1, "popularity")
        if q.size == 0:
            raise DomainError("popularity needs at least one file")
        if np.any(q < 0) or np.any(q > 1):
            raise DomainError("popularity values must lie in [0, 1]")
        total = float(q.sum())
        if abs(total - 1.0) > NORMALIZATION_ATOL * max(1, q.size):
            raise DomainError(f"popularity must sum to 1, got {total!r}")
        if np.any(np.diff(q) > NORMALIZATION_ATOL):
            raise DomainError("popularity must be non-increasing in the file index")
        object.__setattr__(self, "q", q)

    @property
    def num_files(self) -> int:
        return int(self.q.size)

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "PopularityProfile":
        """Normalize non-negative weights (already in popularity order)."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise DomainError("popularity weights must be non-negative with a positive sum")
        return cls(w / w.sum())


@dataclass(frozen=True, eq=False)
class PlacementMatrix:
    """M x K placement probabilities; row m is a file, column k a tier."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        if p.ndim != 2 or p.size == 0:
            raise DimensionMismatch(f"placement must be an M x K matrix, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise DomainError("placement contains non-finite values")
        if np.any(p < -ENTRY_ATOL) or np.any(p > 1 + ENTRY_ATOL):
            raise DomainError("placement probabilities must lie in [0, 1]")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def num_files(self) -> int:
        return int(self.p.shape[0])

    @property
    def num_tiers(self) -> int:
        return int(self.p.shape[1])

    def column_sums(self) -> np.ndarray:
        return self.p.sum(axis=0)

    def weighted_sums(self, model: NetworkModel) -> np.ndarray:
        """Per-file sums sum_k p_mk z_k."""
        return self.p @ model.weights()

    def is_cached(self, m: int) -> bool:
        return bool(np.any(self.p[m] > 0))

    def validate_against(self, model: NetworkModel, num_files: Optional[int] = None) -> None:
        """Check dimensions and the per-tier capacity budgets."""
        if self.num_tiers != model.num_tiers:
            raise DimensionMismatch(
                f"placement has {self.num_tiers} tiers but the network has {model.num_tiers}"
            )
        if num_files is not None and self.num_files != num_files:
            raise DimensionMismatch(
                f"placement has {self.num_files} files but popularity has {num_files}"
            )
        sums = self.column_sums()
        for k, tier in enumerate(model.tiers):
            if sums[k] > tier.cache_capacity + CAPACITY_ATOL:
                raise DomainError(
                    f"tier {k} placement sum {sums[k]:.12g} exceeds cache capacity {tier.cache_capacity}"
                )

    @classmethod
    def zeros(cls, num_files: int, num_tiers: int) -> "PlacementMatrix":
        return cls(np.zeros((num_files, num_tiers)))

    @classmethod
    def ones(cls, num_files: int, num_tiers: int) -> "PlacementMatrix":
        return cls(np.ones((num_files, num_tiers)))


@dataclass(frozen=True)
class LatencyParams:
    """Wired-backhaul delay model parameters."""

    bs_density: float
    gateway_density: float
    c1: float
    c2: float

    def __post_init__(self):
        for attr in ("bs_density", "gateway_density", "c1", "c2"):
            value = getattr(self, attr)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{attr} must be finite and > 0, got {value}")

    @property
    def density_ratio(self) -> float:
        return self.bs_density / self.gateway_density
