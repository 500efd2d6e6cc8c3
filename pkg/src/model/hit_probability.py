"""
Closed-form hit probability of a cache-enabled K-tier network.

A user requesting file m associates with the strongest (largest
P_k r**-alpha) BS among those caching m. With tier weights
z_k = lambda_k * P_k**delta, the per-file weighted sum S_m = sum_k p_mk z_k
and the total weight Z = sum_k z_k, the conditional hit probability is

    P_m = sum_k p_mk z_k / (W_k S_m + V_k Z)

and the hit probability is sum_m q_m P_m. Only ratios z_k / Z enter, so the
result is invariant to a common scaling of all densities or all powers.

Distances passed to ``serving_distance_pdf`` are in the length unit whose
square is the area unit of the tier densities (km for BSs per km^2).
"""

import logging
import math
from typing import Sequence, Union

import numpy as np

from src.model.errors import DimensionMismatch, DomainError, FileUncached, UniformBetaRequired
from src.model.interference import interference_terms
from src.model.types import NetworkModel, PlacementMatrix, PopularityProfile

logger = logging.getLogger(__name__)

PopularityLike = Union[PopularityProfile, Sequence[float], np.ndarray]


def _popularity_vector(popularity: PopularityLike) -> np.ndarray:
    if isinstance(popularity, PopularityProfile):
        return popularity.q
    return np.asarray(popularity, dtype=float)


def _check_tiers(model: NetworkModel, placement: PlacementMatrix) -> None:
    if placement.num_tiers != model.num_tiers:
        raise DimensionMismatch(
            f"placement has {placement.num_tiers} tiers but the network has {model.num_tiers}"
        )


def _check_file(placement: PlacementMatrix, m: int) -> None:
    if not 0 <= m < placement.num_files:
        raise DimensionMismatch(f"file index {m} outside [0, {placement.num_files})")


def tier_interference(model: NetworkModel):
    """Per-tier (W_k, V_k) arrays for the model's SIR thresholds."""
    delta = model.delta()
    terms = [interference_terms(t.sir_threshold, delta) for t in model.tiers]
    w = np.array([t.w for t in terms])
    v = np.array([t.v for t in terms])
    return w, v


def association_probabilities(model: NetworkModel, placement: PlacementMatrix, m: int) -> np.ndarray:
    """Probability that a request for file m is served by each tier."""
    _check_tiers(model, placement)
    _check_file(placement, m)
    weighted = placement.p[m] * model.weights()
    total = weighted.sum()
    if total <= 0.0:
        raise FileUncached(m)
    return weighted / total


def association_probability(model: NetworkModel, placement: PlacementMatrix, m: int, k: int) -> float:
    """Association probability A_mk = p_mk z_k / sum_j p_mj z_j.

    Raises:
        FileUncached: if file m is cached in no tier
    """
    if not 0 <= k < model.num_tiers:
        raise DimensionMismatch(f"tier index {k} outside [0, {model.num_tiers})")
    return float(association_probabilities(model, placement, m)[k])


def serving_distance_pdf(model: NetworkModel, placement: PlacementMatrix, m: int, k: int, r: float) -> float:
    """Density of the distance to the serving tier-k BS, given association with tier k."""
    if r < 0:
        raise DomainError(f"distance must be >= 0, got {r}")
    a_mk = association_probability(model, placement, m, k)
    if a_mk <= 0.0:
        raise FileUncached(m)
    delta = model.delta()
    p_row = placement.p[m]
    dens = model.densities()
    ratio = (model.powers() / model.tiers[k].power) ** delta
    decay = math.pi * float(np.sum(p_row * dens * ratio))
    return 2.0 * math.pi * p_row[k] * dens[k] / a_mk * r * math.exp(-decay * r * r)


def _per_tier_terms(model: NetworkModel, placement: PlacementMatrix) -> np.ndarray:
    """M x K matrix of the summands p_mk z_k / (W_k S_m + V_k Z)."""
    _check_tiers(model, placement)
    w, v = tier_interference(model)
    z = model.weights()
    s = placement.p @ z
    denom = np.outer(s, w) + v * z.sum()
    numer = placement.p * z
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(numer > 0.0, numer / denom, 0.0)
    return terms


def tier_hit_contributions(model: NetworkModel, placement: PlacementMatrix, m: int) -> np.ndarray:
    """The K summands of the conditional hit probability of file m."""
    _check_file(placement, m)
    return _per_tier_terms(model, placement)[m]


def conditional_hit_probabilities(model: NetworkModel, placement: PlacementMatrix) -> np.ndarray:
    """Conditional hit probability of every file; uncached files give 0."""
    return np.clip(_per_tier_terms(model, placement).sum(axis=1), 0.0, 1.0)


def conditional_hit_probability(model: NetworkModel, placement: PlacementMatrix, m: int) -> float:
    _check_file(placement, m)
    return float(conditional_hit_probabilities(model, placement)[m])


def _check_popularity(q: np.ndarray, placement: PlacementMatrix) -> None:
    if q.ndim != 1 or q.size != placement.num_files:
        raise DimensionMismatch(
            f"popularity has {q.size} files but placement has {placement.num_files} rows"
        )


def hit_probability(model: NetworkModel, placement: PlacementMatrix, popularity: PopularityLike) -> float:
    """Average hit probability sum_m q_m P_m.

    Args:
        model: Network model
        placement: M x K placement matrix
        popularity: Request probabilities of the M files

    Returns:
        Hit probability in [0, 1]
    """
    q = _popularity_vector(popularity)
    _check_popularity(q, placement)
    value = float(q @ conditional_hit_probabilities(model, placement))
    return min(max(value, 0.0), 1.0)


def hit_probability_single_tier(model: NetworkModel, placement: PlacementMatrix, popularity: PopularityLike) -> float:
    """Single-tier fast path: sum_m q_m p_m / (W p_m + V)."""
    if model.num_tiers != 1:
        raise DimensionMismatch(f"single-tier formula needs K = 1, got K = {model.num_tiers}")
    _check_tiers(model, placement)
    q = _popularity_vector(popularity)
    _check_popularity(q, placement)
    terms = interference_terms(model.tiers[0].sir_threshold, model.delta())
    p = placement.p[:, 0]
    return float(np.sum(q * p / (terms.w * p + terms.v)))


def hit_probability_uniform(model: NetworkModel, placement: PlacementMatrix, popularity: PopularityLike) -> float:
    """Uniform-threshold fast path: sum_m q_m S_m / (W S_m + V Z)."""
    if not model.has_uniform_sir():
        raise UniformBetaRequired("all tiers must share one SIR threshold")
    _check_tiers(model, placement)
    q = _popularity_vector(popularity)
    _check_popularity(q, placement)
    terms = interference_terms(model.tiers[0].sir_threshold, model.delta())
    z = model.weights()
    s = placement.p @ z
    return float(np.sum(q * s / (terms.w * s + terms.v * z.sum())))


def objective_gradient(model: NetworkModel, placement: PlacementMatrix, popularity: PopularityLike) -> np.ndarray:
    """Gradient of the hit probability with respect to every p_mk.

    d/dp_mj = q_m z_j [1/(W_j S_m + V_j Z) - sum_k p_mk z_k W_k / (W_k S_m + V_k Z)**2]
    """
    _check_tiers(model, placement)
    q = _popularity_vector(popularity)
    _check_popularity(q, placement)
    w, v = tier_interference(model)
    z = model.weights()
    return gradient_from_arrays(placement.p, q, z, w, v)


def gradient_from_arrays(p: np.ndarray, q: np.ndarray, z: np.ndarray, w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Array form of ``objective_gradient`` used inside the iterative solvers."""
    s = p @ z
    denom = np.outer(s, w) + v * z.sum()
    cross = np.sum(p * z * w / denom ** 2, axis=1)
    return q[:, None] * z[None, :] * (1.0 / denom - cross[:, None])


def objective_from_arrays(p: np.ndarray, q: np.ndarray, z: np.ndarray, w: np.ndarray, v: np.ndarray) -> float:
    s = p @ z
    denom = np.outer(s, w) + v * z.sum()
    return float(q @ np.sum(p * z / denom, axis=1))
