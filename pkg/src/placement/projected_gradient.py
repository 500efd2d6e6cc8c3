"""
Projected-gradient ascent over placement matrices.

The feasible set is a product over tiers of capped simplices
{0 <= p_mk <= 1, sum_m p_mk <= C_k}; each column is projected by
bisection on the shift tau in clip(x - tau, 0, 1).
"""

import logging
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.model.hit_probability import gradient_from_arrays, objective_from_arrays, tier_interference
from src.model.types import NetworkModel, PlacementMatrix
from src.placement.report import SolverReport
from src.placement.single_tier import PopularityLike, _as_vector

logger = logging.getLogger(__name__)

PROJECTION_ITERATIONS = 100
ARMIJO_SIGMA = 1e-4


def project_capped_simplex(x: np.ndarray, budget: float, upper: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {0 <= y <= upper, sum(y) <= budget}."""
    x = np.asarray(x, dtype=float)
    clipped = np.clip(x, 0.0, upper)
    if clipped.sum() <= budget:
        return clipped
    if budget <= 0:
        return np.zeros_like(x)

    lo = float(np.min(x)) - upper
    hi = float(np.max(x))
    for _ in range(PROJECTION_ITERATIONS):
        tau = 0.5 * (lo + hi)
        used = np.clip(x - tau, 0.0, upper).sum()
        if used > budget:
            lo = tau
        else:
            hi = tau
        if hi - lo <= 1e-16 * max(1.0, abs(tau)):
            break
    return np.clip(x - hi, 0.0, upper)


def project_columns(p: np.ndarray, capacities: np.ndarray) -> np.ndarray:
    """Project every column of ``p`` onto its capped simplex."""
    out = np.empty_like(p, dtype=float)
    for k in range(p.shape[1]):
        out[:, k] = project_capped_simplex(p[:, k], float(capacities[k]))
    return out


class AscentResult(NamedTuple):
    x: np.ndarray
    value: float
    iterations: int
    converged: bool


def projected_gradient_ascent(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    project: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    max_iter: int = 5000,
    tol: float = 1e-12,
    step: float = 1.0,
) -> AscentResult:
    """Monotone projected-gradient ascent with Armijo backtracking.

    Args:
        objective: Function to maximize
        gradient: Its gradient
        project: Projection onto the feasible set
        x0: Starting point (projected before use)
        max_iter: Iteration cap
        tol: Stop when an accepted step moves no entry by more than this
        step: Initial step length

    Returns:
        AscentResult with the final point and whether the tolerance was met
    """
    x = project(np.asarray(x0, dtype=float))
    fx = objective(x)
    t = step
    for it in range(1, max_iter + 1):
        grad = gradient(x)
        while True:
            candidate = project(x + t * grad)
            move = candidate - x
            f_candidate = objective(candidate)
            if f_candidate >= fx + ARMIJO_SIGMA * float(np.sum(grad * move)) or t < 1e-20:
                break
            t *= 0.5
        if np.max(np.abs(move)) <= tol or f_candidate - fx <= 1e-16 * max(1.0, abs(fx)):
            if f_candidate >= fx:
                x, fx = candidate, f_candidate
            return AscentResult(x, fx, it, True)
        x, fx = candidate, f_candidate
        t *= 2.0
    return AscentResult(x, fx, max_iter, False)


def _starting_points(num_files: int, capacities: np.ndarray, restarts: int, rng: np.random.Generator):
    starts = [np.tile(np.minimum(capacities / num_files, 1.0), (num_files, 1))]
    ranks = np.arange(num_files)[:, None]
    starts.append(np.clip(capacities[None, :] - ranks, 0.0, 1.0))
    for _ in range(max(0, restarts - len(starts))):
        starts.append(rng.uniform(0.0, 1.0, size=(num_files, capacities.size)))
    return starts


def solve_convex_uniform(
    model: NetworkModel,
    q: PopularityLike,
    restarts: int = 4,
    seed: int = 0,
    max_iter: int = 5000,
    initial: Optional[Sequence[np.ndarray]] = None,
) -> Tuple[PlacementMatrix, SolverReport]:
    """Maximize the hit probability by multi-start projected-gradient ascent.

    Exact for a common SIR threshold, where the objective is concave; for
    other networks it returns a local optimum.
    """
    vec = _as_vector(q)
    w, v = tier_interference(model)
    z = model.weights()
    capacities = model.capacities()
    rng = np.random.default_rng(seed)

    def objective(x):
        return objective_from_arrays(x, vec, z, w, v)

    def gradient(x):
        return gradient_from_arrays(x, vec, z, w, v)

    def project(x):
        return project_columns(x, capacities)

    starts = list(initial or []) + _starting_points(vec.size, capacities, restarts, rng)
    best: Optional[AscentResult] = None
    total_iterations = 0
    for start in starts:
        result = projected_gradient_ascent(objective, gradient, project, start, max_iter=max_iter)
        total_iterations += result.iterations
        if best is None or result.value > best.value:
            best = result

    placement = PlacementMatrix(best.x)
    logger.debug(f"Projected-gradient solve: objective {best.value:.10f} from {len(starts)} starts")
    return placement, SolverReport(
        min(max(best.value, 0.0), 1.0), total_iterations, best.converged, method="projected-gradient"
    )
