"""
Reference solver for the general (non-convex) placement problem.

Dual decomposition over the K capacity constraints: for a fixed price
vector mu the Lagrangian separates into one K-variable problem per file,

    max_{p in [0,1]^K}  q_m f(p) - mu . p,

solved by multi-start projected gradient plus every {0,1}^K corner. The
prices follow a normalized projected subgradient method on the dual. The
problem satisfies the time-sharing condition, so the dual bound is tight
in the limit; at desk scale the duality gap is reported, not enforced.

Primal recovery projects each price's per-file maximizers onto the
capacity sets and keeps the best, then polishes it with monotone projected
gradient ascent. Warm starts come from the per-tier sub-optimal placement
and the most-popular placement.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.baselines.policies import mpcp_placement
from src.model.hit_probability import gradient_from_arrays, objective_from_arrays, tier_interference
from src.model.types import NetworkModel, PlacementMatrix
from src.placement.projected_gradient import project_columns, projected_gradient_ascent
from src.placement.report import SolverReport
from src.placement.single_tier import PopularityLike, _as_vector
from src.placement.suboptimal import solve_nonuniform_suboptimal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceOptions:
    """Controls of the reference solver.

    Attributes:
        restarts: random starting points per file in the inner problem
        inner_iterations: projected-gradient steps per inner solve
        inner_step: base step length, divided by sqrt(iteration)
        outer_iterations: dual subgradient iterations
        gap_tol: relative duality gap regarded as converged
        seed: seed of the random restarts
        polish: run projected-gradient ascent on the recovered primal
    """

    restarts: int = 8
    inner_iterations: int = 500
    inner_step: float = 0.1
    outer_iterations: int = 200
    gap_tol: float = 1e-4
    seed: int = 0
    polish: bool = True


def _corner_patterns(num_tiers: int) -> np.ndarray:
    return np.array(list(itertools.product((0.0, 1.0), repeat=num_tiers)))


def _file_values(x: np.ndarray, z: np.ndarray, w: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-file hit term f(p) and its gradient for a stack (..., K) of rows."""
    s = x @ z
    denom = s[..., None] * w + v * z.sum()
    value = np.sum(x * z / denom, axis=-1)
    cross = np.sum(x * z * w / denom ** 2, axis=-1)
    grad = z / denom - z * cross[..., None]
    return value, grad


class _InnerSolver:
    """Maximizes q_m f(p) - mu . p for every file at once."""

    def __init__(self, q: np.ndarray, z: np.ndarray, w: np.ndarray, v: np.ndarray, options: ReferenceOptions):
        self.q = q
        self.z, self.w, self.v = z, w, v
        self.options = options
        self.active = q > 0
        num_files, num_tiers = q.size, z.size
        rng = np.random.default_rng(options.seed)
        corners = _corner_patterns(num_tiers)
        random_starts = rng.uniform(0.0, 1.0, size=(num_files, options.restarts, num_tiers))
        self.corners = np.broadcast_to(corners, (num_files,) + corners.shape)
        self.starts = np.concatenate([random_starts, self.corners], axis=1)

    def solve(self, mu: np.ndarray) -> Tuple[np.ndarray, float]:
        """Per-file maximizers (M x K) and the summed Lagrangian value."""
        q_safe = np.where(self.active, self.q, 1.0)
        price = mu[None, None, :] / q_safe[:, None, None]
        x = self.starts.copy()
        for t in range(1, self.options.inner_iterations + 1):
            _, grad = _file_values(x, self.z, self.w, self.v)
            x = np.clip(x + self.options.inner_step / np.sqrt(t) * (grad - price), 0.0, 1.0)

        candidates = np.concatenate([x, self.corners], axis=1)
        values, _ = _file_values(candidates, self.z, self.w, self.v)
        lagrangian = values - np.sum(price * candidates, axis=-1)
        best = np.argmax(lagrangian, axis=1)
        rows = candidates[np.arange(self.q.size), best]
        per_file = self.q * lagrangian[np.arange(self.q.size), best]
        rows[~self.active] = 0.0
        per_file[~self.active] = 0.0
        return rows, float(per_file.sum())


def _initial_prices(p: np.ndarray, q: np.ndarray, z, w, v) -> np.ndarray:
    """Prices matching the marginal gains of a warm-start placement."""
    grad = gradient_from_arrays(p, q, z, w, v)
    mu = np.zeros(z.size)
    for k in range(z.size):
        interior = (p[:, k] > 1e-9) & (p[:, k] < 1 - 1e-9)
        if np.any(interior):
            mu[k] = float(np.median(grad[interior, k]))
        else:
            uncached = p[:, k] <= 1e-9
            mu[k] = float(np.max(grad[uncached, k])) if np.any(uncached) else 0.0
    return np.maximum(mu, 0.0)


def _warm_starts(model: NetworkModel, q: np.ndarray) -> Sequence[np.ndarray]:
    suboptimal, _ = solve_nonuniform_suboptimal(model, q)
    return [np.array(suboptimal.p), np.array(mpcp_placement(model, q.size).p)]


def solve_reference(
    model: NetworkModel,
    q: PopularityLike,
    options: Optional[ReferenceOptions] = None,
) -> Tuple[PlacementMatrix, SolverReport]:
    """Best-found placement for the general problem by dual decomposition.

    Intended for small instances (tens of files, a handful of tiers). Never
    raises on non-convergence; the report's ``converged`` flag is False and
    ``duality_gap`` carries the remaining gap instead.
    """
    options = options or ReferenceOptions()
    vec = _as_vector(q)
    model.check_capacities(vec.size)
    w, v = tier_interference(model)
    z = model.weights()
    capacities = np.minimum(model.capacities(), vec.size)

    def objective(x):
        return objective_from_arrays(x, vec, z, w, v)

    warm = _warm_starts(model, vec)
    best_p = max(warm, key=objective)
    best_primal = objective(best_p)
    best_dual = np.inf

    inner = _InnerSolver(vec, z, w, v, options)
    mu = _initial_prices(best_p, vec, z, w, v)
    rho = 0.5 * float(vec.max())
    iterations = 0
    for t in range(1, options.outer_iterations + 1):
        iterations = t
        rows, lagrangian = inner.solve(mu)
        best_dual = min(best_dual, lagrangian + float(mu @ capacities))

        candidate = project_columns(rows, capacities)
        value = objective(candidate)
        if value > best_primal:
            best_p, best_primal = candidate, value

        if best_dual - best_primal <= options.gap_tol * max(best_dual, 1e-12):
            break
        subgradient = capacities - rows.sum(axis=0)
        norm = float(np.linalg.norm(subgradient))
        if norm == 0.0:
            break
        mu = np.maximum(mu - rho / np.sqrt(t) * subgradient / norm, 0.0)
        logger.debug(f"Dual iteration {t}: dual {best_dual:.8f}, primal {best_primal:.8f}, mu {mu}")

    if options.polish:
        polished = projected_gradient_ascent(
            objective,
            lambda x: gradient_from_arrays(x, vec, z, w, v),
            lambda x: project_columns(x, capacities),
            best_p,
        )
        if polished.value >= best_primal:
            best_p, best_primal = polished.x, polished.value

    gap = best_dual - best_primal
    converged = gap <= options.gap_tol * max(best_dual, 1e-12)
    if not converged:
        logger.warning(f"Reference solver stopped with duality gap {gap:.3e} after {iterations} dual iterations")
    else:
        logger.info(f"Reference solver: hit probability {best_primal:.6f}, duality gap {gap:.3e}")

    placement = PlacementMatrix(best_p)
    report = SolverReport(
        min(max(best_primal, 0.0), 1.0), iterations, bool(converged),
        method="dual-decomposition", duality_gap=float(gap),
    )
    return placement, report
