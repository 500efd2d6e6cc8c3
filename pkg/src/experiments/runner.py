"""
Experiment runner: policies, sweeps, simulation checks and reports.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from tqdm import tqdm

from src.baselines.policies import hcp_placement, mpcp_placement
from src.experiments.config import (
    ExperimentConfig,
    SimulationSpec,
    apply_sweep,
    raise_validation_error,
    sweep_points,
)
from src.experiments.results import ResultRow
from src.model.hit_probability import (
    association_probabilities,
    conditional_hit_probabilities,
    hit_probability,
    tier_hit_contributions,
)
from src.model.latency import backhaul_latency
from src.model.types import NetworkModel, PlacementMatrix, PopularityProfile
from src.placement.reference import ReferenceOptions, solve_reference
from src.placement.report import SolverReport, classify_files, classify_levels
from src.placement.suboptimal import solve_nonuniform_suboptimal
from src.placement.uniform import solve_uniform, solve_uniform_relaxed
from src.simulation.ppp import simulate_conditional_hit, simulate_hit

logger = logging.getLogger(__name__)


def reference_options(cfg: ExperimentConfig) -> ReferenceOptions:
    spec = cfg.reference
    if spec is None:
        return ReferenceOptions()
    return ReferenceOptions(
        restarts=spec.restarts,
        inner_iterations=spec.inner_iterations,
        outer_iterations=spec.outer_iterations,
        seed=spec.seed,
    )


def build_placement(
    policy: str,
    model: NetworkModel,
    popularity: PopularityProfile,
    cfg: ExperimentConfig,
) -> Tuple[PlacementMatrix, Optional[SolverReport]]:
    """Placement matrix (and solver report, for optimized policies) of one policy."""
    if policy == "tlcp-uniform":
        return solve_uniform(model, popularity)
    if policy == "tlcp-suboptimal":
        return solve_nonuniform_suboptimal(model, popularity)
    if policy == "tlcp-reference":
        return solve_reference(model, popularity, reference_options(cfg))
    if policy == "mpcp":
        return mpcp_placement(model, popularity.num_files), None
    if policy == "hcp":
        return hcp_placement(model, popularity, cfg.hcp_interference_corrected), None
    if policy == "explicit-matrix":
        placement = PlacementMatrix(np.array(cfg.placement_matrix, dtype=float))
        placement.validate_against(model, popularity.num_files)
        return placement, None
    raise ValueError(f"unknown policy '{policy}'")


def with_overrides(
    cfg: ExperimentConfig,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    simulate: bool = False,
) -> ExperimentConfig:
    """Apply command-line overrides to the simulation section."""
    spec = cfg.simulation
    if spec is None and not (simulate or seed is not None or trials is not None):
        return cfg
    data = spec.model_dump() if spec is not None else {}
    if simulate:
        data["enabled"] = True
    if seed is not None:
        data["seed"] = seed
    if trials is not None:
        data["trials"] = trials
    if spec is None and not simulate:
        data["enabled"] = False
    try:
        spec = SimulationSpec(**data)
    except ValidationError as exc:
        raise_validation_error(exc, prefix="simulation")
    return cfg.model_copy(update={"simulation": spec})


def _point_rows(
    cfg: ExperimentConfig,
    sweep_value: Optional[float],
    simulate: bool,
    workers: Optional[int] = None,
) -> List[ResultRow]:
    model = cfg.network_model()
    popularity = cfg.popularity_profile()
    sim_cfg = cfg.sim_config(model, workers) if simulate else None
    latency = cfg.latency_params()

    results: Dict[str, Tuple[PlacementMatrix, float]] = {}
    for policy in sorted(set(cfg.policies)):
        placement, _ = build_placement(policy, model, popularity, cfg)
        results[policy] = (placement, hit_probability(model, placement, popularity))

    reference_value = None
    if cfg.reference is not None and cfg.reference.compare:
        if "tlcp-reference" in results:
            reference_value = results["tlcp-reference"][1]
        else:
            _, report = solve_reference(model, popularity, reference_options(cfg))
            reference_value = report.objective

    rows = []
    for policy, (placement, analytic) in results.items():
        simulated = stderr = None
        if sim_cfg is not None:
            if sim_cfg.target_file is not None:
                estimate = simulate_conditional_hit(model, placement, sim_cfg.target_file, sim_cfg)
            else:
                estimate = simulate_hit(model, placement, popularity, sim_cfg)
            simulated, stderr = estimate.mean, estimate.stderr
        gap = None
        if reference_value is not None and reference_value > 0:
            gap = (reference_value - analytic) / reference_value
        latency_ms = backhaul_latency(analytic, latency) if latency is not None else None
        rows.append(ResultRow(sweep_value, policy, analytic, simulated, stderr, gap, latency_ms))
    return rows


def run_experiment(
    cfg: ExperimentConfig,
    progress: bool = False,
    workers: Optional[int] = None,
) -> List[ResultRow]:
    """One row per (sweep value, policy), ordered by sweep index then policy name.

    Simulated columns are filled when the config carries an enabled
    ``simulation`` section.
    """
    simulate = cfg.simulation is not None and cfg.simulation.enabled
    points = sweep_points(cfg)
    rows: List[ResultRow] = []
    for value in tqdm(points, desc=cfg.name, disable=not progress or len(points) == 1):
        point_cfg = cfg if value is None else apply_sweep(cfg, cfg.sweep.parameter, value)
        rows.extend(_point_rows(point_cfg, value, simulate, workers))
    logger.info(f"Experiment '{cfg.name}' produced {len(rows)} rows over {len(points)} sweep points")
    return rows


def analyze_experiment(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Closed-form breakdown of every policy's placement: per file and per tier."""
    model = cfg.network_model()
    popularity = cfg.popularity_profile()
    latency = cfg.latency_params()
    document: Dict[str, Any] = {"name": cfg.name, "policies": []}
    for policy in sorted(set(cfg.policies)):
        placement, _ = build_placement(policy, model, popularity, cfg)
        conditional = conditional_hit_probabilities(model, placement)
        files = []
        for m in range(popularity.num_files):
            entry = {
                "file": m,
                "popularity": float(popularity.q[m]),
                "conditional_hit": float(conditional[m]),
                "tier_contributions": tier_hit_contributions(model, placement, m).tolist(),
            }
            if placement.is_cached(m):
                entry["association"] = association_probabilities(model, placement, m).tolist()
            files.append(entry)
        hit = hit_probability(model, placement, popularity)
        summary = {"policy": policy, "hit_probability": hit, "files": files}
        if latency is not None:
            summary["backhaul_latency_ms"] = backhaul_latency(hit, latency)
        document["policies"].append(summary)
    return document


def optimize_experiment(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Placement matrix, solver report and file ranges of every policy."""
    model = cfg.network_model()
    popularity = cfg.popularity_profile()
    document: Dict[str, Any] = {"name": cfg.name, "policies": []}
    for policy in sorted(set(cfg.policies)):
        placement, report = build_placement(policy, model, popularity, cfg)
        entry: Dict[str, Any] = {
            "policy": policy,
            "hit_probability": hit_probability(model, placement, popularity),
            "placement": placement.p.tolist(),
            "column_sums": placement.column_sums().tolist(),
            "tier_ranges": [
                [r.value for r in classify_levels(placement.p[:, k], 1.0)] for k in range(model.num_tiers)
            ],
        }
        if report is not None:
            entry["report"] = report.to_dict()
        if policy == "tlcp-uniform":
            relaxed = solve_uniform_relaxed(popularity, model)
            entry["weighted_sums"] = relaxed.g.tolist()
            entry["file_ranges"] = [r.value for r in classify_files(relaxed)]
        document["policies"].append(entry)
    return document
