"""
Monte Carlo simulation of the cache-enabled Poisson network.

One trial places each tier's BSs as a Poisson point process in a disc of
radius R around the typical user, marks each tier-k BS as holding the
requested file with probability p_mk, associates the user with the marked
BS of largest average received power P_k r^-alpha, draws exp(1) fading for
every BS and declares a hit when the serving SIR reaches the tier's
threshold.

Only the indicator "BS holds the requested file" is sampled. Correlation
between the cache contents of different files is not represented, which is
exact for one request per trial.

Far-field correction: BSs beyond R contribute interference I_far that is
independent of the window. Because the serving fade is exp(1),
P(SIR >= beta | window) = P(h >= s I_near) * E[exp(-s I_far)] with
s = beta r^alpha / P, so accepting a window hit with probability
L_far(s) = E[exp(-s I_far)] removes the interference truncation bias.
Marked BSs beyond R are not candidates for association, so a far BS
that would out-power the in-window server, or a window without any
marked BS, is still scored as a miss.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from src.model.errors import DimensionMismatch, DomainError
from src.model.types import NetworkModel, PlacementMatrix, PopularityProfile
from src.parallel.pool_manager import get_processing_pool
from src.simulation.estimator import SimEstimate, bernoulli_estimate, stratified_estimate
from src.simulation.streams import chunk_ranges, file_seed, trial_generator
from src.utils.runtime_detection import read_int_env

logger = logging.getLogger(__name__)

DEFAULT_EXPECTED_BS = 500
MIN_EXPECTED_BS = 100
DEFAULT_TRIALS_PER_CHUNK = 5000


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo controls.

    Attributes:
        region_radius: simulation disc radius in km
        trials: number of trials (split across files in stratified mode)
        seed: run seed; trial streams are keyed by (seed, trial)
        target_file: file index for conditional estimates
        far_field_correction: include the interference of BSs beyond the disc
        stratified: estimate sum_m q_m P_m per file instead of drawing requests
        workers: worker count for the trial pool (None: environment/CPU default)
    """

    region_radius: float
    trials: int
    seed: int = 0
    target_file: Optional[int] = None
    far_field_correction: bool = True
    stratified: bool = True
    workers: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.region_radius) and self.region_radius > 0):
            raise DomainError(f"region_radius must be > 0, got {self.region_radius}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be an integer >= 1, got {self.trials}")
        if self.seed < 0:
            raise DomainError(f"seed must be >= 0, got {self.seed}")


def default_region_radius(model: NetworkModel, min_expected: int = DEFAULT_EXPECTED_BS) -> float:
    """Disc radius (km) holding ``min_expected`` BSs of the sparsest tier on average."""
    return math.sqrt(min_expected / (math.pi * float(model.densities().min())))


def expected_counts(model: NetworkModel, radius: float) -> np.ndarray:
    return model.densities() * math.pi * radius ** 2


def check_window(model: NetworkModel, radius: float) -> None:
    """Warn when the sparsest tier has fewer than 100 BSs in the disc on average."""
    sparsest = float(expected_counts(model, radius).min())
    if sparsest < MIN_EXPECTED_BS:
        logger.warning(
            f"Simulation disc of radius {radius:.4g} km holds only {sparsest:.1f} BSs of the sparsest tier "
            f"on average (< {MIN_EXPECTED_BS}); truncation may bias the estimate"
        )


def far_field_laplace(s: float, model: NetworkModel, radius: float) -> float:
    """E[exp(-s I_far)] for the interference of all BSs beyond ``radius``.

    L = exp(-pi delta sum_j lambda_j (s P_j)^delta G(x_j)), x_j = s P_j / R^alpha,
    G(x) = x^(1-delta)/(1-delta) 2F1(1, 1-delta; 2-delta; -x).
    """
    delta = model.delta()
    exponent = 0.0
    for tier in model.tiers:
        sp = s * tier.power
        x = sp / radius ** model.path_loss_exponent
        g = x ** (1.0 - delta) / (1.0 - delta) * special.hyp2f1(1.0, 1.0 - delta, 2.0 - delta, -x)
        exponent += tier.density * sp ** delta * g
    return math.exp(-math.pi * delta * exponent)


def sample_realization(
    model: NetworkModel,
    placement: PlacementMatrix,
    m: int,
    cfg: SimConfig,
    trial_rng: np.random.Generator,
) -> bool:
    """One Bernoulli sample of the event "request for file m is a hit"."""
    radius = cfg.region_radius
    alpha = model.path_loss_exponent
    area = math.pi * radius ** 2

    powers: List[np.ndarray] = []
    distances: List[np.ndarray] = []
    marks: List[np.ndarray] = []
    tiers: List[np.ndarray] = []
    for k, tier in enumerate(model.tiers):
        count = trial_rng.poisson(tier.density * area)
        r = radius * np.sqrt(trial_rng.random(count))
        marked = trial_rng.random(count) < placement.p[m, k]
        powers.append(np.full(count, tier.power))
        distances.append(r)
        marks.append(marked)
        tiers.append(np.full(count, k))

    power = np.concatenate(powers)
    r = np.maximum(np.concatenate(distances), 1e-12)
    marked = np.concatenate(marks)
    tier_of = np.concatenate(tiers)
    fading = trial_rng.exponential(1.0, size=power.size)
    if not np.any(marked):
        return False

    mean_rx = power * r ** -alpha
    candidates = np.flatnonzero(marked)
    serving = candidates[np.argmax(mean_rx[candidates])]
    rx = mean_rx * fading
    interference = rx.sum() - rx[serving]
    k = int(tier_of[serving])
    beta = model.tiers[k].sir_threshold
    if rx[serving] < beta * interference:
        return False

    if cfg.far_field_correction:
        s = beta / mean_rx[serving]
        return bool(trial_rng.random() < far_field_laplace(s, model, radius))
    return True


def _sample_with_request(model, placement, q_cdf, cfg, rng) -> bool:
    m = int(np.searchsorted(q_cdf, rng.random(), side="right"))
    return sample_realization(model, placement, min(m, q_cdf.size - 1), cfg, rng)


def count_hits(
    model: NetworkModel,
    placement: PlacementMatrix,
    m: Optional[int],
    cfg: SimConfig,
    stream_seed: int,
    start: int,
    stop: int,
    q_cdf: Optional[np.ndarray] = None,
) -> int:
    """Hits over trials [start, stop) of one stream; picklable pool task.

    With ``m`` None each trial first draws the requested file from ``q_cdf``.
    """
    hits = 0
    for trial in range(start, stop):
        rng = trial_generator(stream_seed, trial)
        if m is None:
            hits += _sample_with_request(model, placement, q_cdf, cfg, rng)
        else:
            hits += sample_realization(model, placement, m, cfg, rng)
    return hits


def _run_tasks(model, placement, cfg: SimConfig, tasks: Sequence[Tuple], total_trials: int) -> Dict[int, int]:
    """Run (key, m, stream_seed, start, stop, q_cdf) tasks; returns summed hits per key."""
    chunk_size = read_int_env("TRIALS_PER_CHUNK", DEFAULT_TRIALS_PER_CHUNK)
    expanded = []
    for key, m, seed, start, stop, q_cdf in tasks:
        for lo, hi in chunk_ranges(stop - start, chunk_size):
            expanded.append((key, m, seed, start + lo, start + hi, q_cdf))

    totals = {}
    with get_processing_pool(max_workers=cfg.workers, item_count=total_trials) as pool:
        logger.debug(f"{total_trials} trials in {len(expanded)} chunks on a {pool.executor_type} pool")
        futures = [
            (key, pool.submit(count_hits, model, placement, m, cfg, seed, lo, hi, q_cdf))
            for key, m, seed, lo, hi, q_cdf in expanded
        ]
        for key, future in futures:
            totals[key] = totals.get(key, 0) + future.result()
    return totals


def _check_tiers(model: NetworkModel, placement: PlacementMatrix) -> None:
    if placement.num_tiers != model.num_tiers:
        raise DimensionMismatch(
            f"placement has {placement.num_tiers} tiers but the network has {model.num_tiers}"
        )


def simulate_conditional_hit(
    model: NetworkModel,
    placement: PlacementMatrix,
    m: int,
    cfg: SimConfig,
) -> SimEstimate:
    """Estimate the conditional hit probability of file m over ``cfg.trials`` trials."""
    _check_tiers(model, placement)
    if not 0 <= m < placement.num_files:
        raise DimensionMismatch(f"file index {m} outside [0, {placement.num_files})")
    check_window(model, cfg.region_radius)

    tasks = [(m, m, file_seed(cfg.seed, m), 0, cfg.trials, None)]
    hits = _run_tasks(model, placement, cfg, tasks, cfg.trials)[m]
    estimate = bernoulli_estimate(hits, cfg.trials)
    logger.info(f"File {m}: {hits}/{cfg.trials} hits, estimate {estimate.mean:.5f} +/- {estimate.stderr:.5f}")
    return estimate


def stratum_sizes(q: np.ndarray, trials: int) -> np.ndarray:
    """Trials per file in stratified mode: max(1, round(trials q_m)), zero for q_m = 0."""
    sizes = np.maximum(1, np.rint(trials * q)).astype(int)
    return np.where(q > 0, sizes, 0)


def simulate_hit(
    model: NetworkModel,
    placement: PlacementMatrix,
    q,
    cfg: SimConfig,
) -> SimEstimate:
    """Estimate the hit probability sum_m q_m P_m.

    Stratified mode (default) runs max(1, round(trials q_m)) trials per file
    on the file's own stream and combines them with weights q_m; direct mode
    draws the requested file inside each trial.
    """
    vec = q.q if isinstance(q, PopularityProfile) else np.asarray(q, dtype=float)
    if vec.size != placement.num_files:
        raise DimensionMismatch(f"popularity has {vec.size} files but placement has {placement.num_files} rows")
    _check_tiers(model, placement)
    check_window(model, cfg.region_radius)

    if not cfg.stratified:
        q_cdf = np.cumsum(vec)
        q_cdf[-1] = 1.0
        hits = _run_tasks(model, placement, cfg, [(0, None, cfg.seed, 0, cfg.trials, q_cdf)], cfg.trials)[0]
        estimate = bernoulli_estimate(hits, cfg.trials)
    else:
        sizes = stratum_sizes(vec, cfg.trials)
        tasks = [(m, m, file_seed(cfg.seed, m), 0, int(n), None) for m, n in enumerate(sizes) if n > 0]
        counts = _run_tasks(model, placement, cfg, tasks, int(sizes.sum()))
        hits = [counts.get(m, 0) for m in range(vec.size)]
        estimate = stratified_estimate(vec, hits, sizes)

    logger.info(
        f"Simulated hit probability {estimate.mean:.5f} +/- {estimate.stderr:.5f} "
        f"over {estimate.trials} trials ({'stratified' if cfg.stratified else 'direct'})"
    )
    return estimate
