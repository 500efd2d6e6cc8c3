"""
Reproducible random streams for Monte Carlo trials.

Every trial owns a counter-based Philox generator keyed by (seed, trial),
so a trial's draws do not depend on which worker runs it or in which order
chunks complete.
"""

from typing import List, Tuple

import numpy as np

SEED_MASK = (1 << 64) - 1


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial of the stream identified by ``seed``."""
    key = np.array([seed & SEED_MASK, trial & SEED_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def file_seed(seed: int, file_index: int) -> int:
    """64-bit stream seed for the trials of one file, derived from the run seed."""
    state = np.random.SeedSequence([seed & SEED_MASK, file_index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def chunk_ranges(trials: int, chunk_size: int) -> List[Tuple[int, int]]:
    """Split trial indices [0, trials) into half-open chunks."""
    chunk_size = max(1, int(chunk_size))
    return [(start, min(start + chunk_size, trials)) for start in range(0, trials, chunk_size)]
