"""
Solver reports and the three-range classification of files.
"""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from src.model.errors import DomainError

RANGE_ATOL = 1e-12


@dataclass(frozen=True)
class SolverReport:
    """Outcome of one placement solve.

    Attributes:
        objective: hit probability achieved by the returned matrix
        iterations: bisection steps, gradient steps or dual iterations spent
        converged: False when an iterative solver stopped at its iteration cap
        gap_vs_reference: relative gap to the reference solver, when computed
        method: short name of the algorithm that produced the matrix
        duality_gap: dual bound minus objective (reference solver only)
    """

    objective: float
    iterations: int
    converged: bool
    gap_vs_reference: Optional[float] = None
    method: str = ""
    duality_gap: Optional[float] = None

    def __post_init__(self):
        if not (0.0 <= self.objective <= 1.0 + 1e-12):
            raise DomainError(f"objective must lie in [0, 1], got {self.objective}")

    def with_gap(self, reference_objective: float) -> "SolverReport":
        """Copy of the report carrying the relative gap to a reference objective."""
        gap = 0.0 if reference_objective <= 0 else (reference_objective - self.objective) / reference_objective
        return SolverReport(
            objective=self.objective,
            iterations=self.iterations,
            converged=self.converged,
            gap_vs_reference=gap,
            method=self.method,
            duality_gap=self.duality_gap,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class FileRange(str, Enum):
    """Where a file falls in an optimal placement."""

    DISPENSABILITY = "dispensability"  # never cached
    DIVERSITY = "diversity"  # cached with probability strictly inside (0, 1)
    DENSIFICATION = "densification"  # cached everywhere


def classify_levels(levels: np.ndarray, upper: float) -> List[FileRange]:
    """Classify per-file placement levels against the range [0, upper]."""
    tol = RANGE_ATOL * max(1.0, upper)
    ranges = []
    for value in np.asarray(levels, dtype=float):
        if value <= tol:
            ranges.append(FileRange.DISPENSABILITY)
        elif value >= upper - tol:
            ranges.append(FileRange.DENSIFICATION)
        else:
            ranges.append(FileRange.DIVERSITY)
    return ranges


def classify_files(solution) -> List[FileRange]:
    """Three-range classification of a single-tier or weighted-sum solution."""
    return classify_levels(solution.levels, solution.upper)
