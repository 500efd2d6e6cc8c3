"""Network model, interference functions and closed-form hit probability."""

from src.model.errors import (
    BracketError,
    CacheModelError,
    ConfigParseError,
    ConfigValidationError,
    DimensionMismatch,
    DomainError,
    FileUncached,
    FillInfeasible,
    KRequired2,
    UniformBetaRequired,
)
from src.model.hit_probability import (
    association_probability,
    conditional_hit_probability,
    hit_probability,
    serving_distance_pdf,
)
from src.model.latency import backhaul_latency
from src.model.types import (
    LatencyParams,
    NetworkModel,
    PlacementMatrix,
    PopularityProfile,
    TierParams,
)

__all__ = [
    'BracketError',
    'CacheModelError',
    'ConfigParseError',
    'ConfigValidationError',
    'DimensionMismatch',
    'DomainError',
    'FileUncached',
    'FillInfeasible',
    'KRequired2',
    'UniformBetaRequired',
    'association_probability',
    'conditional_hit_probability',
    'hit_probability',
    'serving_distance_pdf',
    'backhaul_latency',
    'LatencyParams',
    'NetworkModel',
    'PlacementMatrix',
    'PopularityProfile',
    'TierParams',
]
