"""Exception hierarchy shared by the model, solvers, simulator and CLI."""

from typing import Optional


class CacheModelError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CacheModelError, ValueError):
    """An argument lies outside the domain of a function or type."""


class DimensionMismatch(CacheModelError, ValueError):
    """Popularity, placement and network disagree on M or K."""


class FileUncached(CacheModelError, ValueError):
    """The requested file is held by no tier, so association is undefined."""

    def __init__(self, file_index: int):
        super().__init__(f"file {file_index} has zero placement probability in every tier")
        self.file_index = file_index


class UniformBetaRequired(CacheModelError, ValueError):
    """A uniform-SIR solver was given tiers with different thresholds."""


class BracketError(CacheModelError, RuntimeError):
    """The multiplier bracket could not be validated."""


class FillInfeasible(CacheModelError, RuntimeError):
    """The weighted sums cannot be realized by a placement matrix."""

    def __init__(self, file_index: int, shortfall: float):
        super().__init__(
            f"sequential fill cannot reach the weighted sum of file {file_index} "
            f"(shortfall {shortfall:.3e})"
        )
        self.file_index = file_index
        self.shortfall = shortfall


class KRequired2(CacheModelError, ValueError):
    """Hybrid placement is only defined for a macro tier plus one small-cell tier."""


class ConfigParseError(CacheModelError):
    """The experiment file could not be read or is not valid YAML."""


class ConfigValidationError(CacheModelError, ValueError):
    """The experiment file parsed but a field is invalid."""

    def __init__(self, field_path: str, message: str, value: Optional[object] = None):
        super().__init__(f"{field_path}: {message}")
        self.field_path = field_path
        self.message = message
        self.value = value
