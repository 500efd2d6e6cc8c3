"""
Experiment configuration: YAML file validated by pydantic models.

Physical quantities carry their unit in the field name (power_dbm, sir_db,
density_per_km2, region_radius_km, c1_ms). Conversion to watts and linear
ratios happens when the domain objects are built; ``to_dict`` re-serializes
with the original unit suffixes.

Example:

    network:
      path_loss_exponent: 3
      tiers:
        - {name: macro, power_dbm: 46, sir_db: -4, density_per_km2: 1, cache_capacity: 10}
        - {name: small, power_dbm: 30, sir_db: -4, density_ratio: 10, cache_capacity: 8}
    popularity:
      zipf: {num_files: 20, exponent: 0.8}
    policies: [tlcp-uniform, mpcp, hcp]
    sweep:
      parameter: popularity.zipf.exponent
      values: [0.2, 0.4, 0.6, 0.8, 1.0, 1.2]
"""

import copy
import logging
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.baselines.popularity import ZipfParams, zipf_popularity
from src.model.errors import ConfigParseError, ConfigValidationError, DomainError
from src.model.types import (
    LatencyParams,
    NetworkModel,
    PopularityProfile,
    TierParams,
    db_to_linear,
    dbm_to_watts,
    sir_from_rate,
)
from src.simulation.ppp import SimConfig, default_region_radius

logger = logging.getLogger(__name__)

PolicyName = Literal[
    "tlcp-uniform",
    "tlcp-suboptimal",
    "tlcp-reference",
    "mpcp",
    "hcp",
    "explicit-matrix",
]

RATE_PARAMETER = "network.rate_bits_per_hz"
POPULARITY_SUM_ATOL = 1e-6


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TierSpec(_Section):
    name: str = ""
    power_dbm: float
    sir_db: Optional[float] = None
    sir_linear: Optional[float] = Field(default=None, gt=0)
    density_per_km2: Optional[float] = Field(default=None, gt=0)
    density_ratio: Optional[float] = Field(default=None, gt=0)
    cache_capacity: float = Field(ge=0)

    @model_validator(mode="after")
    def _one_of_each(self):
        if self.sir_db is not None and self.sir_linear is not None:
            raise ValueError("give either sir_db or sir_linear, not both")
        if (self.density_per_km2 is None) == (self.density_ratio is None):
            raise ValueError("give exactly one of density_per_km2 or density_ratio")
        return self


class NetworkSpec(_Section):
    path_loss_exponent: float = Field(gt=2, description="alpha > 2 so that delta = 2/alpha lies in (0, 1)")
    rate_bits_per_hz: Optional[float] = Field(default=None, gt=0)
    tiers: List[TierSpec] = Field(min_length=1)

    @model_validator(mode="after")
    def _densities_and_thresholds(self):
        if self.tiers[0].density_per_km2 is None:
            raise ValueError("tier 0 needs density_per_km2; later tiers may use density_ratio")
        if self.rate_bits_per_hz is None:
            for k, tier in enumerate(self.tiers):
                if tier.sir_db is None and tier.sir_linear is None:
                    raise ValueError(f"tier {k} needs sir_db or sir_linear (or set rate_bits_per_hz)")
        return self


class ZipfSpec(_Section):
    num_files: int = Field(ge=1)
    exponent: float = Field(ge=0)


class PopularitySpec(_Section):
    zipf: Optional[ZipfSpec] = None
    explicit: Optional[List[float]] = None

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.zipf is None) == (self.explicit is None):
            raise ValueError("give exactly one popularity source: zipf or explicit")
        if self.explicit is not None:
            if len(self.explicit) == 0 or any(x < 0 for x in self.explicit):
                raise ValueError("explicit popularity must be a non-empty list of non-negative numbers")
            if abs(sum(self.explicit) - 1.0) > POPULARITY_SUM_ATOL:
                raise ValueError(f"explicit popularity must sum to 1, got {sum(self.explicit)!r}")
            if any(b > a for a, b in zip(self.explicit, self.explicit[1:])):
                raise ValueError("explicit popularity must be non-increasing")
        return self


class SweepSpec(_Section):
    parameter: str
    values: List[float] = Field(min_length=1)


class SimulationSpec(_Section):
    enabled: bool = True
    trials: int = Field(default=10000, ge=1)
    seed: int = Field(default=0, ge=0)
    region_radius_km: Optional[float] = Field(default=None, gt=0)
    target_file: Optional[int] = Field(default=None, ge=0)
    far_field_correction: bool = True
    stratified: bool = True


class LatencySpec(_Section):
    density_ratio: Optional[float] = Field(default=None, gt=0, description="BS density over gateway density")
    bs_density_per_km2: Optional[float] = Field(default=None, gt=0)
    gateway_density_per_km2: Optional[float] = Field(default=None, gt=0)
    c1_ms: float = Field(gt=0)
    c2_ms: float = Field(gt=0)

    @model_validator(mode="after")
    def _ratio_or_densities(self):
        absolute = self.bs_density_per_km2 is not None and self.gateway_density_per_km2 is not None
        if (self.density_ratio is None) == (not absolute):
            raise ValueError("give density_ratio or both bs_density_per_km2 and gateway_density_per_km2")
        return self


class ReferenceSpec(_Section):
    compare: bool = False
    restarts: int = Field(default=8, ge=1)
    inner_iterations: int = Field(default=500, ge=1)
    outer_iterations: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0)


class OutputSpec(_Section):
    path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"


class ExperimentConfig(_Section):
    """One experiment: network, popularity, policies and optional sweep/simulation."""

    name: str = "experiment"
    network: NetworkSpec
    popularity: PopularitySpec
    policies: List[PolicyName] = Field(min_length=1)
    placement_matrix: Optional[List[List[float]]] = None
    hcp_interference_corrected: bool = False
    sweep: Optional[SweepSpec] = None
    simulation: Optional[SimulationSpec] = None
    latency: Optional[LatencySpec] = None
    reference: Optional[ReferenceSpec] = None
    output: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("policies", mode="before")
    @classmethod
    def _single_policy(cls, value):
        return [value] if isinstance(value, str) else value

    @model_validator(mode="after")
    def _cross_checks(self):
        if "explicit-matrix" in self.policies and self.placement_matrix is None:
            raise ValueError("policy explicit-matrix needs placement_matrix")
        if self.sweep is not None and not _path_exists(self.to_dict(), self.sweep.parameter):
            raise ValueError(f"sweep parameter '{self.sweep.parameter}' does not name a config field")
        return self

    def num_files(self) -> int:
        if self.popularity.zipf is not None:
            return self.popularity.zipf.num_files
        return len(self.popularity.explicit)

    def network_model(self) -> NetworkModel:
        """Domain network with powers in watts, linear thresholds and densities in BSs/km^2."""
        base_density = self.network.tiers[0].density_per_km2
        tiers = []
        for spec in self.network.tiers:
            if self.network.rate_bits_per_hz is not None:
                sir = sir_from_rate(self.network.rate_bits_per_hz)
            elif spec.sir_linear is not None:
                sir = spec.sir_linear
            else:
                sir = db_to_linear(spec.sir_db)
            density = spec.density_per_km2 if spec.density_per_km2 is not None else base_density * spec.density_ratio
            tiers.append(TierParams(density, dbm_to_watts(spec.power_dbm), sir, spec.cache_capacity, spec.name))
        model = NetworkModel(self.network.path_loss_exponent, tuple(tiers))
        model.check_capacities(self.num_files())
        return model

    def popularity_profile(self) -> PopularityProfile:
        if self.popularity.zipf is not None:
            return zipf_popularity(ZipfParams(self.popularity.zipf.num_files, self.popularity.zipf.exponent))
        return PopularityProfile.from_weights(self.popularity.explicit)

    def sim_config(self, model: NetworkModel, workers: Optional[int] = None) -> Optional[SimConfig]:
        spec = self.simulation
        if spec is None or not spec.enabled:
            return None
        radius = spec.region_radius_km or default_region_radius(model)
        return SimConfig(
            region_radius=radius,
            trials=spec.trials,
            seed=spec.seed,
            target_file=spec.target_file,
            far_field_correction=spec.far_field_correction,
            stratified=spec.stratified,
            workers=workers,
        )

    def latency_params(self) -> Optional[LatencyParams]:
        spec = self.latency
        if spec is None:
            return None
        if spec.density_ratio is not None:
            return LatencyParams(spec.density_ratio, 1.0, spec.c1_ms, spec.c2_ms)
        return LatencyParams(spec.bs_density_per_km2, spec.gateway_density_per_km2, spec.c1_ms, spec.c2_ms)

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping with unit-suffixed keys, omitting unset optionals."""
        return self.model_dump(mode="json", exclude_none=True)


def _path_exists(data: Dict[str, Any], path: str) -> bool:
    if path == RATE_PARAMETER:
        return True
    node: Any = data
    for part in path.split("."):
        if isinstance(node, list):
            if not part.isdigit() or int(part) >= len(node):
                return False
            node = node[int(part)]
        elif isinstance(node, dict) and part in node:
            node = node[part]
        else:
            return False
    return not isinstance(node, (dict, list))


def _set_path(data: Dict[str, Any], path: str, value: Any) -> None:
    parts = path.split(".")
    node: Any = data
    for part in parts[:-1]:
        node = node[int(part)] if isinstance(node, list) else node.setdefault(part, {})
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def _integral(value: float) -> Union[int, float]:
    return int(value) if float(value).is_integer() else value


def raise_validation_error(exc: ValidationError, prefix: str = "") -> None:
    error = exc.errors()[0]
    path = ".".join(str(part) for part in error["loc"]) or "<root>"
    if prefix:
        path = f"{prefix}.{path}" if path != "<root>" else prefix
    raise ConfigValidationError(path, error["msg"], error.get("input")) from exc


def validate_config(data: Any) -> ExperimentConfig:
    """Validate a parsed mapping and check that the domain objects can be built."""
    if not isinstance(data, dict):
        raise ConfigValidationError("<root>", "experiment file must contain a mapping")
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise_validation_error(exc)
    try:
        cfg.network_model()
        cfg.popularity_profile()
    except DomainError as exc:
        raise ConfigValidationError("network", str(exc)) from exc
    return cfg


def load_config(path: str) -> ExperimentConfig:
    """Read and validate an experiment file.

    Raises:
        ConfigParseError: unreadable file or invalid YAML
        ConfigValidationError: a field is missing or invalid; ``field_path`` names it
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"invalid YAML in {path}: {exc}") from exc
    cfg = validate_config(data)
    logger.info(f"Loaded experiment '{cfg.name}' from {path} with policies {cfg.policies}")
    return cfg


def parse_config_text(text: str) -> ExperimentConfig:
    """Validate an experiment given as YAML (or JSON) text."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"invalid YAML: {exc}") from exc
    return validate_config(data)


def dump_config(cfg: ExperimentConfig) -> str:
    """YAML text that loads back to an equal configuration."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def apply_sweep(cfg: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    """Copy of ``cfg`` with the dotted ``parameter`` set to ``value``."""
    data = copy.deepcopy(cfg.to_dict())
    data.pop("sweep", None)
    if parameter == RATE_PARAMETER:
        for tier in data["network"]["tiers"]:
            tier.pop("sir_db", None)
            tier.pop("sir_linear", None)
    _set_path(data, parameter, _integral(value) if parameter.endswith("num_files") else value)
    try:
        return validate_config(data)
    except ConfigValidationError as exc:
        raise ConfigValidationError(f"sweep[{parameter}={value}].{exc.field_path}", exc.message, exc.value) from exc


def sweep_points(cfg: ExperimentConfig) -> List[Optional[float]]:
    if cfg.sweep is None:
        return [None]
    return list(cfg.sweep.values)


__all__ = [
    "ExperimentConfig",
    "PolicyName",
    "apply_sweep",
    "dump_config",
    "load_config",
    "parse_config_text",
    "sweep_points",
    "validate_config",
]
