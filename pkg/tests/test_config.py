"""
Tests for loading and validating experiment files.
"""

import glob
import os

import pytest
import yaml

from src.experiments.config import (
    RATE_PARAMETER,
    apply_sweep,
    dump_config,
    load_config,
    parse_config_text,
    sweep_points,
    validate_config,
)
from src.model.errors import ConfigParseError, ConfigValidationError
from src.model.types import db_to_linear, dbm_to_watts

BASE = {
    "network": {
        "path_loss_exponent": 3,
        "tiers": [
            {"name": "macro", "power_dbm": 46, "sir_db": -4, "density_per_km2": 1, "cache_capacity": 10},
            {"name": "small", "power_dbm": 30, "sir_db": -2, "density_ratio": 10, "cache_capacity": 8},
        ],
    },
    "popularity": {"zipf": {"num_files": 20, "exponent": 0.8}},
    "policies": ["tlcp-suboptimal"],
}


def base_config(**overrides):
    data = yaml.safe_load(yaml.safe_dump(BASE))
    data.update(overrides)
    return data


class TestLoadConfig:
    """Test suite for load_config and parse_config_text."""

    def test_load_default(self, config_dir):
        """Test the shipped default experiment."""
        cfg = load_config(os.path.join(config_dir, "default.yaml"))
        assert cfg.name == "default"
        assert cfg.policies == ["tlcp-uniform", "mpcp", "hcp"]
        assert cfg.num_files() == 20
        assert cfg.network_model().has_uniform_sir()

    def test_every_shipped_config_loads(self, config_dir):
        """Test that every file under configs/ validates."""
        paths = sorted(glob.glob(os.path.join(config_dir, "*.yaml")))
        assert paths
        for path in paths:
            assert load_config(path).name

    def test_missing_file(self, tmp_path):
        """Test ConfigParseError for an unreadable path."""
        with pytest.raises(ConfigParseError):
            load_config(str(tmp_path / "absent.yaml"))

    def test_invalid_yaml(self, tmp_path):
        """Test ConfigParseError for malformed YAML."""
        path = tmp_path / "broken.yaml"
        path.write_text("network: [unclosed\n", encoding="utf-8")
        with pytest.raises(ConfigParseError):
            load_config(str(path))

    def test_round_trip(self):
        """Test that dumped YAML parses back to an equal configuration."""
        cfg = validate_config(base_config(latency={"density_ratio": 10, "c1_ms": 10, "c2_ms": 100}))
        assert parse_config_text(dump_config(cfg)) == cfg


class TestValidation:
    """Test suite for field-level validation errors."""

    def test_path_loss_exponent_two(self):
        """Test that alpha = 2 names its field."""
        data = base_config()
        data["network"]["path_loss_exponent"] = 2
        with pytest.raises(ConfigValidationError) as exc_info:
            validate_config(data)
        assert exc_info.value.field_path == "network.path_loss_exponent"

    def test_missing_popularity(self):
        """Test a missing section."""
        data = base_config()
        del data["popularity"]
        with pytest.raises(ConfigValidationError) as exc_info:
            validate_config(data)
        assert exc_info.value.field_path == "popularity"

    def test_both_popularity_sources(self):
        """Test that zipf and explicit are mutually exclusive."""
        data = base_config(popularity={"zipf": {"num_files": 2, "exponent": 1}, "explicit": [0.6, 0.4]})
        with pytest.raises(ConfigValidationError) as exc_info:
            validate_config(data)
        assert exc_info.value.field_path == "popularity"

    def test_unknown_field(self):
        """Test that unknown keys are rejected."""
        with pytest.raises(ConfigValidationError) as exc_info:
            validate_config(base_config(colour="blue"))
        assert exc_info.value.field_path == "colour"

    def test_capacity_above_library(self):
        """Test C_k > M."""
        data = base_config()
        data["network"]["tiers"][0]["cache_capacity"] = 25
        with pytest.raises(ConfigValidationError) as exc_info:
            validate_config(data)
        assert exc_info.value.field_path == "network"

    def test_unknown_sweep_parameter(self):
        """Test a sweep over a field that does not exist."""
        with pytest.raises(ConfigValidationError, match="does not name a config field"):
            validate_config(base_config(sweep={"parameter": "network.tiers.5.cache_capacity", "values": [1]}))

    def test_explicit_matrix_needs_matrix(self):
        """Test the cross-check between policy and placement_matrix."""
        with pytest.raises(ConfigValidationError):
            validate_config(base_config(policies=["explicit-matrix"]))

    def test_single_policy_string(self):
        """Test that a bare policy name becomes a one-element list."""
        assert validate_config(base_config(policies="mpcp")).policies == ["mpcp"]

    def test_not_a_mapping(self):
        """Test a YAML document that is a list."""
        with pytest.raises(ConfigValidationError) as exc_info:
            parse_config_text("- 1\n- 2\n")
        assert exc_info.value.field_path == "<root>"


class TestDomainObjects:
    """Test suite for unit conversion and sweeps."""

    def test_unit_conversion(self):
        """Test dBm to watts, dB to linear and density ratios."""
        model = validate_config(base_config()).network_model()
        assert model.powers()[0] == pytest.approx(dbm_to_watts(46))
        assert model.sir_thresholds()[1] == pytest.approx(db_to_linear(-2))
        assert model.densities().tolist() == pytest.approx([1.0, 10.0])

    def test_explicit_popularity_normalized(self):
        """Test an explicit popularity profile."""
        cfg = validate_config(base_config(popularity={"explicit": [0.5, 0.3, 0.2]}, network={
            "path_loss_exponent": 4,
            "tiers": [{"power_dbm": 30, "sir_linear": 1, "density_per_km2": 2, "cache_capacity": 1}],
        }))
        assert cfg.popularity_profile().q.tolist() == pytest.approx([0.5, 0.3, 0.2])

    def test_sweep_points(self):
        """Test sweep values and the single-point default."""
        assert sweep_points(validate_config(base_config())) == [None]
        cfg = validate_config(base_config(sweep={"parameter": "popularity.zipf.exponent", "values": [0.2, 0.4]}))
        assert sweep_points(cfg) == [0.2, 0.4]

    def test_apply_sweep_library_size(self):
        """Test that num_files sweeps become integers."""
        swept = apply_sweep(validate_config(base_config()), "popularity.zipf.num_files", 40.0)
        assert swept.num_files() == 40
        assert isinstance(swept.popularity.zipf.num_files, int)

    def test_apply_sweep_rate(self):
        """Test that a rate sweep replaces every tier's threshold by 2^R - 1."""
        swept = apply_sweep(validate_config(base_config()), RATE_PARAMETER, 2.0)
        assert swept.network_model().sir_thresholds().tolist() == pytest.approx([3.0, 3.0])

    def test_apply_sweep_invalid_value(self):
        """Test that an invalid swept value names the sweep point."""
        with pytest.raises(ConfigValidationError) as exc_info:
            apply_sweep(validate_config(base_config()), "network.tiers.0.cache_capacity", 30.0)
        assert exc_info.value.field_path.startswith("sweep[network.tiers.0.cache_capacity=30.0]")

    def test_sim_config(self, uniform_model):
        """Test that a disabled section yields no simulation and the radius defaults to 500 BSs."""
        assert validate_config(base_config()).sim_config(uniform_model) is None
        cfg = validate_config(base_config(simulation={"trials": 100, "seed": 2}))
        sim = cfg.sim_config(uniform_model, workers=2)
        assert sim.trials == 100
        assert sim.workers == 2
        assert uniform_model.densities().min() * 3.141592653589793 * sim.region_radius ** 2 == pytest.approx(500.0)
