"""
Unit tests for the domain value types and unit helpers.
"""

import numpy as np
import pytest

from src.model.errors import DimensionMismatch, DomainError
from src.model.types import (
    LatencyParams,
    NetworkModel,
    PlacementMatrix,
    PopularityProfile,
    TierParams,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    sir_from_rate,
    watts_to_dbm,
)


class TestUnits:
    """Test suite for unit conversions."""

    def test_dbm_to_watts(self):
        """Test the reference powers of the two tiers."""
        assert dbm_to_watts(30) == pytest.approx(1.0)
        assert dbm_to_watts(46) == pytest.approx(10 ** 1.6)
        assert watts_to_dbm(dbm_to_watts(46)) == pytest.approx(46.0)

    def test_db_to_linear(self):
        """Test dB to linear and back."""
        assert db_to_linear(0) == pytest.approx(1.0)
        assert db_to_linear(-4) == pytest.approx(10 ** -0.4)
        assert linear_to_db(db_to_linear(-2.0)) == pytest.approx(-2.0)

    def test_sir_from_rate(self):
        """Test beta = 2^R - 1."""
        assert sir_from_rate(1.0) == pytest.approx(1.0)
        assert sir_from_rate(2.0) == pytest.approx(3.0)
        with pytest.raises(DomainError):
            sir_from_rate(0.0)


class TestNetworkModel:
    """Test suite for TierParams and NetworkModel."""

    def test_tier_rejects_non_positive_fields(self):
        """Test field validation of a tier."""
        with pytest.raises(DomainError):
            TierParams(0.0, 1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            TierParams(1.0, 1.0, 1.0, -1.0)

    def test_path_loss_exponent_must_exceed_two(self):
        """Test that alpha = 2 is rejected."""
        with pytest.raises(DomainError):
            NetworkModel(2.0, (TierParams(1.0, 1.0, 1.0, 1.0),))

    def test_weights(self, uniform_model):
        """Test z_k = lambda_k P_k^delta."""
        z = uniform_model.weights()
        assert z[0] == pytest.approx((10 ** 1.6) ** (2 / 3))
        assert z[1] == pytest.approx(10.0)
        assert uniform_model.delta() == pytest.approx(2 / 3)

    def test_uniform_sir(self, uniform_model, nonuniform_model):
        """Test detection of a common threshold."""
        assert uniform_model.has_uniform_sir()
        assert not nonuniform_model.has_uniform_sir()

    def test_check_capacities(self, uniform_model):
        """Test that C_k > M is rejected."""
        uniform_model.check_capacities(20)
        with pytest.raises(DomainError):
            uniform_model.check_capacities(9)


class TestPopularityProfile:
    """Test suite for PopularityProfile."""

    def test_must_sum_to_one(self):
        """Test normalization check."""
        with pytest.raises(DomainError):
            PopularityProfile(np.array([0.5, 0.4]))

    def test_must_be_non_increasing(self):
        """Test ordering check."""
        with pytest.raises(DomainError):
            PopularityProfile(np.array([0.4, 0.6]))

    def test_from_weights(self):
        """Test normalization of raw weights."""
        profile = PopularityProfile.from_weights([3.0, 1.0])
        assert profile.q.tolist() == pytest.approx([0.75, 0.25])
        assert profile.num_files == 2

    def test_read_only(self):
        """Test that the stored array cannot be modified."""
        profile = PopularityProfile(np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            profile.q[0] = 1.0


class TestPlacementMatrix:
    """Test suite for PlacementMatrix."""

    def test_clips_rounding_noise(self):
        """Test that entries within 1e-12 of the box are clipped."""
        placement = PlacementMatrix(np.array([[1.0 + 1e-13, -1e-13]]))
        assert placement.p.tolist() == [[1.0, 0.0]]

    def test_rejects_out_of_range(self):
        """Test that probabilities outside [0, 1] raise."""
        with pytest.raises(DomainError):
            PlacementMatrix(np.array([[1.1]]))

    def test_vector_is_single_tier(self):
        """Test that a 1-D input becomes an M x 1 matrix."""
        placement = PlacementMatrix(np.array([0.2, 0.3]))
        assert placement.num_files == 2
        assert placement.num_tiers == 1

    def test_validate_against_capacity(self, uniform_model):
        """Test the per-tier capacity check."""
        placement = PlacementMatrix(np.ones((20, 2)))
        with pytest.raises(DomainError):
            placement.validate_against(uniform_model, 20)

    def test_validate_against_dimensions(self, uniform_model):
        """Test the tier and file count checks."""
        with pytest.raises(DimensionMismatch):
            PlacementMatrix(np.zeros((20, 3))).validate_against(uniform_model)
        with pytest.raises(DimensionMismatch):
            PlacementMatrix(np.zeros((5, 2))).validate_against(uniform_model, 20)

    def test_weighted_sums(self, uniform_model):
        """Test S_m = sum_k p_mk z_k."""
        placement = PlacementMatrix(np.array([[1.0, 0.5], [0.0, 0.0]]))
        z = uniform_model.weights()
        assert placement.weighted_sums(uniform_model).tolist() == pytest.approx([z[0] + 0.5 * z[1], 0.0])
        assert placement.is_cached(0)
        assert not placement.is_cached(1)


class TestLatencyParams:
    """Test suite for LatencyParams."""

    def test_density_ratio(self):
        """Test lambda_b / lambda_g."""
        assert LatencyParams(50.0, 5.0, 10.0, 100.0).density_ratio == pytest.approx(10.0)

    def test_rejects_zero_delay(self):
        """Test validation of the delay constants."""
        with pytest.raises(DomainError):
            LatencyParams(10.0, 1.0, 0.0, 100.0)
