"""
Tests for the Zipf popularity model and the MPCP and HCP benchmark policies.
"""

import numpy as np
import pytest

from src.baselines.policies import hcp_placement, most_popular_column, mpcp_placement
from src.baselines.popularity import ZipfParams, renormalized_tail, zipf_popularity
from src.model.errors import DomainError, KRequired2
from src.model.hit_probability import hit_probability
from src.model.types import NetworkModel, PopularityProfile, TierParams
from src.placement.uniform import solve_uniform

GAMMAS = np.linspace(0.2, 1.2, 6)


def with_capacities(model, capacities):
    return model.with_tiers([
        TierParams(t.density, t.power, t.sir_threshold, c, t.name) for t, c in zip(model.tiers, capacities)
    ])


class TestZipf:
    """Test suite for the Zipf popularity law."""

    def test_normalized_and_ordered(self):
        """Test that the profile sums to 1 and is non-increasing."""
        q = zipf_popularity(ZipfParams(50, 0.8)).q
        assert q.sum() == pytest.approx(1.0)
        assert np.all(np.diff(q) <= 0)

    def test_zero_exponent_is_uniform(self):
        """Test gamma = 0."""
        assert zipf_popularity(ZipfParams(4, 0.0)).q == pytest.approx(np.full(4, 0.25))

    def test_ratio_of_ranks(self):
        """Test q_1 / q_2 = 2^gamma."""
        q = zipf_popularity(ZipfParams(10, 1.2)).q
        assert q[0] / q[1] == pytest.approx(2 ** 1.2)

    @pytest.mark.parametrize("num_files,exponent", [(0, 0.8), (2.5, 0.8), (10, -0.1)])
    def test_invalid_parameters(self, num_files, exponent):
        """Test DomainError on invalid parameters."""
        with pytest.raises(DomainError):
            ZipfParams(num_files, exponent)

    def test_renormalized_tail(self, zipf20):
        """Test conditioning on the files past the head."""
        tail = renormalized_tail(zipf20, 5)
        assert tail.num_files == 15
        assert tail.q.sum() == pytest.approx(1.0)
        assert tail.q[0] / tail.q[1] == pytest.approx(zipf20.q[5] / zipf20.q[6])
        with pytest.raises(DomainError):
            renormalized_tail(zipf20, 20)


class TestMostPopular:
    """Test suite for MPCP."""

    def test_fractional_capacity(self):
        """Test that C = 2.5 caches two files and half of the third."""
        assert most_popular_column(2.5, 5).tolist() == [1.0, 1.0, 0.5, 0.0, 0.0]

    def test_column_sums(self, uniform_model):
        """Test sum_m p_mk = C_k."""
        placement = mpcp_placement(uniform_model, 20)
        assert placement.column_sums() == pytest.approx(uniform_model.capacities())

    def test_capacity_above_library(self, uniform_model):
        """Test DomainError when C_k > M."""
        with pytest.raises(DomainError):
            mpcp_placement(uniform_model, 5)


class TestHybrid:
    """Test suite for HCP."""

    def test_requires_two_tiers(self, zipf20):
        """Test KRequired2 for K = 3."""
        tier = TierParams(1.0, 1.0, 1.0, 2.0)
        with pytest.raises(KRequired2):
            hcp_placement(NetworkModel(3.0, (tier, tier, tier)), zipf20)

    def test_macro_tier_caches_head(self, uniform_model, zipf20):
        """Test that the macro column holds the C1 most popular files."""
        placement = hcp_placement(uniform_model, zipf20)
        assert placement.p[:10, 0].tolist() == [1.0] * 10
        assert placement.p[10:, 0].tolist() == [0.0] * 10

    def test_small_tier_optimizes_tail(self, uniform_model, zipf20):
        """Test that the small column fills C2 among the remaining files."""
        placement = hcp_placement(uniform_model, zipf20)
        assert np.all(placement.p[:10, 1] == 0.0)
        assert placement.p[10:, 1].sum() == pytest.approx(8.0, abs=1e-8)

    def test_interference_corrected_variant(self, uniform_model, zipf20):
        """Test that the corrected offset changes the small-tier column only."""
        plain = hcp_placement(uniform_model, zipf20)
        corrected = hcp_placement(uniform_model, zipf20, interference_corrected=True)
        assert np.array_equal(plain.p[:, 0], corrected.p[:, 0])
        assert corrected.p[:, 1].sum() == pytest.approx(plain.p[:, 1].sum(), abs=1e-8)
        assert not np.allclose(plain.p[:, 1], corrected.p[:, 1], atol=1e-6)

    def test_macro_covers_library(self, network_factory):
        """Test an empty small-tier column when C1 = M."""
        model = network_factory(capacities=(5.0, 2.0))
        placement = hcp_placement(model, zipf_popularity(ZipfParams(5, 0.8)))
        assert np.all(placement.p[:, 1] == 0.0)

    def test_zero_popularity_tail(self, network_factory):
        """Test that files nobody requests still fill the small-tier budget."""
        model = network_factory(capacities=(2.0, 8.0))
        q = PopularityProfile(np.array([0.5, 0.5] + [0.0] * 18))
        placement = hcp_placement(model, q)
        assert placement.p[:2, 0].tolist() == [1.0, 1.0]
        assert placement.p[:2, 1].tolist() == [0.0, 0.0]
        assert placement.p[2:10, 1].tolist() == [1.0] * 8
        assert placement.column_sums() == pytest.approx([2.0, 8.0])
        assert 0.0 < hit_probability(model, placement, q) <= 1.0


class TestPolicyComparison:
    """Test suite comparing the optimal placement against the benchmarks."""

    def test_optimum_dominates_benchmarks(self, uniform_model):
        """Test TLCP >= MPCP and TLCP >= HCP over a range of Zipf exponents."""
        for gamma in GAMMAS:
            q = zipf_popularity(ZipfParams(20, gamma))
            _, report = solve_uniform(uniform_model, q)
            assert report.objective >= hit_probability(uniform_model, mpcp_placement(uniform_model, 20), q) - 1e-10
            assert report.objective >= hit_probability(uniform_model, hcp_placement(uniform_model, q), q) - 1e-10

    def test_non_decreasing_in_exponent(self, uniform_model):
        """Test that skewed popularity never lowers the optimal hit probability."""
        values = [solve_uniform(uniform_model, zipf_popularity(ZipfParams(20, g)))[1].objective for g in GAMMAS]
        assert all(b >= a - 1e-10 for a, b in zip(values, values[1:]))

    def test_benchmarks_non_decreasing_in_exponent(self, uniform_model):
        """Test that MPCP and HCP also gain from skewed popularity."""
        mpcp, hcp = [], []
        for gamma in GAMMAS:
            q = zipf_popularity(ZipfParams(20, gamma))
            mpcp.append(hit_probability(uniform_model, mpcp_placement(uniform_model, 20), q))
            hcp.append(hit_probability(uniform_model, hcp_placement(uniform_model, q), q))
        assert all(b >= a - 1e-10 for a, b in zip(mpcp, mpcp[1:]))
        assert all(b >= a - 1e-10 for a, b in zip(hcp, hcp[1:]))

    def test_gain_over_most_popular_shrinks(self, uniform_model):
        """Test that the optimum's lead over MPCP narrows as popularity gets more skewed."""
        gaps = []
        for gamma in GAMMAS:
            q = zipf_popularity(ZipfParams(20, gamma))
            _, report = solve_uniform(uniform_model, q)
            gaps.append(report.objective - hit_probability(uniform_model, mpcp_placement(uniform_model, 20), q))
        assert all(b <= a + 1e-10 for a, b in zip(gaps, gaps[1:]))

    def test_non_decreasing_in_macro_capacity(self, uniform_model, zipf20):
        """Test that a larger macro cache never hurts."""
        values = [
            solve_uniform(with_capacities(uniform_model, (c, 8.0)), zipf20)[1].objective for c in range(4, 17, 2)
        ]
        assert all(b >= a - 1e-10 for a, b in zip(values, values[1:]))

    def test_non_increasing_in_library_size(self, uniform_model):
        """Test that a larger library never raises the optimal hit probability."""
        values = [
            solve_uniform(uniform_model, zipf_popularity(ZipfParams(m, 0.8)))[1].objective for m in range(20, 101, 20)
        ]
        assert all(b <= a + 1e-10 for a, b in zip(values, values[1:]))
