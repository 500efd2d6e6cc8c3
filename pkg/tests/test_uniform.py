"""
Unit tests for the uniform-threshold solver and the projected-gradient fallback.
"""

import numpy as np
import pytest

from src.model.errors import FillInfeasible, UniformBetaRequired
from src.model.hit_probability import hit_probability
from src.model.types import NetworkModel, PlacementMatrix, PopularityProfile, TierParams
from src.placement.projected_gradient import project_capped_simplex, solve_convex_uniform
from src.placement.single_tier import solve_single_tier
from src.placement.uniform import sequential_fill, solve_uniform, solve_uniform_relaxed


def random_uniform_instance(rng):
    """A network with 1-3 tiers sharing one threshold plus a popularity of 2-10 files."""
    num_files = int(rng.integers(2, 11))
    num_tiers = int(rng.integers(1, 4))
    beta = float(rng.uniform(0.2, 3.0))
    tiers = tuple(
        TierParams(
            float(rng.uniform(0.5, 20.0)),
            float(rng.uniform(0.5, 40.0)),
            beta,
            float(rng.uniform(0.2, num_files - 0.2)),
        )
        for _ in range(num_tiers)
    )
    model = NetworkModel(float(rng.uniform(2.5, 5.0)), tiers)
    q = PopularityProfile.from_weights(np.sort(rng.uniform(0.01, 1.0, size=num_files))[::-1])
    return model, q


class TestRelaxedSolution:
    """Test suite for the relaxed weighted-sum problem."""

    def test_pooled_budget(self, uniform_model, zipf20):
        """Test sum g = sum_k C_k z_k and 0 <= g <= sum z."""
        gsol = solve_uniform_relaxed(zipf20, uniform_model)
        z = uniform_model.weights()
        assert gsol.g.sum() == pytest.approx(float(np.dot(uniform_model.capacities(), z)), rel=1e-10)
        assert np.all((gsol.g >= 0) & (gsol.g <= z.sum() * (1 + 1e-12)))

    def test_requires_uniform_threshold(self, nonuniform_model, zipf20):
        """Test UniformBetaRequired on different thresholds."""
        with pytest.raises(UniformBetaRequired):
            solve_uniform_relaxed(zipf20, nonuniform_model)
        with pytest.raises(UniformBetaRequired):
            solve_uniform(nonuniform_model, zipf20)


class TestSequentialFill:
    """Test suite for realizing weighted sums."""

    def test_rows_reach_weighted_sums(self, uniform_model, zipf20):
        """Test sum_k p_mk z_k = g_m for every file."""
        gsol = solve_uniform_relaxed(zipf20, uniform_model)
        placement = sequential_fill(gsol, uniform_model, zipf20)
        achieved = placement.weighted_sums(uniform_model)
        for m in range(20):
            assert abs(achieved[m] - gsol.g[m]) <= 1e-8 * max(1.0, gsol.g[m])

    def test_columns_respect_capacities(self, uniform_model, zipf20):
        """Test sum_m p_mk <= C_k."""
        gsol = solve_uniform_relaxed(zipf20, uniform_model)
        placement = sequential_fill(gsol, uniform_model, zipf20)
        assert np.all(placement.column_sums() <= uniform_model.capacities() + 1e-8)

    def test_equal_sums_equal_objective(self, uniform_model):
        """Test that a different matrix with the same weighted sums scores the same."""
        model = uniform_model.with_tiers([
            TierParams(t.density, t.power, t.sir_threshold, c) for t, c in zip(uniform_model.tiers, (3.0, 2.0))
        ])
        q = PopularityProfile.from_weights(np.ones(6))
        p = sequential_fill(solve_uniform_relaxed(q, model), model, q).p
        z = model.weights()
        ratio = z[0] / z[1]
        # move mass between files 0 and 1 in opposite directions on the two tiers
        step = 0.5 * min(1.0 - p[0, 0], p[1, 0], p[0, 1] / ratio, (1.0 - p[1, 1]) / ratio)
        assert step > 1e-3
        other = p.copy()
        other[0] += [step, -step * ratio]
        other[1] -= [step, -step * ratio]
        alternative = PlacementMatrix(other)
        assert alternative.weighted_sums(model) == pytest.approx(PlacementMatrix(p).weighted_sums(model), abs=1e-12)
        assert alternative.column_sums() == pytest.approx(model.capacities(), abs=1e-8)
        assert hit_probability(model, alternative, q) == pytest.approx(
            hit_probability(model, PlacementMatrix(p), q), abs=1e-10
        )


class TestSolveUniform:
    """Test suite for solve_uniform."""

    def test_single_tier_reduces_to_single_tier_solver(self, zipf20):
        """Test that K = 1 reproduces the single-tier optimum."""
        model = NetworkModel(3.0, (TierParams(2.0, 4.0, 0.6, 6.5),))
        placement, report = solve_uniform(model, zipf20)
        expected = solve_single_tier(zipf20, 6.5, 0.6, model.delta())
        assert placement.p[:, 0] == pytest.approx(expected.p, abs=1e-8)
        assert report.method == "sequential-fill"

    def test_matches_projected_gradient(self):
        """Test 20 random instances against multi-start projected gradient.

        Sequential fills must realize the relaxed weighted sums row by row;
        every other instance must have gone through the fallback.
        """
        rng = np.random.default_rng(30)
        methods = []
        for _ in range(20):
            model, q = random_uniform_instance(rng)
            placement, report = solve_uniform(model, q)
            _, convex = solve_convex_uniform(model, q)
            methods.append(report.method)
            assert report.objective == pytest.approx(hit_probability(model, placement, q), rel=1e-12)
            assert report.objective - convex.objective <= 1e-5
            if report.method == "sequential-fill":
                g = solve_uniform_relaxed(q, model).g
                assert np.all(np.abs(placement.weighted_sums(model) - g) <= 1e-8 * np.maximum(1.0, g))
                assert report.objective >= convex.objective - 1e-9
            else:
                assert report.method == "projected-gradient"
                assert report.objective >= convex.objective - 1e-6
        assert "sequential-fill" in methods

    def test_saturated_capacities(self):
        """Test that C_k >= M in every tier caches everything."""
        q = PopularityProfile.from_weights([3.0, 2.0, 1.0])
        model = NetworkModel(3.0, (TierParams(1.0, 1.0, 1.0, 3.0), TierParams(5.0, 0.1, 1.0, 3.0)))
        placement, report = solve_uniform(model, q)
        assert np.all(placement.p == 1.0)
        assert report.method == "saturated"
        assert report.iterations == 0

    def test_symmetric_instance(self, uniform_model):
        """Test that equal popularity spreads each tier evenly."""
        model = uniform_model.with_tiers([
            TierParams(t.density, t.power, t.sir_threshold, 2.0) for t in uniform_model.tiers
        ])
        q = PopularityProfile.from_weights(np.ones(4))
        placement, _ = solve_uniform(model, q)
        assert placement.p == pytest.approx(np.full((4, 2), 0.5), abs=1e-8)

    def test_falls_back_to_projected_gradient(self, uniform_model, zipf20, mocker, caplog):
        """Test the fallback when the fill cannot realize the weighted sums."""
        mocker.patch("src.placement.uniform.sequential_fill", side_effect=FillInfeasible(0, 0.1))
        with caplog.at_level("WARNING"):
            placement, report = solve_uniform(uniform_model, zipf20)
        assert report.method == "projected-gradient"
        assert "falling back" in caplog.text
        assert np.all(placement.column_sums() <= uniform_model.capacities() + 1e-8)


class TestCappedSimplexProjection:
    """Test suite for project_capped_simplex."""

    def test_feasible_point_is_fixed(self):
        """Test that a feasible point projects onto itself."""
        x = np.array([0.2, 0.5, 0.1])
        assert project_capped_simplex(x, 1.0) == pytest.approx(x)

    def test_budget_binds(self):
        """Test the shift solution of an over-budget point."""
        y = project_capped_simplex(np.array([1.5, 0.9, 0.3]), 1.5)
        assert y.sum() == pytest.approx(1.5, abs=1e-12)
        assert y == pytest.approx([1.0, 0.5, 0.0], abs=1e-12)

    def test_zero_budget(self):
        """Test that a zero budget projects to the origin."""
        assert np.all(project_capped_simplex(np.array([0.4, 0.7]), 0.0) == 0.0)
