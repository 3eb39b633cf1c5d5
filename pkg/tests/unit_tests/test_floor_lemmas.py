"""
Unit tests for the floor-expectation lemmas and the converse probe.
"""

import pytest

from renewal_lab.distributions import ZERO_NOISE, DiscreteNoise, GaussianNoise
from renewal_lab.error_models import ErrorCode, IntegerC, NonZeroMeanNoise, ValidationFailure
from renewal_lab.floor_lemmas import (
    FLOOR_CSV_COLUMNS, converse_probe, converse_violations, default_grid, floor_expectation_exact,
    floor_expectation_mc, floor_expectation_noisy, resolve_probe_cdf,
)


class TestExact:
    """Test E[floor(c - U)] = c - 1."""

    def test_non_integer(self):
        """Test the closed form."""
        assert floor_expectation_exact(2.3) == pytest.approx(1.3)
        assert floor_expectation_exact(-0.4) == pytest.approx(-1.4)

    def test_integer_boundary(self):
        """Test that integer c still returns c - 1 unless strict."""
        assert floor_expectation_exact(2.0) == 1.0
        with pytest.raises(IntegerC) as exc_info:
            floor_expectation_exact(2.0, strict=True)
        assert exc_info.value.code == ErrorCode.INTEGER_ARGUMENT


class TestMonteCarlo:
    """Test Monte Carlo floor expectations."""

    @pytest.mark.parametrize("c", [3.2, 0.5, -1.7])
    def test_matches_exact(self, c, test_config):
        """Test agreement with c - 1 within tolerance."""
        result = floor_expectation_mc(c, test_config.trials(20000), seed=test_config.seed)
        assert result.exact == pytest.approx(c - 1.0)
        assert result.error <= test_config.sigma_tolerance * result.stderr

    def test_truncation_breaks_identity_for_negative_arguments(self):
        """Test that rounding toward zero misses c - 1 when c - U < 0."""
        result = floor_expectation_mc(-0.4, 20000, seed=3, rounding="truncate")
        assert result.estimate == pytest.approx(-0.4, abs=0.03)
        assert result.error > 0.9

    def test_invalid_arguments(self):
        """Test draw count and rounding validation."""
        with pytest.raises(ValidationFailure):
            floor_expectation_mc(0.5, 99, seed=1)
        with pytest.raises(ValidationFailure):
            floor_expectation_mc(0.5, 1000, seed=1, rounding="ceil")

    def test_row(self):
        """Test the CSV row columns."""
        row = floor_expectation_mc(0.5, 100, seed=1).to_dict()
        assert set(FLOOR_CSV_COLUMNS) <= set(row)


class TestNoisy:
    """Test floor expectations under zero-mean noise."""

    def test_zero_noise_replays_plain_estimate(self):
        """Test that zero noise gives the plain Monte Carlo result exactly."""
        plain = floor_expectation_mc(1.37, 5000, seed=11)
        noisy = floor_expectation_noisy(1.37, ZERO_NOISE, 5000, seed=11)
        assert noisy == plain

    @pytest.mark.parametrize("noise", [
        GaussianNoise(sigma=1.0),
        DiscreteNoise(atoms=[(-0.5, 0.5), (0.5, 0.5)]),
    ])
    def test_zero_mean_noise_keeps_expectation(self, noise, test_config):
        """Test E[floor(c + eta - U)] = c - 1."""
        result = floor_expectation_noisy(0.7, noise, test_config.trials(20000), seed=test_config.seed)
        assert result.error <= test_config.sigma_tolerance * result.stderr

    @pytest.mark.parametrize("noise", [
        GaussianNoise(mu=0.5, sigma=1.0),
        DiscreteNoise(atoms=[(1.0, 1.0)]),
    ])
    def test_non_zero_mean_rejected(self, noise):
        """Test that biased noise raises NonZeroMeanNoise."""
        with pytest.raises(NonZeroMeanNoise):
            floor_expectation_noisy(0.7, noise, 1000, seed=1)


class TestConverseProbe:
    """Test the non-uniform converse probe."""

    def test_default_grid(self):
        """Test 0.01 .. 0.99."""
        grid = default_grid()
        assert len(grid) == 99
        assert grid[0] == 0.01
        assert grid[-1] == 0.99

    def test_uniform_has_no_violations(self):
        """Test that the uniform CDF satisfies the identity everywhere."""
        rows = converse_probe("uniform")
        assert all(row.lhs == pytest.approx(row.rhs) for row in rows)
        assert converse_violations(rows) == []

    def test_beta22_value(self):
        """Test E[floor(c - U')] for the Beta(2,2) CDF at c = 0.25."""
        (row,) = converse_probe("beta22", [0.25])
        assert row.lhs == pytest.approx(-0.84375)
        assert row.rhs == pytest.approx(-0.75)

    @pytest.mark.parametrize("name", ["beta22", "power2", "sqrt"])
    def test_non_uniform_laws_violate(self, name):
        """Test that every non-uniform probe law breaks the identity somewhere."""
        assert converse_violations(converse_probe(name))

    def test_beta22_fixed_point_not_flagged(self):
        """Test that c = 0.5, where F(c) = c, is not a violation."""
        violations = converse_violations(converse_probe("beta22"))
        assert 0.5 not in [row.c for row in violations]

    def test_callable_cdf(self):
        """Test that a custom CDF is accepted."""
        rows = converse_probe(lambda x: x ** 3, [0.5])
        assert rows[0].lhs == pytest.approx(-0.875)

    def test_invalid_inputs(self):
        """Test unknown names and out-of-range points."""
        with pytest.raises(ValidationFailure):
            resolve_probe_cdf("cauchy")
        with pytest.raises(ValidationFailure):
            converse_probe("uniform", [0.0, 0.5])
