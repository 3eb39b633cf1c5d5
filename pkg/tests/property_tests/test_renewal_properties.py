"""
Property-based tests for counting, determinization and analytic laws.
Integer-valued inter-arrivals and dyadic window ends keep every float
operation exact, so identities are checked with ==.
"""

import math
from fractions import Fraction
from functools import reduce

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from renewal_lab.blackwell_estimator import Z_95, CountEstimate
from renewal_lab.determinization import determinize, lattice_count
from renewal_lab.distributions import DiscreteAtoms, Exponential, UniformInterval
from renewal_lab.floor_lemmas import converse_probe, floor_expectation_exact
from renewal_lab.process_engine import ObservationWindow, Realization, age_and_residual, count_in
from renewal_lab.residual_analytics import length_biased_cdf, residual_cdf
from renewal_lab.streams import RandomStream
from renewal_lab.uniformity_and_span import detect_span, zm_exact_cdf
from renewal_lab.window_strategies import DeferredUniform, FixedStart, LargeUniform, required_horizon

inter_arrival_lists = st.lists(st.integers(min_value=0, max_value=30), min_size=1, max_size=40).filter(
    lambda gaps: sum(gaps) > 0
)


def quarter_points(upper: float, strict: bool = False):
    """Multiples of 1/4 in [0, upper], or [0, upper) when strict."""
    top = int(upper * 4) - (1 if strict else 0)
    return st.integers(min_value=0, max_value=top).map(lambda k: k / 4)


def windows_within(total: float):
    """Ordered pairs of quarter points inside [0, total]."""
    return st.tuples(quarter_points(total), quarter_points(total)).map(sorted)


class TestCountingProperties:
    """Properties of N(s) and window counts."""

    @given(gaps=inter_arrival_lists, data=st.data())
    def test_window_counts_are_additive(self, gaps, data):
        """Property: N(a -> c) = N(a -> b) + N(b -> c) for a <= b <= c."""
        real = Realization.from_inter_arrivals(gaps)
        a, b, c = sorted(data.draw(st.lists(quarter_points(real.last_event), min_size=3, max_size=3)))
        total = count_in(real, ObservationWindow(a, c))
        assert total == count_in(real, ObservationWindow(a, b)) + count_in(real, ObservationWindow(b, c))
        assert total >= 0

    @given(gaps=inter_arrival_lists, data=st.data())
    def test_age_plus_residual(self, gaps, data):
        """Property: A(s) + R(s) = T_{M+1} with A >= 0 and R > 0."""
        real = Realization.from_inter_arrivals(gaps)
        s = data.draw(quarter_points(real.last_event, strict=True))
        result = age_and_residual(real, s)
        assert result.age >= 0
        assert result.residual > 0
        assert result.age + result.residual == result.containing_interval
        assert result.index_M == real.events_up_to(s)


class TestDeterminizationProperties:
    """Properties of the determinization transform."""

    @given(gaps=inter_arrival_lists, t=st.integers(min_value=1, max_value=25), data=st.data())
    def test_modified_count_matches_lattice(self, gaps, t, data):
        """Property: N + floor(Y/t) - floor(X/t) counts lattice points in the shifted window."""
        real = Realization.from_inter_arrivals(gaps)
        u1, u2 = data.draw(windows_within(real.last_event))
        outcome = determinize(real, ObservationWindow(u1, u2), float(t))

        assert outcome.modified_count == lattice_count(outcome.u1_mod, outcome.u2_mod, float(t))
        assert outcome.delta == math.floor(outcome.age_end / t) - math.floor(outcome.age_start / t)
        assert outcome.original_count == outcome.count_N

    @given(a=st.integers(min_value=0, max_value=500), b=st.integers(min_value=0, max_value=500),
           t=st.integers(min_value=1, max_value=50))
    def test_lattice_count_floor_formula(self, a, b, t):
        """Property: the signed count is floor(b/t) - floor(a/t) in either order."""
        assert lattice_count(float(a), float(b), float(t)) == b // t - a // t


class TestAnalyticLawProperties:
    """Properties of distribution functions."""

    @given(m=st.floats(min_value=0.01, max_value=1000.0),
           xs=st.lists(st.floats(min_value=-0.5, max_value=1.5), min_size=2, max_size=20))
    def test_zm_cdf_is_a_distribution_function(self, m, xs):
        """Property: the Z_m CDF is nondecreasing with values in [0, 1]."""
        assume(abs(m - round(m)) > 1e-6)
        grid = np.sort(np.array(xs))
        values = zm_exact_cdf(m, grid)
        assert np.all(values >= 0.0)
        assert np.all(values <= 1.0 + 1e-12)
        assert np.all(np.diff(values) >= -1e-12)

    @given(rate=st.floats(min_value=0.05, max_value=20.0),
           xs=st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=2, max_size=20))
    def test_residual_and_length_biased_cdfs_exponential(self, rate, xs):
        """Property: stationary residual CDF equals the exponential CDF; both CDFs are monotone."""
        spec = Exponential(rate=rate)
        grid = np.sort(np.array(xs))
        residual = residual_cdf(spec, grid)
        np.testing.assert_allclose(residual, -np.expm1(-rate * grid), atol=1e-10)
        assert np.all(np.diff(length_biased_cdf(spec, grid)) >= -1e-12)

    @given(a=st.floats(min_value=0.0, max_value=10.0), width=st.floats(min_value=0.01, max_value=10.0),
           xs=st.lists(st.floats(min_value=0.0, max_value=25.0), min_size=2, max_size=20))
    def test_uniform_interval_residual_cdf(self, a, width, xs):
        """Property: the residual CDF is nondecreasing, in [0, 1] and 1 past b."""
        spec = UniformInterval(a=a, b=a + width)
        grid = np.sort(np.array(xs))
        values = residual_cdf(spec, grid)
        assert np.all((values >= 0.0) & (values <= 1.0))
        assert np.all(np.diff(values) >= -1e-12)
        assert residual_cdf(spec, a + width + 1.0) == pytest.approx(1.0)

    @given(c=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
    def test_floor_expectation_exact(self, c):
        """Property: E[floor(c - U)] = c - 1."""
        assert floor_expectation_exact(c) == c - 1.0

    @given(c=st.floats(min_value=0.001, max_value=0.999))
    def test_uniform_probe_has_no_gap(self, c):
        """Property: the converse probe is exact for the uniform law."""
        (row,) = converse_probe("uniform", [c])
        assert row.lhs == pytest.approx(row.rhs, abs=1e-15)


class TestSpanProperties:
    """Properties of exact span detection."""

    @settings(max_examples=50)
    @given(numerators=st.lists(st.integers(min_value=1, max_value=1000), min_size=1, max_size=5, unique=True),
           q=st.integers(min_value=1, max_value=50))
    def test_span_divides_every_atom(self, numerators, q):
        """Property: atoms n_i / q have span gcd(n_i) / q and a unit-modulus witness."""
        numerators = sorted(numerators)
        weight = 1.0 / len(numerators)
        spec = DiscreteAtoms(atoms=[(n / q, weight) for n in numerators])
        report = detect_span(spec, m_max=4)

        expected = Fraction(reduce(math.gcd, numerators), q)
        assert report.is_arithmetic
        assert report.span == pytest.approx(float(expected), rel=1e-12)
        assert report.witnesses
        assert all(w.modulus >= 1.0 - 1e-9 for w in report.witnesses)
        assert 0.0 <= report.shift_theta < 1.0


class TestEstimateAndStreamProperties:
    """Properties of count estimates, streams and horizons."""

    @given(counts=st.lists(st.integers(min_value=0, max_value=50), min_size=2, max_size=200),
           target=st.floats(min_value=0.0, max_value=50.0))
    def test_confidence_interval_brackets_mean(self, counts, target):
        """Property: ci95_lo <= mean <= ci95_hi with half-width 1.96 stderr."""
        estimate = CountEstimate.from_samples(np.array(counts), target)
        assert estimate.stderr >= 0.0
        assert estimate.ci95_lo <= estimate.mean <= estimate.ci95_hi
        assert estimate.ci95_hi - estimate.mean == pytest.approx(Z_95 * estimate.stderr, abs=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2**63 - 1),
           path=st.lists(st.integers(min_value=0, max_value=10**6), max_size=3))
    def test_unit_uniform_range(self, seed, path):
        """Property: every substream draws from (0, 1]."""
        draws = RandomStream(seed, tuple(path)).unit_uniform(64)
        assert np.all((draws > 0.0) & (draws <= 1.0))

    @given(strat=st.one_of(
        st.builds(FixedStart, m=st.floats(min_value=0.0, max_value=1e6)),
        st.builds(LargeUniform, theta=st.floats(min_value=1e-3, max_value=1e6)),
        st.builds(DeferredUniform, theta=st.floats(min_value=1e-3, max_value=1e6),
                  c=st.floats(min_value=0.0, max_value=1e6)),
    ), u=st.floats(min_value=0.0, max_value=1e4), mean=st.floats(min_value=1e-3, max_value=1e3))
    def test_horizon_covers_every_window(self, strat, u, mean):
        """Property: the horizon exceeds reach + u by at least 100."""
        assert required_horizon(strat, u, mean) >= strat.reach + u + 100.0
