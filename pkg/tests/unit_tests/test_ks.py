"""
Unit tests for Kolmogorov-Smirnov reports.
"""

import numpy as np
import pytest
from scipy import stats

from renewal_lab.error_models import ValidationFailure
from renewal_lab.ks import KS_CRITICAL, KsReport, default_threshold, ks_report, ks_uniform


class TestKsReport:
    """Test report construction and serialization."""

    def test_default_threshold(self):
        """Test 1.63 / sqrt(n)."""
        assert KS_CRITICAL == 1.63
        assert default_threshold(10000) == pytest.approx(0.0163)

    def test_inconsistent_verdict_rejected(self):
        """Test that passed must match statistic < threshold."""
        with pytest.raises(ValueError):
            KsReport(statistic=0.5, n=10, threshold=0.1, passed=True)

    def test_to_dict_uses_pass_key(self):
        """Test the JSON key for the verdict."""
        payload = KsReport(statistic=0.01, n=100, threshold=0.163, passed=True).to_dict()
        assert payload == {"statistic": 0.01, "n": 100, "threshold": 0.163, "pass": True}


class TestKsTests:
    """Test the one-sample tests."""

    def test_evenly_spread_points_pass(self):
        """Test that midpoints of a uniform grid have statistic 1/(2n)."""
        n = 1000
        report = ks_uniform((np.arange(n) + 0.5) / n)
        assert report.statistic == pytest.approx(0.5 / n)
        assert report.passed

    def test_wrong_law_fails(self):
        """Test that squared uniforms are not uniform."""
        samples = ((np.arange(2000) + 0.5) / 2000) ** 2
        assert not ks_uniform(samples).passed

    def test_explicit_threshold(self):
        """Test that an explicit bar replaces the default."""
        report = ks_report(np.array([0.1, 0.2, 0.3]), stats.uniform.cdf, threshold=0.99)
        assert report.threshold == 0.99
        assert report.passed

    def test_empty_samples_rejected(self):
        """Test that an empty sample is rejected."""
        with pytest.raises(ValidationFailure):
            ks_uniform([])
