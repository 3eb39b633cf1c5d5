"""
Pytest configuration and shared fixtures for renewal_lab.
Provides common test setup, configuration, and hypothesis profiles.
"""

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from renewal_lab.distributions import (
    DiscreteAtoms, Deterministic, Exponential, Gamma, LogNormal, UniformInterval,
)
from tests.config import TestConfig

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile(
    "ci", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def test_config() -> TestConfig:
    """Load test configuration from environment or defaults."""
    return TestConfig()


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Fresh output directory for files written by a test."""
    path = tmp_path / "results"
    path.mkdir()
    return path


@pytest.fixture
def bimodal() -> DiscreteAtoms:
    """Half the gaps are 0 (simultaneous events), half are 20."""
    return DiscreteAtoms(atoms=[(0.0, 0.5), (20.0, 0.5)])


@pytest.fixture
def continuous_fixtures():
    """Non-arithmetic laws with their means."""
    return [
        Exponential(rate=1.0),
        UniformInterval(a=0.5, b=1.5),
        LogNormal(mu=-0.125, sigma=0.5),
        Gamma(shape=2.0, scale=0.5),
    ]


@pytest.fixture
def deterministic_ten() -> Deterministic:
    return Deterministic(t=10.0)


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "property: mark test as a property-based test"
    )
    config.addinivalue_line(
        "markers", "integration: mark test as an integration test"
    )
    config.addinivalue_line(
        "markers", "performance: mark test as an acceptance-scale run"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running"
    )


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers based on test location."""
    for item in items:
        # Add markers based on test file location
        if "property_tests" in str(item.fspath):
            item.add_marker(pytest.mark.property)
        elif "integration_tests" in str(item.fspath):
            item.add_marker(pytest.mark.integration)
        elif "performance_tests" in str(item.fspath):
            item.add_marker(pytest.mark.performance)
            item.add_marker(pytest.mark.slow)
        elif "unit_tests" in str(item.fspath):
            item.add_marker(pytest.mark.unit)
