"""
Renewal Lab - Renewal process simulation and verification toolkit
"""

__version__ = "1.0.0"

from .blackwell_estimator import CountEstimate, estimate_interval_count, estimate_mu, sweep  # noqa: E402
from .distributions import DISTRIBUTION_ADAPTER, DistributionSpec  # noqa: E402
from .error_models import RenewalLabError  # noqa: E402
from .process_engine import ObservationWindow, Realization, generate  # noqa: E402
from .streams import RandomStream  # noqa: E402
from .window_strategies import STRATEGY_ADAPTER, WindowStrategy  # noqa: E402

__all__ = [
    "__version__",
    "CountEstimate",
    "DISTRIBUTION_ADAPTER",
    "DistributionSpec",
    "ObservationWindow",
    "RandomStream",
    "Realization",
    "RenewalLabError",
    "STRATEGY_ADAPTER",
    "WindowStrategy",
    "estimate_interval_count",
    "estimate_mu",
    "generate",
    "sweep",
]
