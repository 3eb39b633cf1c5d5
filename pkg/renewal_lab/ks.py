"""
Kolmogorov-Smirnov reports
One-sample KS statistics with the 1.63/sqrt(n) pass bar (alpha ~ 0.01)
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .error_models import ValidationFailure

logger = logging.getLogger(__name__)

KS_CRITICAL = 1.63


@dataclass(frozen=True)
class KsReport:
    """KS statistic against a reference CDF and its pass verdict"""
    statistic: float
    n: int
    threshold: float
    passed: bool

    def __post_init__(self):
        if self.passed != (self.statistic < self.threshold):
            raise ValueError("passed must equal statistic < threshold")

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["pass"] = payload.pop("passed")
        return payload


def default_threshold(n: int, critical: float = KS_CRITICAL) -> float:
    return critical / math.sqrt(n)


def ks_report(samples, cdf: Callable, threshold: Optional[float] = None) -> KsReport:
    """
    KS test of samples against a continuous reference CDF

    Args:
        samples: 1-d sample array
        cdf: Vectorized reference CDF
        threshold: Pass bar (default 1.63/sqrt(n))

    Returns:
        KsReport
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValidationFailure("KS test needs at least one sample")

    statistic = float(stats.kstest(samples, cdf).statistic)
    bar = default_threshold(samples.size) if threshold is None else float(threshold)
    report = KsReport(statistic=statistic, n=int(samples.size), threshold=bar, passed=statistic < bar)
    logger.debug(f"KS n={report.n} D={statistic:.5f} threshold={bar:.5f} pass={report.passed}")
    return report


def ks_uniform(samples, threshold: Optional[float] = None) -> KsReport:
    """KS test against U[0, 1)"""
    return ks_report(samples, stats.uniform.cdf, threshold)
