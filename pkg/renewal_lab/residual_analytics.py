"""
Residual life analytics
Stationary residual and length-biased laws, residual sampling at placed
window starts, and the conditional-uniformity checks built on them
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional

import numpy as np

from .distributions import DistributionSpec
from .error_models import UnsupportedPoint, ValidationFailure
from .ks import KS_CRITICAL, KsReport, ks_report, ks_uniform
from .process_engine import age_and_residual, generate
from .streams import RandomStream
from .trials import TrialRunner
from .window_strategies import WindowStrategy, covering_horizon, place_start, required_horizon

logger = logging.getLogger(__name__)

__all__ = [
    "KsReport", "ResidualSampleSet", "BucketReport", "AtomFrequency",
    "residual_pdf", "residual_cdf", "length_biased_pdf", "length_biased_cdf",
    "sample_residuals", "conditional_uniformity_check", "ks_residuals", "ks_ages",
    "ks_containing", "atom_frequency_check", "residual_interarrival_gap", "straddle_fraction",
]

MIN_BUCKET_COUNT = 500
ATOM_MATCH_TOLERANCE = 1e-12
ATOM_SIGMA = 4.0
GAP_GRID_SIZE = 4001
GAP_UPPER_QUANTILE = 1.0 - 1e-6

RESIDUAL_CSV_COLUMNS = ["trial", "age", "residual", "containing_interval"]


@dataclass(frozen=True, eq=False)
class ResidualSampleSet:
    """
    Age, residual life and containing interval observed at window starts

    Attributes:
        residuals: Time from the window start to the next event
        ages: Time since the last event at or before the window start
        containing_intervals: Length of the inter-arrival that contains the start
        starts: The window starts u1 themselves
    """
    residuals: np.ndarray
    ages: np.ndarray
    containing_intervals: np.ndarray
    starts: np.ndarray

    def __post_init__(self):
        sizes = {len(self.residuals), len(self.ages), len(self.containing_intervals), len(self.starts)}
        if len(sizes) != 1:
            raise ValidationFailure(f"Residual sample columns have unequal lengths {sorted(sizes)}")

    def __len__(self) -> int:
        return len(self.residuals)

    def rows(self) -> Iterator[dict]:
        for i in range(len(self)):
            yield {
                "trial": i,
                "age": float(self.ages[i]),
                "residual": float(self.residuals[i]),
                "containing_interval": float(self.containing_intervals[i]),
            }


class BucketReport(NamedTuple):
    lo: float
    hi: float
    count: int
    report: Optional[KsReport]

    @property
    def skipped(self) -> bool:
        return self.report is None

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "count": self.count,
            "skipped": self.skipped,
            "ks": self.report.to_dict() if self.report else None,
        }


class AtomFrequency(NamedTuple):
    value: float
    observed: float
    expected: float
    stderr: float
    within: bool


def residual_pdf(spec: DistributionSpec, x: float) -> float:
    """
    Stationary residual density h(x) = P(T > x) / E(T)

    Args:
        spec: Inter-arrival law
        x: Point, x >= 0

    Returns:
        Density value
    """
    if x < 0:
        raise ValidationFailure(f"Residual density is defined for x >= 0, got {x}")
    return float(spec.survival(np.asarray(x, dtype=float)) / spec.mean())


def residual_cdf(spec: DistributionSpec, x):
    """Integral of residual_pdf over [0, x], i.e. E[min(T, x)] / E(T)"""
    x = np.asarray(x, dtype=float)
    values = (spec.partial_mean(x) + np.maximum(x, 0.0) * spec.survival(x)) / spec.mean()
    values = np.clip(values, 0.0, 1.0)
    return float(values) if values.ndim == 0 else values


def length_biased_pdf(spec: DistributionSpec, v: float) -> float:
    """
    Length-biased density v f(v) / E(T), or v p(v) / E(T) at an atom

    Raises:
        UnsupportedPoint: If v is neither an atom nor in the continuous support
    """
    if not v > 0:
        raise UnsupportedPoint(f"Length-biased law is evaluated at v > 0, got {v}")

    t = spec.mean()
    atoms = spec.atoms()
    if atoms:
        for value, prob in atoms:
            if abs(value - v) <= ATOM_MATCH_TOLERANCE * max(1.0, abs(value)):
                return value * prob / t
        raise UnsupportedPoint(f"{v} is not an atom of {spec.label()}")

    f = float(spec.density(np.asarray(v, dtype=float)))
    if f <= 0.0:
        raise UnsupportedPoint(f"{v} lies outside the support of {spec.label()}")
    return v * f / t


def length_biased_cdf(spec: DistributionSpec, v):
    """P(containing interval <= v) = E[T; T <= v] / E(T)"""
    values = np.asarray(spec.partial_mean(np.asarray(v, dtype=float)), dtype=float) / spec.mean()
    values = np.clip(values, 0.0, 1.0)
    return float(values) if values.ndim == 0 else values


def sample_residuals(
    spec: DistributionSpec,
    strat: WindowStrategy,
    n_trials: int,
    seed: int,
    threads: Optional[int] = None
) -> ResidualSampleSet:
    """
    Observe age, residual and containing interval at the window start

    Each trial draws u1 from the strategy, then a realization past
    u1 + margin, from substream (seed, 0, trial).

    Args:
        spec: Inter-arrival law
        strat: Window start rule; LargeUniform/DeferredUniform or a far FixedStart
        n_trials: Number of trials
        seed: Experiment seed
        threads: Worker threads

    Returns:
        ResidualSampleSet in trial order
    """
    if n_trials < 1:
        raise ValidationFailure(f"n_trials must be positive, got {n_trials}")

    mean = spec.mean()
    logger.debug(f"Residual sampling: horizons up to {required_horizon(strat, 0.0, mean):g}")

    def trial(i: int):
        stream = RandomStream.substream(seed, 0, i)
        u1 = place_start(strat, stream)
        observed = age_and_residual(generate(spec, covering_horizon(u1, mean), stream), u1)
        return observed.residual, observed.age, observed.containing_interval, u1

    rows = np.asarray(TrialRunner(threads).map(trial, n_trials, operation="residual sampling"), dtype=float)
    return ResidualSampleSet(rows[:, 0].copy(), rows[:, 1].copy(), rows[:, 2].copy(), rows[:, 3].copy())


def conditional_uniformity_check(
    samples: ResidualSampleSet,
    bucket_width: Optional[float] = None,
    exact_values: bool = False,
    min_count: int = MIN_BUCKET_COUNT,
    critical: float = KS_CRITICAL
) -> List[BucketReport]:
    """
    KS-test residual / containing_interval against U(0, 1) per bucket

    Buckets group samples by containing interval: exact values when
    exact_values is set (atom laws), otherwise bins [k w, (k+1) w).

    Args:
        samples: Residual samples
        bucket_width: Bin width w (default mean containing interval / 50)
        exact_values: Group by exact containing-interval value
        min_count: Buckets with fewer samples are reported as skipped
        critical: KS threshold is critical / sqrt(count)

    Returns:
        One BucketReport per populated bucket, in increasing order
    """
    if len(samples) == 0:
        raise ValidationFailure("Conditional uniformity check needs samples")

    lengths = samples.containing_intervals
    ratio = samples.residuals / lengths

    if exact_values:
        keys, inverse = np.unique(lengths, return_inverse=True)
        bounds = [(float(k), float(k)) for k in keys]
    else:
        width = bucket_width if bucket_width is not None else float(np.mean(lengths)) / 50.0
        if not width > 0:
            raise ValidationFailure(f"bucket_width must be positive, got {width}")
        keys, inverse = np.unique(np.floor(lengths / width).astype(np.int64), return_inverse=True)
        bounds = [(float(k * width), float((k + 1) * width)) for k in keys]

    reports = []
    for index, (lo, hi) in enumerate(bounds):
        members = ratio[inverse.ravel() == index]
        if members.size < min_count:
            reports.append(BucketReport(lo, hi, int(members.size), None))
            continue
        reports.append(BucketReport(lo, hi, int(members.size),
                                    ks_uniform(members, critical / math.sqrt(members.size))))

    tested = [r for r in reports if not r.skipped]
    logger.info(f"Conditional uniformity: {len(tested)} bucket(s) tested, "
                f"{sum(r.report.passed for r in tested)} passed, {len(reports) - len(tested)} skipped")
    return reports


def ks_residuals(samples: ResidualSampleSet, spec: DistributionSpec,
                 threshold: Optional[float] = None) -> KsReport:
    return ks_report(samples.residuals, lambda x: residual_cdf(spec, x), threshold)


def ks_ages(samples: ResidualSampleSet, spec: DistributionSpec,
            threshold: Optional[float] = None) -> KsReport:
    """Ages follow the same stationary law as residuals"""
    return ks_report(samples.ages, lambda x: residual_cdf(spec, x), threshold)


def ks_containing(samples: ResidualSampleSet, spec: DistributionSpec,
                  threshold: Optional[float] = None) -> KsReport:
    """KS of containing intervals against the length-biased law (continuous laws only)"""
    if spec.atoms():
        raise ValidationFailure(f"{spec.label()} has atoms; use atom_frequency_check")
    return ks_report(samples.containing_intervals, lambda v: length_biased_cdf(spec, v), threshold)


def atom_frequency_check(samples: ResidualSampleSet, spec: DistributionSpec,
                         k_sigma: float = ATOM_SIGMA) -> List[AtomFrequency]:
    """
    Compare containing-interval frequencies with v p(v) / E(T) per atom

    An atom passes when the observed frequency is within k_sigma binomial
    standard errors; a zero standard error requires exact agreement.
    """
    atoms = spec.atoms()
    if not atoms:
        raise ValidationFailure(f"{spec.label()} has no atoms")

    n = len(samples)
    t = spec.mean()
    results = []
    for value, prob in atoms:
        expected = value * prob / t
        hits = np.abs(samples.containing_intervals - value) <= ATOM_MATCH_TOLERANCE * max(1.0, value)
        observed = float(np.count_nonzero(hits)) / n
        stderr = math.sqrt(expected * (1.0 - expected) / n)
        within = observed == expected if stderr == 0.0 else abs(observed - expected) <= k_sigma * stderr
        results.append(AtomFrequency(value, observed, expected, stderr, within))
    return results


def residual_interarrival_gap(spec: DistributionSpec, grid_size: int = GAP_GRID_SIZE) -> float:
    """
    sup |F_residual(x) - F_T(x)| over [0, Q], Q the (1 - 1e-6) quantile

    Vanishes only for the exponential law.
    """
    upper = spec.quantile(GAP_UPPER_QUANTILE)
    grid = np.linspace(0.0, upper, grid_size)
    interarrival_cdf = 1.0 - spec.survival(grid)
    return float(np.max(np.abs(residual_cdf(spec, grid) - interarrival_cdf)))


def straddle_fraction(samples: ResidualSampleSet, theta: float) -> float:
    """Fraction of trials whose containing interval crosses theta"""
    if len(samples) == 0:
        raise ValidationFailure("straddle_fraction needs samples")
    previous_event = samples.starts - samples.ages
    next_event = samples.starts + samples.residuals
    return float(np.mean((previous_event < theta) & (next_event > theta)))
