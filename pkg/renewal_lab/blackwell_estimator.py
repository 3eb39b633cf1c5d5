"""
Blackwell window-count estimator
Monte Carlo estimates of the expected number of renewals in a window,
compared against the u/t reference value
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .distributions import DistributionSpec, NoiseSpec, ZERO_NOISE
from .error_models import ValidationFailure
from .process_engine import ObservationWindow, Realization, count_in, generate
from .streams import RandomStream
from .trials import TrialRunner
from .window_strategies import (
    WindowStrategy, covering_horizon, default_margin, place_window, required_horizon,
)

logger = logging.getLogger(__name__)

Z_95 = 1.96

CSV_COLUMNS = ["dist", "strategy", "u", "n_trials", "mean", "stderr", "ci_lo", "ci_hi", "target"]


@dataclass(frozen=True)
class CountEstimate:
    """Sample mean of per-trial window counts with a normal-approximation CI"""
    mean: float
    stderr: float
    n_trials: int
    ci95_lo: float
    ci95_hi: float
    target: float

    @classmethod
    def from_samples(cls, counts: np.ndarray, target: float) -> "CountEstimate":
        """
        Reduce an index-ordered buffer of per-trial counts

        Args:
            counts: One value per trial, in trial order
            target: Reference value u/t

        Returns:
            CountEstimate with stderr = sd(ddof=1)/sqrt(n)
        """
        counts = np.asarray(counts, dtype=float)
        n = counts.size
        if n < 2:
            raise ValidationFailure(f"n_trials must be at least 2, got {n}")

        mean = float(np.mean(counts))
        stderr = float(np.std(counts, ddof=1) / math.sqrt(n))
        half_width = Z_95 * stderr
        return cls(mean, stderr, n, mean - half_width, mean + half_width, float(target))

    def to_dict(self) -> dict:
        return asdict(self)


def verdict(estimate: CountEstimate, k_sigma: float = 5.0) -> bool:
    """
    Whether the estimate agrees with its target

    Passes iff |mean - target| <= k_sigma * stderr. A zero stderr passes
    only on exact equality.
    """
    gap = abs(estimate.mean - estimate.target)
    if estimate.stderr == 0.0:
        return gap == 0.0
    return gap <= k_sigma * estimate.stderr


def _check_trials(n_trials: int) -> None:
    if n_trials < 2:
        raise ValidationFailure(f"n_trials must be at least 2, got {n_trials}")


def sample_trial(
    spec: DistributionSpec,
    strat: WindowStrategy,
    u: float,
    seed: int,
    trial: int = 0,
    cell: int = 0
) -> Tuple[Realization, ObservationWindow]:
    """Window and realization of one trial on substream (seed, cell, trial), window drawn first"""
    stream = RandomStream.substream(seed, cell, trial)
    window = place_window(strat, u, stream)
    return generate(spec, covering_horizon(window.u2, spec.mean()), stream), window


def estimate_interval_count(
    spec: DistributionSpec,
    strat: WindowStrategy,
    u: float,
    n_trials: int,
    seed: int,
    threads: Optional[int] = None,
    cell: int = 0
) -> CountEstimate:
    """
    Estimate E[N(u1 -> u1 + u)] for windows placed by the strategy

    Every trial draws a fresh realization and a fresh window from its own
    substream (seed, cell, trial).

    Args:
        spec: Inter-arrival law
        strat: Window start rule
        u: Window length, u > 0
        n_trials: Independent trials, at least 2
        seed: Experiment seed
        threads: Worker threads (default from settings)
        cell: Grid cell index used in the substream path

    Returns:
        CountEstimate with target u/t

    Raises:
        HorizonOverflow: If a realization hits the event cap
    """
    _check_trials(n_trials)
    if not u > 0:
        raise ValidationFailure(f"Window length u must be positive, got {u}")

    t = spec.mean()
    logger.debug(f"u={u}: horizons up to {required_horizon(strat, u, t):g}")

    def trial(i: int) -> int:
        real, window = sample_trial(spec, strat, u, seed, i, cell)
        return count_in(real, window)

    counts = TrialRunner(threads).map_array(trial, n_trials, operation=f"window counts u={u}")
    estimate = CountEstimate.from_samples(counts, u / t)
    logger.info(f"u={u}: mean={estimate.mean:.6f} stderr={estimate.stderr:.6f} target={estimate.target:.6f}")
    return estimate


def estimate_mu(
    spec: DistributionSpec,
    s: float,
    n_trials: int,
    seed: int,
    threads: Optional[int] = None
) -> CountEstimate:
    """
    Estimate the renewal function mu(s) = E[N(s)]

    Args:
        spec: Inter-arrival law
        s: Time, s > 0
        n_trials: Independent trials
        seed: Experiment seed
        threads: Worker threads

    Returns:
        CountEstimate of events in (0, s], target s/t
    """
    _check_trials(n_trials)
    if not s > 0:
        raise ValidationFailure(f"s must be positive, got {s}")

    t = spec.mean()
    horizon = s + default_margin(t)
    window = ObservationWindow(0.0, s)

    def trial(i: int) -> int:
        return count_in(generate(spec, horizon, RandomStream.substream(seed, 0, i)), window)

    counts = TrialRunner(threads).map_array(trial, n_trials, operation=f"mu({s})")
    return CountEstimate.from_samples(counts, s / t)


def sweep(
    spec: DistributionSpec,
    strat: WindowStrategy,
    u_list: Sequence[float],
    n_trials: int,
    seed: int,
    threads: Optional[int] = None
) -> List[CountEstimate]:
    """One estimate per window length; cell index is the position in u_list"""
    if not u_list:
        raise ValidationFailure("u_list must not be empty")

    logger.info(f"Sweeping {len(u_list)} window length(s) for {spec.label()}")
    return [
        estimate_interval_count(spec, strat, u, n_trials, seed, threads=threads, cell=cell)
        for cell, u in enumerate(u_list)
    ]


def estimate_perturbed_deterministic(
    t: float,
    theta: float,
    u: float,
    start_noise: Optional[NoiseSpec],
    end_noise: Optional[NoiseSpec],
    n_trials: int,
    seed: int,
    threads: Optional[int] = None
) -> CountEstimate:
    """
    Deterministic process at k*t observed through a jittered window

    The window runs from V + eta1 to V + u + eta2 with V = theta * U and
    zero-mean jitters. The count is the signed lattice count
    floor(end/t) - floor(start/t), which is negative when the jitters
    swap the endpoints.

    Returns:
        CountEstimate with target u/t
    """
    _check_trials(n_trials)
    for name, value in (("t", t), ("theta", theta), ("u", u)):
        if not value > 0:
            raise ValidationFailure(f"{name} must be positive, got {value}")

    start_noise = start_noise or ZERO_NOISE
    end_noise = end_noise or ZERO_NOISE

    def trial(i: int) -> int:
        stream = RandomStream.substream(seed, 0, i)
        v = theta * float(stream.unit_uniform())
        start = v + float(start_noise.sample_many(stream, 1)[0])
        end = v + u + float(end_noise.sample_many(stream, 1)[0])
        return math.floor(end / t) - math.floor(start / t)

    counts = TrialRunner(threads).map_array(trial, n_trials, operation="perturbed deterministic")
    return CountEstimate.from_samples(counts, u / t)


def estimate_row(spec: DistributionSpec, strat: WindowStrategy, u: float, estimate: CountEstimate) -> dict:
    """CSV row in CSV_COLUMNS order"""
    return {
        "dist": spec.label(),
        "strategy": strat.label(),
        "u": u,
        "n_trials": estimate.n_trials,
        "mean": estimate.mean,
        "stderr": estimate.stderr,
        "ci_lo": estimate.ci95_lo,
        "ci_hi": estimate.ci95_hi,
        "target": estimate.target,
    }
