"""
Determinization of a renewal realization
Maps a sampled trajectory and its observation window to the deterministic
process at k*t with shifted window endpoints, and checks that window
counts are preserved exactly per trial and on average
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .blackwell_estimator import CountEstimate, sample_trial
from .distributions import DistributionSpec
from .error_models import InvalidMean, ValidationFailure
from .process_engine import ObservationWindow, Realization, count_in
from .trials import TrialRunner
from .window_strategies import LargeUniform, WindowStrategy, required_horizon

logger = logging.getLogger(__name__)

# LargeUniform theta must be at least this many means
MIN_THETA_MEANS = 100.0

TRANSFORM_CSV_COLUMNS = ["trial", "orig_count", "mod_count", "delta", "X", "Y", "M", "N"]


@dataclass(frozen=True)
class TransformOutcome:
    """
    One trial of the determinization

    Attributes:
        original_count: Events of the sampled process in (u1, u2]
        modified_count: Signed lattice count over (u1_mod, u2_mod]; negative
            when Y is small and X large enough to reverse the shifted window
        delta: modified_count - original_count = floor(Y/t) - floor(X/t)
        u1_mod: M*t + X
        u2_mod: (M+N)*t + Y
        age_start: X = u1 - S_M
        age_end: Y = u2 - S_{M+N}
        t: Lattice spacing, the inter-arrival mean
        index_M: N(u1)
        count_N: original_count
    """
    original_count: int
    modified_count: int
    delta: int
    u1_mod: float
    u2_mod: float
    age_start: float
    age_end: float
    t: float
    index_M: int
    count_N: int


@dataclass(frozen=True)
class TransformCheck:
    """Aggregate of determinize over independent trials"""
    orig: CountEstimate
    mod: CountEstimate
    mean_delta: float
    delta_stderr: float
    p_exit: float
    p_enter: float
    frac_large_delta: float
    identity_violations: int
    rows: List[dict]

    def summary(self) -> dict:
        return {
            "orig": self.orig.to_dict(),
            "mod": self.mod.to_dict(),
            "mean_delta": self.mean_delta,
            "delta_stderr": self.delta_stderr,
            "p_exit": self.p_exit,
            "p_enter": self.p_enter,
            "frac_large_delta": self.frac_large_delta,
            "identity_violations": self.identity_violations,
        }


def lattice_count(u1_mod: float, u2_mod: float, t: float) -> int:
    """
    Signed count of lattice points k*t, k >= 1, by walking the lattice

    #{k : u1_mod < k*t <= u2_mod} for an ordered window. A reversed window
    (u2_mod < u1_mod) counts -#{k : u2_mod < k*t <= u1_mod}, so the result
    always equals floor(u2_mod/t) - floor(u1_mod/t) on nonnegative ends.
    """
    if not t > 0:
        raise InvalidMean(f"Lattice spacing must be positive, got {t}")
    if u2_mod < u1_mod:
        return -lattice_count(u2_mod, u1_mod, t)
    k = max(1, math.floor(u1_mod / t) - 1)
    count = 0
    while k * t <= u2_mod:
        if k * t > u1_mod:
            count += 1
        k += 1
    return count


def determinize(real: Realization, w: ObservationWindow, t: float) -> TransformOutcome:
    """
    Shift the window so the process becomes the lattice k*t

    With eps_i = T_i - t the endpoints move to u1 - sum_{i<=M} eps_i and
    u2 - sum_{i<=M+N} eps_i, which is M*t + X and (M+N)*t + Y. The
    modified count is computed on the integer lattice as
    N + floor(Y/t) - floor(X/t).

    Args:
        real: Sampled realization covering the window
        w: Observation window
        t: Mean of the generating law

    Returns:
        TransformOutcome

    Raises:
        InvalidMean: If t <= 0
        WindowBeyondHorizon: If the realization does not cover the window
    """
    if not t > 0:
        raise InvalidMean(f"Lattice spacing t must be positive, got {t}")

    original = count_in(real, w)
    index_m = real.events_up_to(w.u1)
    age_start = w.u1 - real.event_time(index_m)
    age_end = w.u2 - real.event_time(index_m + original)

    delta = math.floor(age_end / t) - math.floor(age_start / t)
    return TransformOutcome(
        original_count=original,
        modified_count=original + delta,
        delta=delta,
        u1_mod=index_m * t + age_start,
        u2_mod=(index_m + original) * t + age_end,
        age_start=age_start,
        age_end=age_end,
        t=t,
        index_M=index_m,
        count_N=original,
    )


def transform_expectation_check(
    spec: DistributionSpec,
    strat: WindowStrategy,
    u: float,
    n_trials: int,
    seed: int,
    threads: Optional[int] = None
) -> TransformCheck:
    """
    Run determinize on independent trials and compare the two processes

    Trials come from sample_trial on cell 0, as in estimate_interval_count,
    so the original counts replay exactly.

    Args:
        spec: Inter-arrival law
        strat: LargeUniform with theta >= 100 * mean
        u: Window length
        n_trials: Number of trials, at least 2
        seed: Experiment seed
        threads: Worker threads

    Returns:
        TransformCheck with both count estimates, boundary crossing
        probabilities P(X > t), P(Y > t) and per-trial rows
    """
    t = spec.mean()
    if not isinstance(strat, LargeUniform) or strat.theta < MIN_THETA_MEANS * t:
        raise ValidationFailure(
            f"transform check needs large_uniform with theta >= {MIN_THETA_MEANS:g} * mean ({MIN_THETA_MEANS * t:g})"
        )
    if n_trials < 2:
        raise ValidationFailure(f"n_trials must be at least 2, got {n_trials}")

    logger.debug(f"Determinization u={u}: horizons up to {required_horizon(strat, u, t):g}")

    def trial(i: int) -> TransformOutcome:
        real, window = sample_trial(spec, strat, u, seed, i)
        return determinize(real, window, t)

    outcomes = TrialRunner(threads).map(trial, n_trials, operation="determinization")

    original = np.array([o.original_count for o in outcomes], dtype=float)
    modified = np.array([o.modified_count for o in outcomes], dtype=float)
    delta = modified - original
    age_start = np.array([o.age_start for o in outcomes])
    age_end = np.array([o.age_end for o in outcomes])

    violations = sum(lattice_count(o.u1_mod, o.u2_mod, t) != o.modified_count for o in outcomes)
    if violations:
        logger.warning(f"{violations} trial(s) where the lattice walk disagrees with the floor identity")

    frac_large = float(np.mean(np.abs(delta) > 1))
    if frac_large:
        logger.info(f"|delta| > 1 on {frac_large:.4%} of trials")

    rows = [
        {"trial": i, "orig_count": o.original_count, "mod_count": o.modified_count, "delta": o.delta,
         "X": o.age_start, "Y": o.age_end, "M": o.index_M, "N": o.count_N}
        for i, o in enumerate(outcomes)
    ]

    return TransformCheck(
        orig=CountEstimate.from_samples(original, u / t),
        mod=CountEstimate.from_samples(modified, u / t),
        mean_delta=float(np.mean(delta)),
        delta_stderr=float(np.std(delta, ddof=1) / math.sqrt(n_trials)),
        p_exit=float(np.mean(age_start > t)),
        p_enter=float(np.mean(age_end > t)),
        frac_large_delta=frac_large,
        identity_violations=int(violations),
        rows=rows,
    )
