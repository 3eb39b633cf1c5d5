"""
Mod-1 equidistribution and span detection
Characteristic-coefficient scans, exact lattice detection for atom laws,
S_n mod 1 sampling and the Z_m = ceil(mU) - mU family
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .distributions import TWO_PI, CharCoefficient, DistributionSpec, char_coefficient
from .error_models import IntegerM, QuadratureFailure, SpanUndetectable, ValidationFailure
from .ks import KS_CRITICAL, KsReport, ks_report, ks_uniform
from .streams import RandomStream
from .trials import TrialRunner

logger = logging.getLogger(__name__)

DEFAULT_M_MAX = 64
DEFAULT_TOL = 1e-9
DENOMINATOR_CAP = 10**6

# |gamma_m| at or above 1 - ARITHMETIC_THRESHOLD marks an arithmetic law
ARITHMETIC_THRESHOLD = 1e-6
INTEGER_M_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SpanReport:
    """
    Lattice structure of an inter-arrival law

    Attributes:
        is_arithmetic: Support lies on a lattice lattice * (Z + shift_theta)
        span: Largest lambda dividing every atom value
        shift_theta: Common fractional offset of the atoms on the difference lattice
        lattice: GCD of atom differences
        witnesses: Coefficients with modulus >= 1 - tol
        tol: Agreement tolerance
        scan: gamma_1..gamma_m_max the witnesses were taken from
    """
    is_arithmetic: bool
    span: Optional[float]
    shift_theta: Optional[float]
    lattice: Optional[float]
    witnesses: List[CharCoefficient] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    scan: List[CharCoefficient] = field(default_factory=list)

    def __post_init__(self):
        if self.is_arithmetic and not self.witnesses:
            raise ValueError("an arithmetic report needs at least one witness")

    def to_dict(self) -> dict:
        return {
            "is_arithmetic": self.is_arithmetic,
            "span": self.span,
            "shift_theta": self.shift_theta,
            "lattice": self.lattice,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "tol": self.tol,
        }


class CharEstimate(NamedTuple):
    coefficient: CharCoefficient
    stderr: float


class EquivalenceRow(NamedTuple):
    gamma_uniform: bool
    ks: KsReport
    agree: bool


def _rational(value: float, tol: float) -> Fraction:
    approx = Fraction(value).limit_denominator(DENOMINATOR_CAP)
    if abs(float(approx) - value) > tol:
        raise SpanUndetectable(
            f"Atom {value!r} has no rational form with denominator <= {DENOMINATOR_CAP} within {tol}"
        )
    return approx


def _fraction_gcd(values: Sequence[Fraction]) -> Fraction:
    """GCD of nonnegative rationals; zeros are ignored"""
    nonzero = [v for v in values if v != 0]
    if not nonzero:
        return Fraction(0)
    common = math.lcm(*(v.denominator for v in nonzero))
    numerators = [int(v * common) for v in nonzero]
    return Fraction(math.gcd(*numerators), common)


def estimate_char_coefficient(spec: DistributionSpec, m: int, n: int, seed: int) -> CharEstimate:
    """Monte Carlo gamma_m from n draws on substream (seed, m)"""
    if n < 2:
        raise ValidationFailure(f"n must be at least 2, got {n}")
    phases = np.exp(1j * TWO_PI * m * spec.sample_many(RandomStream.substream(seed, m), n))
    spread = math.sqrt(float(np.var(phases.real, ddof=1) + np.var(phases.imag, ddof=1)))
    return CharEstimate(CharCoefficient.from_value(m, complex(np.mean(phases))), spread / math.sqrt(n))


def gamma_scan(
    spec: DistributionSpec,
    m_max: int = DEFAULT_M_MAX,
    fallback_draws: Optional[int] = None,
    seed: int = 0
) -> List[CharCoefficient]:
    """
    gamma_m for m = 1..m_max

    When quadrature fails and fallback_draws is given, the coefficient is
    estimated by Monte Carlo instead.
    """
    if m_max < 1:
        raise ValidationFailure(f"m_max must be at least 1, got {m_max}")

    scan = []
    for m in range(1, m_max + 1):
        try:
            scan.append(char_coefficient(spec, m))
        except QuadratureFailure:
            if fallback_draws is None:
                raise
            estimate = estimate_char_coefficient(spec, m, fallback_draws, seed)
            logger.warning(f"gamma_{m} of {spec.label()} estimated by Monte Carlo "
                           f"(stderr {estimate.stderr:.2e})")
            scan.append(estimate.coefficient)
    return scan


def detect_span(
    spec: DistributionSpec,
    m_max: int = DEFAULT_M_MAX,
    tol: float = DEFAULT_TOL,
    fallback_draws: Optional[int] = None,
    seed: int = 0
) -> SpanReport:
    """
    Decide whether the law is arithmetic and find its span

    Atom laws are handled exactly: atom values are turned into rationals
    (denominator cap 10^6, agreement within tol), the span is the GCD of
    the values and the lattice is the GCD of the differences. The
    coefficient at m = denominator(lattice) always has modulus one and is
    reported as a witness. Continuous laws are non-arithmetic; their
    witnesses come from the |gamma_m| scan.

    Args:
        spec: Inter-arrival law
        m_max: Largest m scanned
        tol: Rational agreement tolerance and witness slack
        fallback_draws: Monte Carlo draws used when quadrature fails
        seed: Seed for the Monte Carlo fallback

    Returns:
        SpanReport

    Raises:
        SpanUndetectable: If an atom admits no rational form under the cap
    """
    if m_max < 1:
        raise ValidationFailure(f"m_max must be at least 1, got {m_max}")
    if not tol > 0:
        raise ValidationFailure(f"tol must be positive, got {tol}")

    scan = gamma_scan(spec, m_max, fallback_draws, seed)
    witnesses = [c for c in scan if c.modulus >= 1.0 - tol]
    atoms = spec.atoms()

    if not atoms:
        report = SpanReport(False, None, None, None, witnesses, tol, scan)
        logger.info(f"{spec.label()}: non-arithmetic, max |gamma_m| = {max(c.modulus for c in scan):.6g}")
        return report

    values = [_rational(v, tol) for v, _ in atoms]
    span = _fraction_gcd(values)
    lattice = _fraction_gcd([v - values[0] for v in values[1:]]) or span
    shift = (values[0] / lattice) % 1

    if not any(w.m == lattice.denominator for w in witnesses):
        exact = char_coefficient(spec, lattice.denominator)
        witnesses = sorted(witnesses + [exact], key=lambda c: c.m)

    logger.info(f"{spec.label()}: arithmetic, span {float(span)!r}, lattice {float(lattice)!r}, shift {float(shift)!r}")
    return SpanReport(True, float(span), float(shift), float(lattice), witnesses, tol, scan)


def mod1_samples(
    spec: DistributionSpec,
    n: int,
    trials: int,
    seed: int,
    threads: Optional[int] = None
) -> np.ndarray:
    """
    (T_1 + ... + T_n) mod 1, one value per trial

    Args:
        spec: Inter-arrival law
        n: Number of summands
        trials: Number of independent trials
        seed: Experiment seed
        threads: Worker threads

    Returns:
        Values in [0, 1) in trial order
    """
    if n < 1:
        raise ValidationFailure(f"n must be at least 1, got {n}")

    def trial(i: int) -> float:
        total = float(np.sum(spec.sample_many(RandomStream.substream(seed, 0, i), n)))
        return total % 1.0

    return TrialRunner(threads).map_array(trial, trials, operation=f"S_{n} mod 1")


def theorem_equivalence(
    spec: DistributionSpec,
    m_max: int,
    n: int,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
    critical: float = KS_CRITICAL
) -> EquivalenceRow:
    """
    Compare the coefficient criterion with a KS test of S_n mod 1

    gamma_uniform is max |gamma_m| < 1 - 1e-6 over 1..m_max; agree is
    whether it matches the KS verdict at critical / sqrt(trials).
    """
    gamma_uniform = max(c.modulus for c in gamma_scan(spec, m_max)) < 1.0 - ARITHMETIC_THRESHOLD
    report = ks_uniform(mod1_samples(spec, n, trials, seed, threads), critical / math.sqrt(trials))
    return EquivalenceRow(gamma_uniform, report, gamma_uniform == report.passed)


def gaussian_mod1_ks(
    sigma: float,
    mu: float,
    n: int,
    seed: int,
    threshold: Optional[float] = None
) -> KsReport:
    """KS of N(mu, sigma^2) mod 1 against U[0, 1)"""
    if not sigma > 0:
        raise ValidationFailure(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValidationFailure(f"n must be at least 1, got {n}")

    draws = RandomStream.substream(seed, 0).normal(mu, sigma, n)
    return ks_uniform(np.mod(draws, 1.0), threshold)


def _is_integer(m: float) -> bool:
    return abs(m - round(m)) <= INTEGER_M_TOLERANCE


def zm_exact_cdf(m: float, x, allow_integer: bool = False):
    """
    Distribution function of Z_m = ceil(mU) - mU, U uniform on (0, 1]

    With f = floor(m) and d = ceil(m) - m:
    0 for x <= 0, x f / m on (0, d], x f / m + (x - d) / m on (d, 1), 1 from 1 on.

    Args:
        m: Positive non-integer scale
        x: Point(s)
        allow_integer: Return the uniform CDF for integer m instead of raising

    Raises:
        IntegerM: If m is an integer and allow_integer is False
    """
    if not m > 0:
        raise ValidationFailure(f"m must be positive, got {m}")

    x_arr = np.asarray(x, dtype=float)
    if _is_integer(m):
        if not allow_integer:
            raise IntegerM(f"m={m} is an integer; Z_m is exactly uniform")
        values = np.clip(x_arr, 0.0, 1.0)
    else:
        whole = math.floor(m)
        gap = math.ceil(m) - m
        body = x_arr * whole / m + np.where(x_arr > gap, (x_arr - gap) / m, 0.0)
        values = np.where(x_arr <= 0.0, 0.0, np.where(x_arr >= 1.0, 1.0, body))

    return float(values) if values.ndim == 0 else values


def zm_samples(m: float, n: int, seed: int, cell: int = 0) -> np.ndarray:
    """n draws of Z_m from substream (seed, cell)"""
    if not m > 0:
        raise ValidationFailure(f"m must be positive, got {m}")
    y = m * RandomStream.substream(seed, cell).unit_uniform(n)
    return np.ceil(y) - y


def zm_cdf_gap(m: float, n: int, seed: int, allow_integer: bool = False) -> float:
    """sup |F_empirical - F_exact| for n simulated Z_m"""
    return ks_report(zm_samples(m, n, seed), lambda x: zm_exact_cdf(m, x, allow_integer)).statistic


def zm_limit_check(m_list: Sequence[float], n: int, seed: int,
                   threshold: Optional[float] = None) -> List[KsReport]:
    """KS of Z_m against U[0, 1) for each m; cell index is the position in m_list"""
    if not m_list:
        raise ValidationFailure("m_list must not be empty")
    reports = [ks_uniform(zm_samples(m, n, seed, cell), threshold) for cell, m in enumerate(m_list)]
    for m, report in zip(m_list, reports):
        logger.info(f"Z_{m}: D={report.statistic:.5f} pass={report.passed}")
    return reports
