"""
Floor-expectation lemmas
E[floor(c - U)] = c - 1 exactly, by Monte Carlo, under zero-mean noise,
and the converse probe for non-uniform U
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from .distributions import NoiseSpec
from .error_models import IntegerC, NonZeroMeanNoise, ValidationFailure
from .streams import RandomStream

logger = logging.getLogger(__name__)

MIN_DRAWS = 100
NOISE_MEAN_TOLERANCE = 1e-9
INTEGER_C_TOLERANCE = 1e-12
DEFAULT_VIOLATION_THRESHOLD = 0.01

ROUNDING_MODES = ("floor", "truncate")

FLOOR_CSV_COLUMNS = ["c", "estimate", "exact", "stderr", "n"]
CONVERSE_CSV_COLUMNS = ["c", "lhs", "rhs"]

PROBE_CDFS: Dict[str, Callable[[float], float]] = {
    "uniform": lambda x: x,
    "beta22": lambda x: 3.0 * x ** 2 - 2.0 * x ** 3,
    "power2": lambda x: x ** 2,
    "sqrt": math.sqrt,
}


@dataclass(frozen=True)
class FloorExpectationResult:
    c: float
    estimate: float
    exact: float
    n: int
    stderr: float

    @property
    def error(self) -> float:
        return abs(self.estimate - self.exact)

    def to_dict(self) -> dict:
        return asdict(self)


class ConverseRow(NamedTuple):
    c: float
    lhs: float
    rhs: float


def _is_integer(c: float) -> bool:
    return abs(c - round(c)) <= INTEGER_C_TOLERANCE


def floor_expectation_exact(c: float, strict: bool = False) -> float:
    """
    E[floor(c - U)] for U uniform on (0, 1)

    Args:
        c: Real offset
        strict: Raise on integer c instead of returning c - 1

    Returns:
        c - 1

    Raises:
        IntegerC: If c is an integer and strict is set
    """
    if _is_integer(c):
        if strict:
            raise IntegerC(f"c={c} is an integer; floor(c - U) = c - 1 identically")
        logger.info(f"Integer c={c}: floor(c - U) is constant")
    return c - 1.0


def _reduce(c: float, values: np.ndarray) -> FloorExpectationResult:
    n = values.size
    return FloorExpectationResult(
        c=c,
        estimate=float(np.mean(values)),
        exact=c - 1.0,
        n=n,
        stderr=float(np.std(values, ddof=1) / math.sqrt(n)),
    )


def _round(values: np.ndarray, rounding: str) -> np.ndarray:
    if rounding == "floor":
        return np.floor(values)
    if rounding == "truncate":
        return np.trunc(values)
    raise ValidationFailure(f"rounding must be one of {ROUNDING_MODES}, got {rounding!r}")


def floor_expectation_mc(c: float, n: int, seed: int, rounding: str = "floor") -> FloorExpectationResult:
    """
    Monte Carlo mean of floor(c - U) over n draws

    rounding="truncate" rounds toward zero instead, which differs from the
    floor whenever c - U < 0.
    """
    if n < MIN_DRAWS:
        raise ValidationFailure(f"n must be at least {MIN_DRAWS}, got {n}")

    draws = RandomStream.substream(seed, 0).unit_uniform(n)
    result = _reduce(c, _round(c - draws, rounding))
    logger.info(f"E[{rounding}(c - U)] at c={c}: {result.estimate:.6f} +- {result.stderr:.6f}")
    return result


def floor_expectation_noisy(c: float, noise: NoiseSpec, n: int, seed: int) -> FloorExpectationResult:
    """
    Monte Carlo mean of floor(c + eta - U) for zero-mean noise eta

    U is drawn before eta from the same substream, so zero noise
    reproduces floor_expectation_mc draw for draw.

    Raises:
        NonZeroMeanNoise: If the analytic noise mean differs from 0
    """
    if abs(noise.mean()) > NOISE_MEAN_TOLERANCE:
        raise NonZeroMeanNoise(f"Noise mean is {noise.mean()!r}, expected 0")
    if n < MIN_DRAWS:
        raise ValidationFailure(f"n must be at least {MIN_DRAWS}, got {n}")

    stream = RandomStream.substream(seed, 0)
    draws = stream.unit_uniform(n)
    eta = noise.sample_many(stream, n)
    return _reduce(c, np.floor(c + eta - draws))


def resolve_probe_cdf(name: str) -> Callable[[float], float]:
    try:
        return PROBE_CDFS[name]
    except KeyError:
        raise ValidationFailure(f"Unknown probe CDF {name!r}; choose from {sorted(PROBE_CDFS)}")


def default_grid(step: float = 0.01) -> List[float]:
    """Grid step, 2*step, ... strictly inside (0, 1)"""
    count = int(round(1.0 / step))
    return [round(k * step, 12) for k in range(1, count)]


def converse_probe(nonuniform_cdf: Union[str, Callable[[float], float]],
                   c_grid: Optional[Sequence[float]] = None) -> List[ConverseRow]:
    """
    Compare E[floor(c - U')] = -(1 - F(c)) with c - 1 on a grid

    Args:
        nonuniform_cdf: CDF of U' on (0, 1), or a name from PROBE_CDFS
        c_grid: Points in (0, 1) (default step 0.01)

    Returns:
        One ConverseRow per grid point
    """
    cdf = resolve_probe_cdf(nonuniform_cdf) if isinstance(nonuniform_cdf, str) else nonuniform_cdf
    grid = default_grid() if c_grid is None else list(c_grid)

    for c in grid:
        if not 0.0 < c < 1.0:
            raise ValidationFailure(f"Probe points must lie in (0, 1), got {c}")

    return [ConverseRow(c, -(1.0 - cdf(c)), c - 1.0) for c in grid]


def converse_violations(rows: Sequence[ConverseRow],
                        threshold: float = DEFAULT_VIOLATION_THRESHOLD) -> List[ConverseRow]:
    return [row for row in rows if abs(row.lhs - row.rhs) > threshold]
