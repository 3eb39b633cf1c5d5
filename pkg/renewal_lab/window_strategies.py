"""
Observation window placement
Fixed, large-uniform and deferred large-uniform start rules
"""

import logging
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from .error_models import ValidationFailure
from .process_engine import ObservationWindow
from .streams import RandomStream

logger = logging.getLogger(__name__)

# Minimum run-out past the window end
DEFAULT_MARGIN = 100.0
MARGIN_MEAN_MULTIPLE = 10.0


class _Strategy(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    def label(self) -> str:
        return self.model_dump_json()


class FixedStart(_Strategy):
    """Window starts at the deterministic time m"""
    kind: Literal["fixed_start"] = "fixed_start"
    m: float = Field(ge=0)

    def draw_start(self, stream: RandomStream) -> float:
        return self.m

    @property
    def reach(self) -> float:
        return self.m


class LargeUniform(_Strategy):
    """Window starts at V = theta * U, U uniform on (0, 1]"""
    kind: Literal["large_uniform"] = "large_uniform"
    theta: float = Field(gt=0)

    def draw_start(self, stream: RandomStream) -> float:
        return self.theta * float(stream.unit_uniform())

    @property
    def reach(self) -> float:
        return self.theta


class DeferredUniform(_Strategy):
    """Window starts at V + c"""
    kind: Literal["deferred_uniform"] = "deferred_uniform"
    theta: float = Field(gt=0)
    c: float = Field(ge=0)

    def draw_start(self, stream: RandomStream) -> float:
        return self.theta * float(stream.unit_uniform()) + self.c

    @property
    def reach(self) -> float:
        return self.theta + self.c


WindowStrategy = Annotated[Union[FixedStart, LargeUniform, DeferredUniform], Field(discriminator="kind")]

STRATEGY_ADAPTER: TypeAdapter = TypeAdapter(WindowStrategy)


def place_start(strat: WindowStrategy, stream: RandomStream) -> float:
    """Draw only the window start u1"""
    return strat.draw_start(stream)


def place_window(strat: WindowStrategy, u: float, stream: RandomStream) -> ObservationWindow:
    """
    Place an observation window of length u

    Args:
        strat: Start rule
        u: Window length, u > 0
        stream: Random stream owned by the trial

    Returns:
        ObservationWindow (u1, u1 + u]
    """
    if not u > 0:
        raise ValidationFailure(f"Window length u must be positive, got {u}")

    u1 = strat.draw_start(stream)
    return ObservationWindow(u1, u1 + u)


def default_margin(mean: Optional[float] = None) -> float:
    """max(100, 10 * mean) when the mean is known, 100 otherwise"""
    if mean is None:
        return DEFAULT_MARGIN
    return max(DEFAULT_MARGIN, MARGIN_MEAN_MULTIPLE * mean)


def covering_horizon(end: float, mean: Optional[float] = None, margin: Optional[float] = None) -> float:
    """Horizon for one placed window: its end plus the run-out margin"""
    if end < 0:
        raise ValidationFailure(f"Window end must be non-negative, got {end}")
    return end + (default_margin(mean) if margin is None else margin)


def required_horizon(
    strat: WindowStrategy,
    u: float,
    mean: Optional[float] = None,
    margin: Optional[float] = None
) -> float:
    """
    Horizon that covers every window the strategy can place plus a run-out

    Trials size their own realization with covering_horizon(window.u2);
    this is the bound over all placements.

    Args:
        strat: Start rule
        u: Window length (0 when only the start is queried)
        mean: Inter-arrival mean used to scale the default margin
        margin: Explicit margin overriding the default

    Returns:
        reach(strat) + u + margin
    """
    if u < 0:
        raise ValidationFailure(f"Window length u must be non-negative, got {u}")
    return covering_horizon(strat.reach + u, mean, margin)
