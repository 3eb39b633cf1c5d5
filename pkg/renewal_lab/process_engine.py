"""
Renewal process engine
Generates event-time realizations and answers counting queries:
N(s), window counts, age and residual life
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .config import get_settings
from .distributions import DistributionSpec
from .error_models import BeyondLastEvent, HorizonOverflow, ValidationFailure, WindowBeyondHorizon
from .streams import RandomStream

logger = logging.getLogger(__name__)

# Extra draws on top of the expected count for the first batch
_BATCH_SLACK = 16


@dataclass(frozen=True)
class ObservationWindow:
    """Half-open observation interval (u1, u2]"""
    u1: float
    u2: float

    def __post_init__(self):
        if self.u1 < 0:
            raise ValidationFailure(f"Window start must be non-negative, got {self.u1}")
        if self.u2 < self.u1:
            raise ValidationFailure(f"Window end {self.u2} precedes start {self.u1}")

    @property
    def u(self) -> float:
        return self.u2 - self.u1


@dataclass(frozen=True, eq=False)
class Realization:
    """
    One sampled trajectory

    Attributes:
        inter_arrivals: T_1..T_k in generation order
        event_times: S_1..S_k, the in-order running sums of inter_arrivals
        horizon: Time the generation had to pass
    """
    inter_arrivals: np.ndarray
    event_times: np.ndarray
    horizon: float

    def __post_init__(self):
        self.inter_arrivals.setflags(write=False)
        self.event_times.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.event_times)

    @property
    def last_event(self) -> float:
        return float(self.event_times[-1]) if self.size else 0.0

    def events_up_to(self, s: float) -> int:
        """N(s): events in (0, s], counted with multiplicity"""
        return int(np.searchsorted(self.event_times, s, side="right"))

    def event_time(self, index: int) -> float:
        """S_index with the convention S_0 = 0"""
        return float(self.event_times[index - 1]) if index > 0 else 0.0

    @classmethod
    def from_inter_arrivals(cls, inter_arrivals, horizon: Optional[float] = None) -> "Realization":
        """Build a realization from explicit inter-arrival times"""
        inter = np.array(inter_arrivals, dtype=float)
        if np.any(inter < 0):
            raise ValidationFailure("Inter-arrival times must be non-negative")
        times = np.cumsum(inter)
        return cls(inter, times, float(horizon if horizon is not None else (times[-1] if len(times) else 0.0)))


class AgeResidual(NamedTuple):
    age: float
    residual: float
    containing_interval: float
    index_M: int


def generate(
    spec: DistributionSpec,
    horizon: float,
    stream: RandomStream,
    max_events: Optional[int] = None
) -> Realization:
    """
    Sample events until the horizon is strictly exceeded

    Inter-arrivals are drawn in growing batches and accumulated with a
    single in-order cumulative sum, so S_i is the exact running sum.

    Args:
        spec: Inter-arrival law
        horizon: Positive time the last event must pass
        stream: Random stream owned by this trial
        max_events: Hard cap on events (default: settings.max_events)

    Returns:
        Realization whose last event lies strictly beyond the horizon

    Raises:
        ValidationFailure: If the horizon is not positive
        HorizonOverflow: If the cap is reached before the horizon
    """
    if not horizon > 0:
        raise ValidationFailure(f"Horizon must be positive, got {horizon}")

    cap = max_events if max_events is not None else get_settings().max_events
    batch = min(cap, int(math.ceil(horizon / spec.mean() * 1.1)) + _BATCH_SLACK)
    batches = []
    drawn = 0

    while True:
        batches.append(spec.sample_many(stream, batch))
        drawn += batch
        inter = np.concatenate(batches) if len(batches) > 1 else batches[0]
        times = np.cumsum(inter)

        if times[-1] > horizon:
            # Keep everything up to and including the first event past the horizon
            stop = int(np.searchsorted(times, horizon, side="right")) + 1
            if stop > cap:
                break
            return Realization(inter[:stop].copy(), times[:stop].copy(), float(horizon))

        if drawn >= cap:
            break

        batches = [inter]
        batch = min(cap - drawn, max(batch, drawn))

    logger.error(f"Event cap {cap} reached before horizon {horizon} for {spec.label()}")
    raise HorizonOverflow(f"{cap} events generated before reaching horizon {horizon} ({spec.label()})")


def count_in(real: Realization, w: ObservationWindow) -> int:
    """
    N(u1 -> u2): events in (u1, u2], counted with multiplicity

    Raises:
        WindowBeyondHorizon: If events up to u2 were not all generated
    """
    if w.u2 > real.last_event and w.u2 > real.horizon:
        raise WindowBeyondHorizon(
            f"Window end {w.u2} beyond last event {real.last_event} and horizon {real.horizon}"
        )
    return real.events_up_to(w.u2) - real.events_up_to(w.u1)


def age_and_residual(real: Realization, s: float) -> AgeResidual:
    """
    Age, residual life and containing interval at time s

    An event exactly at s belongs to the past (age 0). S_0 = 0.

    Args:
        real: Realization
        s: Query time, s >= 0

    Returns:
        AgeResidual(age, residual, containing_interval, index_M) where
        M = N(s) and containing_interval = T_{M+1}

    Raises:
        BeyondLastEvent: If no event follows s
    """
    if s < 0:
        raise ValidationFailure(f"Query time must be non-negative, got {s}")

    index_m = real.events_up_to(s)
    if index_m >= real.size:
        raise BeyondLastEvent(f"No event after s={s}; last event at {real.last_event}")

    age = s - real.event_time(index_m)
    residual = float(real.event_times[index_m]) - s
    return AgeResidual(age, residual, float(real.inter_arrivals[index_m]), index_m)


def write_realization_csv(real: Realization, path: Path) -> Path:
    """Dump a realization as index,event_time,inter_arrival"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "event_time", "inter_arrival"])
        for i, (s_i, t_i) in enumerate(zip(real.event_times, real.inter_arrivals), start=1):
            writer.writerow([i, repr(float(s_i)), repr(float(t_i))])

    logger.info(f"Wrote {real.size} events to {path}")
    return path
