"""
Reproducible random streams
Counter-based Philox generators keyed by (seed, trial path) so every trial
sees the same numbers no matter which worker thread runs it
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from .error_models import ValidationFailure

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]


class RandomStream:
    """
    Single-owner random stream

    A stream is identified by its seed and an index path, e.g.
    ``(seed, cell, trial)``. Two streams with the same identity produce
    identical draws; distinct paths are statistically independent
    (``numpy.random.SeedSequence`` spawn keys).
    """

    def __init__(self, seed: int, path: Tuple[int, ...] = ()):
        if seed < 0:
            raise ValidationFailure(f"Seed must be non-negative, got {seed}")
        if any(i < 0 for i in path):
            raise ValidationFailure(f"Substream indices must be non-negative, got {path}")

        self.seed = int(seed)
        self.path = tuple(int(i) for i in path)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    @classmethod
    def substream(cls, seed: int, *indices: int) -> "RandomStream":
        """
        Derive the stream for one (cell, trial, ...) coordinate

        Args:
            seed: Experiment seed
            *indices: Index path below the seed

        Returns:
            Independent, reproducible RandomStream
        """
        return cls(seed, indices)

    def unit_uniform(self, size: Optional[int] = None) -> ArrayOrFloat:
        """Uniform draws on (0, 1]"""
        return 1.0 - self.generator.random(size)

    def normal(self, loc: float = 0.0, scale: float = 1.0, size: Optional[int] = None) -> ArrayOrFloat:
        return self.generator.normal(loc, scale, size)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, path={self.path})"
