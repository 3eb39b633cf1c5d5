"""
Experiment configuration
The validated parameter record every CLI subcommand is built from
"""

from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .distributions import DistributionSpec, NoiseSpec
from .window_strategies import WindowStrategy


class ExperimentConfig(BaseModel):
    """
    Parameter record shared by all CLI subcommands

    Values come from the ``--config`` JSON file overlaid with explicit
    flags. Which fields a subcommand needs is checked by the subcommand.
    """
    model_config = ConfigDict(extra="forbid")

    seed: int = Field(ge=0)
    dist: Optional[DistributionSpec] = None
    strategy: Optional[WindowStrategy] = None
    u: Optional[float] = Field(default=None, gt=0)
    u_list: Optional[List[float]] = None
    s: Optional[float] = Field(default=None, gt=0)
    n_trials: int = Field(default=10000, ge=2)
    threads: Optional[int] = Field(default=None, ge=1)
    out_dir: Path = Path("results")
    plot: bool = False
    dump_realization: bool = False
    k_sigma: float = Field(default=5.0, gt=0)

    # uniformity_and_span
    n: Optional[int] = Field(default=None, ge=1)
    m_list: Optional[List[float]] = None
    m_max: int = Field(default=64, ge=1)
    tol: float = Field(default=1e-9, gt=0)
    sigma: Optional[float] = Field(default=None, gt=0)
    mu: float = 0.0

    # residual_analytics
    bucket_width: Optional[float] = Field(default=None, gt=0)

    # floor_lemmas and the perturbed deterministic process
    c: Optional[float] = None
    noise: Optional[NoiseSpec] = None
    noise_end: Optional[NoiseSpec] = None
    converse: Optional[str] = None
    rounding: str = "floor"
    t: Optional[float] = Field(default=None, gt=0)
    theta: Optional[float] = Field(default=None, gt=0)

    @field_validator("u_list", "m_list")
    @classmethod
    def _nonempty_positive(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is None:
            return value
        if not value:
            raise ValueError("list must not be empty")
        if any(v <= 0 for v in value):
            raise ValueError("list entries must be positive")
        return value

    @field_validator("rounding")
    @classmethod
    def _rounding_mode(cls, value: str) -> str:
        if value not in ("floor", "truncate"):
            raise ValueError("rounding must be 'floor' or 'truncate'")
        return value
