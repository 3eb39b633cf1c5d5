"""
Inter-arrival distributions
Parametric laws for T_i with samplers and the analytic descriptors
(mean, survival, density/atoms, partial moments, characteristic
coefficients) used by every other module
"""

import cmath
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator
from scipy import stats
from scipy.integrate import IntegrationWarning, quad

from .error_models import QuadratureFailure, ValidationFailure
from .streams import RandomStream

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Quadrature truncation: integrate up to the (1 - QUANTILE_TAIL) quantile
QUANTILE_TAIL = 1e-10
QUADRATURE_TOLERANCE = 1e-8

PROBABILITY_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CharCoefficient:
    """gamma_m = E[exp(2 pi i m T)] for one nonzero integer m"""
    m: int
    value: complex
    modulus: float

    def __post_init__(self):
        if self.m == 0:
            raise ValidationFailure("Characteristic coefficient index m must be nonzero")
        if abs(abs(self.value) - self.modulus) > 1e-12:
            raise ValueError(f"modulus {self.modulus} does not match |value| {abs(self.value)}")
        if self.modulus > 1.0 + 1e-9:
            raise ValueError(f"|gamma_{self.m}| = {self.modulus} exceeds 1")

    @classmethod
    def from_value(cls, m: int, value: complex) -> "CharCoefficient":
        return cls(m=int(m), value=complex(value), modulus=abs(value))

    def to_dict(self) -> dict:
        return {"m": self.m, "re": self.value.real, "im": self.value.imag, "modulus": self.modulus}


class _Law(BaseModel):
    """Shared pydantic configuration for every distribution variant"""
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    def label(self) -> str:
        """Compact JSON used in CSV rows and log lines"""
        return self.model_dump_json()


class _InterArrivalLaw(_Law):
    """
    Interface implemented by each inter-arrival variant

    Array-valued methods accept a numpy array of evaluation points and
    return an array of the same shape.
    """

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def survival(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def density(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)

    def atoms(self) -> List[Tuple[float, float]]:
        return []

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        raise NotImplementedError

    def char_value(self, m: int) -> complex:
        raise NotImplementedError

    @property
    def is_continuous(self) -> bool:
        return not self.atoms()


class Deterministic(_InterArrivalLaw):
    """Point mass at t"""
    kind: Literal["deterministic"] = "deterministic"
    t: float = Field(gt=0)

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        return np.full(size, self.t)

    def mean(self) -> float:
        return self.t

    def survival(self, x: np.ndarray) -> np.ndarray:
        return np.where(x < self.t, 1.0, 0.0)

    def atoms(self) -> List[Tuple[float, float]]:
        return [(self.t, 1.0)]

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        return np.where(x >= self.t, self.t, 0.0)

    def quantile(self, p: float) -> float:
        return self.t

    def char_value(self, m: int) -> complex:
        return cmath.exp(1j * TWO_PI * m * self.t)


class Exponential(_InterArrivalLaw):
    kind: Literal["exponential"] = "exponential"
    rate: float = Field(gt=0)

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        return stream.generator.exponential(1.0 / self.rate, size)

    def mean(self) -> float:
        return 1.0 / self.rate

    def survival(self, x: np.ndarray) -> np.ndarray:
        return np.where(x < 0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))

    def density(self, x: np.ndarray) -> np.ndarray:
        return np.where(x < 0, 0.0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)))

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        # E[T; T <= x] = (1 - e^{-rx}(1 + rx)) / r
        rx = self.rate * np.maximum(x, 0.0)
        return -np.expm1(-rx) / self.rate - np.maximum(x, 0.0) * np.exp(-rx)

    def quantile(self, p: float) -> float:
        return -math.log1p(-p) / self.rate

    def char_value(self, m: int) -> complex:
        return self.rate / (self.rate - 1j * TWO_PI * m)


class UniformInterval(_InterArrivalLaw):
    kind: Literal["uniform_interval"] = "uniform_interval"
    a: float = Field(ge=0)
    b: float

    @model_validator(mode="after")
    def _ordered(self) -> "UniformInterval":
        if not self.b > self.a:
            raise ValueError(f"uniform_interval needs a < b, got a={self.a}, b={self.b}")
        return self

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        return stream.generator.uniform(self.a, self.b, size)

    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def survival(self, x: np.ndarray) -> np.ndarray:
        return np.clip((self.b - x) / (self.b - self.a), 0.0, 1.0)

    def density(self, x: np.ndarray) -> np.ndarray:
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        top = np.clip(x, self.a, self.b)
        return (top * top - self.a * self.a) / (2.0 * (self.b - self.a))

    def quantile(self, p: float) -> float:
        return self.a + p * (self.b - self.a)

    def char_value(self, m: int) -> complex:
        w = TWO_PI * m
        return (cmath.exp(1j * w * self.b) - cmath.exp(1j * w * self.a)) / (1j * w * (self.b - self.a))


class _ScipyLaw(_InterArrivalLaw):
    """Continuous variants backed by a frozen scipy.stats distribution"""

    def _frozen(self):
        raise NotImplementedError

    def survival(self, x: np.ndarray) -> np.ndarray:
        return np.where(x <= 0, 1.0, self._frozen().sf(np.maximum(x, 0.0)))

    def density(self, x: np.ndarray) -> np.ndarray:
        return np.where(x <= 0, 0.0, self._frozen().pdf(np.maximum(x, 0.0)))

    def quantile(self, p: float) -> float:
        return float(self._frozen().ppf(p))


class LogNormal(_ScipyLaw):
    kind: Literal["log_normal"] = "log_normal"
    mu: float
    sigma: float = Field(gt=0)

    def _frozen(self):
        return stats.lognorm(s=self.sigma, scale=math.exp(self.mu))

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        return stream.generator.lognormal(self.mu, self.sigma, size)

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma ** 2)

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        # E[T; T <= x] = mean * Phi((ln x - mu - sigma^2) / sigma)
        with np.errstate(divide="ignore"):
            z = (np.log(np.maximum(x, 0.0)) - self.mu - self.sigma ** 2) / self.sigma
        return self.mean() * stats.norm.cdf(z)

    def char_value(self, m: int) -> complex:
        return _quadrature_char_value(self, m)


class Gamma(_ScipyLaw):
    kind: Literal["gamma"] = "gamma"
    shape: float = Field(gt=0)
    scale: float = Field(gt=0)

    def _frozen(self):
        return stats.gamma(a=self.shape, scale=self.scale)

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        return stream.generator.gamma(self.shape, self.scale, size)

    def mean(self) -> float:
        return self.shape * self.scale

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        # E[T; T <= x] = mean * F_{Gamma(shape + 1, scale)}(x)
        return self.mean() * stats.gamma.cdf(np.maximum(x, 0.0), a=self.shape + 1.0, scale=self.scale)

    def char_value(self, m: int) -> complex:
        return (1.0 - 1j * TWO_PI * m * self.scale) ** (-self.shape)


class DiscreteAtoms(_InterArrivalLaw):
    """Finitely many atoms; an atom at 0 models simultaneous events"""
    kind: Literal["discrete_atoms"] = "discrete_atoms"
    atoms_: List[Tuple[float, float]] = Field(alias="atoms")

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False, populate_by_name=True)

    @field_validator("atoms_")
    @classmethod
    def _valid_atoms(cls, atoms: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        if not atoms:
            raise ValueError("discrete_atoms needs at least one atom")

        values = [v for v, _ in atoms]
        probs = [p for _, p in atoms]

        if any(v < 0 for v in values):
            raise ValueError("atom values must be non-negative")
        if any(not (0.0 < p <= 1.0) for p in probs):
            raise ValueError("atom probabilities must lie in (0, 1]")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("atom values must be strictly increasing")
        if abs(math.fsum(probs) - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValueError(f"atom probabilities sum to {math.fsum(probs)!r}, not 1")
        if math.fsum(v * p for v, p in atoms) <= 0:
            raise ValueError("discrete_atoms mean must be strictly positive")

        return [(float(v), float(p)) for v, p in atoms]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms_])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms_])

    def label(self) -> str:
        return self.model_dump_json(by_alias=True)

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        # Inverse CDF on (0, 1]; the last cumulative weight is pinned to 1
        cumulative = np.cumsum(self.probs)
        cumulative[-1] = 1.0
        index = np.searchsorted(cumulative, stream.unit_uniform(size), side="left")
        return self.values[index]

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.atoms_)

    def survival(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.sum(self.probs * (self.values > x[..., None]), axis=-1)

    def atoms(self) -> List[Tuple[float, float]]:
        return list(self.atoms_)

    def partial_mean(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.sum(self.values * self.probs * (self.values <= x[..., None]), axis=-1)

    def quantile(self, p: float) -> float:
        index = int(np.searchsorted(np.cumsum(self.probs), p, side="left"))
        return float(self.values[min(index, len(self.atoms_) - 1)])

    def char_value(self, m: int) -> complex:
        return complex(np.sum(self.probs * np.exp(1j * TWO_PI * m * self.values)))


DistributionSpec = Annotated[
    Union[Deterministic, Exponential, UniformInterval, LogNormal, Gamma, DiscreteAtoms],
    Field(discriminator="kind"),
]

DISTRIBUTION_ADAPTER: TypeAdapter = TypeAdapter(DistributionSpec)


class DiscreteNoise(_Law):
    """Signed finite law, e.g. +-0.5 with equal weight"""
    kind: Literal["discrete_noise"] = "discrete_noise"
    atoms: List[Tuple[float, float]]

    @field_validator("atoms")
    @classmethod
    def _valid_atoms(cls, atoms: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        if not atoms:
            raise ValueError("discrete_noise needs at least one atom")
        if any(not (0.0 < p <= 1.0) for _, p in atoms):
            raise ValueError("noise probabilities must lie in (0, 1]")
        if abs(math.fsum(p for _, p in atoms) - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValueError("noise probabilities must sum to 1")
        return [(float(v), float(p)) for v, p in atoms]

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.atoms)

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        values = np.array([v for v, _ in self.atoms])
        cumulative = np.cumsum([p for _, p in self.atoms])
        cumulative[-1] = 1.0
        return values[np.searchsorted(cumulative, stream.unit_uniform(size), side="left")]


class GaussianNoise(_Law):
    kind: Literal["gaussian_noise"] = "gaussian_noise"
    mu: float = 0.0
    sigma: float = Field(gt=0)

    def mean(self) -> float:
        return self.mu

    def sample_many(self, stream: RandomStream, size: int) -> np.ndarray:
        return stream.normal(self.mu, self.sigma, size)


NoiseSpec = Annotated[Union[DiscreteNoise, GaussianNoise], Field(discriminator="kind")]

NOISE_ADAPTER: TypeAdapter = TypeAdapter(NoiseSpec)

ZERO_NOISE = DiscreteNoise(atoms=[(0.0, 1.0)])


def _quadrature_char_value(spec: _ScipyLaw, m: int) -> complex:
    """
    E[exp(2 pi i m T)] by oscillatory quadrature on [0, Q]

    Q is the (1 - 1e-10) quantile. Raises QuadratureFailure when QUADPACK
    warns or the combined error estimate exceeds the tolerance.
    """
    frozen = spec._frozen()
    upper = float(frozen.isf(QUANTILE_TAIL))
    omega = TWO_PI * m
    options = dict(wvar=omega, epsabs=QUADRATURE_TOLERANCE / 4, epsrel=1e-10, limit=2000, maxp1=200)

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            real, real_err = quad(frozen.pdf, 0.0, upper, weight="cos", **options)
            imag, imag_err = quad(frozen.pdf, 0.0, upper, weight="sin", **options)
        except IntegrationWarning as exc:
            logger.error(f"Quadrature for gamma_{m} of {spec.label()} did not converge: {exc}")
            raise QuadratureFailure(f"gamma_{m} of {spec.label()}: {exc}")

    if real_err + imag_err > QUADRATURE_TOLERANCE:
        logger.error(f"Quadrature error {real_err + imag_err:.3e} for gamma_{m} exceeds tolerance")
        raise QuadratureFailure(f"gamma_{m} error estimate {real_err + imag_err:.3e} > {QUADRATURE_TOLERANCE}")

    return complex(real, imag)


def _evaluate(fn, x):
    """Apply an array method to a scalar or array argument"""
    values = fn(np.asarray(x, dtype=float))
    return float(values) if np.ndim(values) == 0 else values


def sample(spec: DistributionSpec, stream: RandomStream) -> float:
    """One draw of T from the stream"""
    return float(spec.sample_many(stream, 1)[0])


def sample_many(spec: DistributionSpec, stream: RandomStream, size: int) -> np.ndarray:
    return spec.sample_many(stream, size)


def mean(spec: DistributionSpec) -> float:
    """Exact analytic mean t = E(T)"""
    return spec.mean()


def survival(spec: DistributionSpec, x):
    """
    P(T > x), right-continuous and nonincreasing

    Args:
        spec: Inter-arrival law
        x: Evaluation point(s), x >= 0

    Returns:
        float for scalar x, array otherwise
    """
    return _evaluate(spec.survival, x)


def cdf(spec: DistributionSpec, x):
    return _evaluate(lambda v: 1.0 - spec.survival(v), x)


def density(spec: DistributionSpec, x):
    """Continuous density; identically zero for atom-only laws"""
    return _evaluate(spec.density, x)


def atoms(spec: DistributionSpec) -> List[Tuple[float, float]]:
    return spec.atoms()


def partial_mean(spec: DistributionSpec, x):
    """E[T 1{T <= x}]"""
    return _evaluate(spec.partial_mean, x)


def limited_mean(spec: DistributionSpec, x):
    """E[min(T, x)] = integral of the survival function over [0, x]"""
    return _evaluate(lambda v: spec.partial_mean(v) + np.maximum(v, 0.0) * spec.survival(v), x)


def quantile(spec: DistributionSpec, p: float) -> float:
    return spec.quantile(p)


def char_coefficient(spec: DistributionSpec, m: int) -> CharCoefficient:
    """
    gamma_m = E[exp(2 pi i m T)]

    Closed form for every variant except LogNormal, which goes through
    oscillatory quadrature.

    Raises:
        ValidationFailure: If m is zero or not an integer
        QuadratureFailure: If quadrature does not converge
    """
    if int(m) != m or m == 0:
        raise ValidationFailure(f"m must be a nonzero integer, got {m}")
    return CharCoefficient.from_value(int(m), spec.char_value(int(m)))


def is_continuous(spec: DistributionSpec) -> bool:
    return spec.is_continuous
