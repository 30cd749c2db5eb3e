"""Geometric (failure-count) and exponential laws, tail queries, and samplers."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError

# Counter-based generator; recorded in Monte Carlo reports.
GENERATOR_ID = "numpy.random.Philox(4x64)+open-uniform-52bit"


class Kind(str, enum.Enum):
    GEOMETRIC = "geometric"
    EXPONENTIAL = "exponential"


class Side(str, enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite real, got {value!r}")
    return value


@dataclass(frozen=True)
class GeometricSpec:
    """Pr[X = k] = p (1 - p)^k on k = 0, 1, 2, ...; mean mu = (1 - p) / p."""

    mu: float
    p: float

    kind = Kind.GEOMETRIC

    def __post_init__(self):
        _positive("mu", self.mu)
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")

    @property
    def log_q(self) -> float:
        """ln(1 - p) = ln(mu / (1 + mu)), evaluated without forming 1 - p."""
        return -math.log1p(1.0 / self.mu)


@dataclass(frozen=True)
class ExponentialSpec:
    """Density rho exp(-rho y) on y >= 0; mean mu = 1 / rho."""

    mu: float
    rho: float

    kind = Kind.EXPONENTIAL

    def __post_init__(self):
        _positive("mu", self.mu)
        _positive("rho", self.rho)


DistributionSpec = Union[GeometricSpec, ExponentialSpec]


def make_spec(kind, *, mu: float | None = None, p: float | None = None,
              rho: float | None = None) -> DistributionSpec:
    """Build a spec from exactly one of its parameters."""
    kind = Kind(kind)
    given = [name for name, v in (("mu", mu), ("p", p), ("rho", rho)) if v is not None]
    if len(given) != 1:
        raise DomainError(f"exactly one of mu, p, rho must be given, got {given}")
    if kind is Kind.GEOMETRIC:
        if rho is not None:
            raise DomainError("rho does not parameterize a geometric law")
        if mu is not None:
            mu = _positive("mu", mu)
            return GeometricSpec(mu=mu, p=1.0 / (1.0 + mu))
        p = float(p)
        if not 0 < p < 1:
            raise DomainError(f"p must lie in (0, 1), got {p!r}")
        return GeometricSpec(mu=(1.0 - p) / p, p=p)
    if p is not None:
        raise DomainError("p does not parameterize an exponential law")
    if mu is not None:
        mu = _positive("mu", mu)
        return ExponentialSpec(mu=mu, rho=1.0 / mu)
    rho = _positive("rho", rho)
    return ExponentialSpec(mu=1.0 / rho, rho=rho)


@dataclass(frozen=True)
class TailQuery:
    """The event {mean of n draws >= lam * mu} (upper) or {<= lam * mu} (lower)."""

    dist: DistributionSpec
    n: int
    lam: float
    side: Side

    def __post_init__(self):
        if not isinstance(self.dist, (GeometricSpec, ExponentialSpec)):
            raise DomainError(f"unknown distribution spec {self.dist!r}")
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise DomainError(f"n must be a positive integer, got {n!r}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "lam", _positive("lambda", self.lam))
        object.__setattr__(self, "side", Side(self.side))

    @property
    def kind(self) -> Kind:
        return self.dist.kind

    @property
    def mu(self) -> float:
        return self.dist.mu

    def describe(self) -> dict:
        return {"dist": self.kind.value, "mu": self.mu, "lambda": self.lam,
                "n": self.n, "side": self.side.value}


def log_density(spec: DistributionSpec, point) -> float:
    if isinstance(spec, GeometricSpec):
        if isinstance(point, bool) or not isinstance(point, (int, np.integer)):
            if not (isinstance(point, float) and point.is_integer()):
                raise DomainError(f"geometric support is the nonnegative integers, got {point!r}")
        k = int(point)
        if k < 0:
            raise DomainError(f"geometric support is the nonnegative integers, got {point!r}")
        return math.log(spec.p) + k * spec.log_q
    y = float(point)
    if not y >= 0:
        raise DomainError(f"exponential support is [0, inf), got {point!r}")
    return math.log(spec.rho) - spec.rho * y


def density(spec: DistributionSpec, point) -> float:
    """Geometric pmf p (1-p)^k or exponential pdf rho exp(-rho y)."""
    return math.exp(log_density(spec, point))


def open_uniforms(bitgen: np.random.BitGenerator, size: int) -> np.ndarray:
    """Uniform variates on the open interval (0, 1) from the top 52 raw bits."""
    raw = bitgen.random_raw(size)
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


def inverse_cdf(spec: DistributionSpec, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if isinstance(spec, GeometricSpec):
        return np.floor(np.log(u) / spec.log_q).astype(np.int64)
    return -spec.mu * np.log(u)


def sample(spec: DistributionSpec, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws, deterministic in (spec, n, seed)."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    bitgen = np.random.Philox(int(seed) % 2**64)
    return inverse_cdf(spec, open_uniforms(bitgen, int(n)))
