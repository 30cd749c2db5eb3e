"""Chernoff exponent curves, their closed-form optimisers, and a numeric check.

For the geometric law the bound on the upper tail is exp(-n f(t)) with
f(t) = lam*mu*t + ln(1 + mu - mu e^t), on the lower tail exp(n g(t)) with
g(t) = lam*mu*t - ln(1 + mu - mu e^-t); for the exponential upper tail it is
exp(-n h(t)) with h(t) = lam*mu*t + ln(1 - mu t).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .distributions import DistributionSpec, ExponentialSpec, GeometricSpec
from .errors import DomainError, NonConvergence, SideMismatch

VALUE_FLATNESS = 1e-13
ITERATION_CAP = 10**4
BRACKET_EPS = 1e-12


class Family(str, enum.Enum):
    GEOM_UPPER = "geom_upper"
    GEOM_LOWER = "geom_lower"
    EXP_UPPER = "exp_upper"


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class ExponentCurve:
    family: Family
    lam: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        for name in ("lam", "mu"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be a positive finite real, got {v!r}")

    @property
    def domain(self) -> tuple[float, float]:
        """Open interval of admissible t."""
        if self.family is Family.GEOM_UPPER:
            return 0.0, math.log1p(1.0 / self.mu)
        if self.family is Family.GEOM_LOWER:
            return 0.0, math.inf
        return 0.0, 1.0 / self.mu

    @property
    def maximize(self) -> bool:
        return self.family is not Family.GEOM_LOWER


@dataclass(frozen=True)
class OptimumReport:
    t_star: float
    value: float
    method: Method
    iterations: int
    family: Family

    @property
    def rate(self) -> float:
        """Nonnegative bound exponent (g is reported with its sign flipped)."""
        return -self.value if self.family is Family.GEOM_LOWER else self.value


def _raw_exponent(curve: ExponentCurve, t: float) -> float:
    lm = curve.lam * curve.mu
    mu = curve.mu
    if curve.family is Family.GEOM_UPPER:
        return lm * t + math.log1p(-mu * math.expm1(t))
    if curve.family is Family.GEOM_LOWER:
        return lm * t - math.log1p(-mu * math.expm1(-t))
    return lm * t + math.log1p(-mu * t)


def exponent(curve: ExponentCurve, t: float) -> float:
    lo, hi = curve.domain
    if not lo < t < hi:
        raise DomainError(f"t={t!r} outside the open domain ({lo}, {hi}) of {curve.family.value}")
    return _raw_exponent(curve, t)


def exponent_derivative(curve: ExponentCurve, t: float) -> float:
    """d/dt of the exponent; monotone on the domain (decreasing for f, h; increasing for g)."""
    lm = curve.lam * curve.mu
    mu = curve.mu
    if curve.family is Family.GEOM_UPPER:
        return lm - mu * math.exp(t) / (1.0 - mu * math.expm1(t))
    if curve.family is Family.GEOM_LOWER:
        return lm - mu * math.exp(-t) / (1.0 - mu * math.expm1(-t))
    return lm - mu / (1.0 - mu * t)


def _check_side(curve: ExponentCurve) -> None:
    if curve.family is Family.GEOM_LOWER:
        if not curve.lam < 1:
            raise SideMismatch(f"lower-tail curve needs lambda in (0, 1), got {curve.lam}")
    elif not curve.lam > 1:
        raise SideMismatch(f"upper-tail curve needs lambda > 1, got {curve.lam}")


def closed_form_optimum(curve: ExponentCurve) -> OptimumReport:
    _check_side(curve)
    lam, mu = curve.lam, curve.mu
    if curve.family is Family.GEOM_UPPER:
        t = math.log1p(1.0 / mu) - math.log1p(1.0 / (mu * lam))
    elif curve.family is Family.GEOM_LOWER:
        t = math.log1p(1.0 / (mu * lam)) - math.log1p(1.0 / mu)
    else:
        t = (1.0 - 1.0 / lam) / mu
    return OptimumReport(t, _raw_exponent(curve, t), Method.CLOSED_FORM, 0, curve.family)


def _flat(curve: ExponentCurve, lo: float, hi: float) -> bool:
    # strong curvature can leave a visible value error inside a narrow bracket
    m = _raw_exponent(curve, 0.5 * (lo + hi))
    spread = max(abs(_raw_exponent(curve, lo) - m), abs(_raw_exponent(curve, hi) - m))
    return spread <= VALUE_FLATNESS * max(1.0, abs(m))


def numeric_optimum(curve: ExponentCurve, tolerance: float = 1e-10) -> OptimumReport:
    """Locate the optimum by bisection on the sign of the monotone derivative.

    Only the derivative's sign is used, so the search does not rely on the
    closed-form optimiser. For g the upper end of the bracket is found by
    doubling from t = 1 until the derivative turns positive.
    """
    _check_side(curve)
    if not tolerance > 0:
        raise DomainError(f"tolerance must be positive, got {tolerance!r}")
    lo, hi = curve.domain
    iterations = 0
    if math.isinf(hi):
        hi = 1.0
        while exponent_derivative(curve, hi) < 0:
            hi *= 2.0
            iterations += 1
            if iterations >= ITERATION_CAP or math.isinf(hi):
                raise NonConvergence("could not bracket the minimum of g")
    else:
        width = hi - lo
        lo, hi = lo + BRACKET_EPS * width, hi - BRACKET_EPS * width
    # ascending means the exponent still increases (for maximisation) at that t
    sign = 1.0 if curve.maximize else -1.0
    while hi - lo > tolerance or not _flat(curve, lo, hi):
        if iterations >= ITERATION_CAP:
            raise NonConvergence(f"bracket width {hi - lo} after {iterations} iterations")
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sign * exponent_derivative(curve, mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    t = 0.5 * (lo + hi)
    return OptimumReport(t, _raw_exponent(curve, t), Method.NUMERIC, iterations, curve.family)


def mgf(spec: DistributionSpec, t: float) -> float:
    """E[e^{tX}] for one draw; finite only left of the convergence boundary."""
    t = float(t)
    if isinstance(spec, GeometricSpec):
        if not t < math.log1p(1.0 / spec.mu):
            raise DomainError(f"geometric mgf diverges at t={t} >= ln(1 + 1/mu)")
        return 1.0 / (1.0 - spec.mu * math.expm1(t))
    if isinstance(spec, ExponentialSpec):
        if not t < 1.0 / spec.mu:
            raise DomainError(f"exponential mgf diverges at t={t} >= 1/mu")
        return 1.0 / (1.0 - spec.mu * t)
    raise DomainError(f"unknown distribution spec {spec!r}")


def optimized_rate(family: Family, lam: float, mu: float) -> float:
    """Nonnegative optimised exponent via the closed-form optimiser."""
    return closed_form_optimum(ExponentCurve(family, lam, mu)).rate


__all__ = [
    "ExponentCurve", "Family", "Method", "OptimumReport", "closed_form_optimum",
    "exponent", "exponent_derivative", "mgf", "numeric_optimum", "optimized_rate",
]
