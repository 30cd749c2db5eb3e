"""Rate functions H (geometric) and G (exponential) and their companions.

H(lam, mu) = mu*lam*ln(lam) - (1 + mu*lam) * ln((1 + mu*lam) / (1 + mu))
G(lam)     = lam - 1 - ln(lam)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Below this |lam - 1| the closed forms cancel catastrophically.
TAYLOR_WINDOW = 1e-8


@dataclass(frozen=True)
class RatePoint:
    lam: float
    mu: float | None = None

    def __post_init__(self):
        _check(lam=self.lam)
        if self.mu is not None:
            _check(mu=self.mu)


def _check(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be a positive finite real, got {v!r}")


def _log_ratio(lam: float, mu: float) -> float:
    # ln((1 + mu*lam) / (1 + mu)) as a single ln(1 + x)
    return math.log1p(mu * (lam - 1.0) / (1.0 + mu))


def rate_H(lam: float, mu: float) -> float:
    _check(lam=lam, mu=mu)
    d = lam - 1.0
    if abs(d) < TAYLOR_WINDOW:
        return mu * d * d / (2.0 * (1.0 + mu))
    value = mu * lam * math.log(lam) - (1.0 + mu * lam) * _log_ratio(lam, mu)
    return max(value, 0.0)


def rate_G(lam: float) -> float:
    _check(lam=lam)
    d = lam - 1.0
    if abs(d) < TAYLOR_WINDOW:
        return 0.5 * d * d
    return max(d - math.log(lam), 0.0)


def rate_H1H2(lam: float, mu: float) -> tuple[float, float]:
    """The binomial-coefficient part H1 and the probability part H2; H = H2 - H1."""
    _check(lam=lam, mu=mu)
    ml = mu * lam
    h1 = ml * math.log1p(1.0 / ml) + math.log1p(ml)
    h2 = math.log1p(mu) + ml * math.log1p(1.0 / mu)
    return h1, h2


def grad_H(lam: float, mu: float) -> tuple[float, float]:
    """(dH/dlam, dH/dmu) in closed form."""
    _check(lam=lam, mu=mu)
    d_lam = -mu * math.log1p(-(1.0 - 1.0 / lam) / (1.0 + mu))
    d_mu = (1.0 - lam) / (1.0 + mu) - lam * math.log1p((1.0 / lam - 1.0) / (1.0 + mu))
    return d_lam, d_mu


def hess_diag_H(lam: float, mu: float) -> tuple[float, float]:
    """(d2H/dlam2, d2H/dmu2); the first is positive, the second nonpositive."""
    _check(lam=lam, mu=mu)
    d2_lam = mu / (lam * (1.0 + mu * lam))
    d2_mu = -((lam - 1.0) ** 2) / ((1.0 + mu) ** 2 * (1.0 + mu * lam))
    return d2_lam, d2_mu


# (lam_lo, lam_hi, mu_lo, mu_hi); bounds are inclusive except a zero lower bound.
PROP_CASE_DOMAINS = {
    1: (0.0, 1.0, 0.0, math.inf),
    2: (1.0, 2.0, 0.0, math.inf),
    3: (2.0, math.inf, 0.0, math.inf),
    4: (3.0, math.inf, 0.0, 1.0 / 3.0),
    5: (0.0, 1.0 / 3.0, 3.0, math.inf),
}


def in_prop_domain(case: int, lam: float, mu: float) -> bool:
    lam_lo, lam_hi, mu_lo, mu_hi = PROP_CASE_DOMAINS[case]
    lam_ok = (lam > lam_lo if lam_lo == 0 else lam >= lam_lo) and lam <= lam_hi
    mu_ok = (mu > mu_lo if mu_lo == 0 else mu >= mu_lo) and mu <= mu_hi
    return lam_ok and mu_ok


def prop_lower_bound(case: int, lam: float, mu: float) -> float:
    """Simplified lower bound on H(lam, mu) valid on the case's domain."""
    _check(lam=lam, mu=mu)
    if case not in PROP_CASE_DOMAINS:
        raise DomainError(f"case must be one of 1..5, got {case!r}")
    if not in_prop_domain(case, lam, mu):
        raise DomainError(f"(lambda={lam}, mu={mu}) lies outside the domain of case {case}")
    scale = mu / (1.0 + mu)
    if case == 1:
        return scale * (lam - 1.0) ** 2 / 2.0
    if case == 2:
        return scale * (lam - 1.0) ** 2 / 4.0
    if case == 3:
        return scale * (lam - 1.0) / 4.0
    if case == 4:
        return mu * lam / 4.0 * math.log(min(lam, 1.0 / mu))
    return 0.25 * math.log(min(1.0 / lam, mu))


def delta_terms(lam: float, mu: float) -> tuple[float, float]:
    """Slack constants of the geometric anti-concentration certificates."""
    _check(lam=lam, mu=mu)
    delta_u = 7.0 / 6.0 + math.log(lam + 2.0 / mu)
    delta_l = 1.0 / 6.0 + 1.5 * math.log1p(1.0 / (lam * mu))
    return delta_u, delta_l
