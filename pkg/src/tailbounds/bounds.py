"""Catalog of tail bounds, all carried as natural-log values.

Upper bounds on the tail: the Chernoff bounds exp(-n H) / exp(-n G), and the
two comparison bounds for geometric sums (Janson; Agrawal et al.). Lower bounds
on the tail: the anti-concentration certificates, in the literal form and in a
repaired form for the exponential upper tail.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from .distributions import GeometricSpec, Side, TailQuery
from .errors import DomainError, PreconditionError, SideMismatch
from .exact import snap
from .numerics import LN_2PI
from .rates import delta_terms, rate_G, rate_H


class BoundMethod(str, enum.Enum):
    THEOREM1 = "theorem1"
    CERTIFICATE_PAPER = "certificate_paper"
    CERTIFICATE_REPAIRED = "certificate_repaired"
    JANSON = "janson"
    JANSON_QUADRATIC = "janson_quadratic"
    AGRAWAL = "agrawal"


class Direction(str, enum.Enum):
    UPPER_BOUNDS_TAIL = "upper_bounds_tail"
    LOWER_BOUNDS_TAIL = "lower_bounds_tail"


class CertMode(str, enum.Enum):
    PAPER = "paper"
    REPAIRED = "repaired"


_DIRECTION = {
    BoundMethod.CERTIFICATE_PAPER: Direction.LOWER_BOUNDS_TAIL,
    BoundMethod.CERTIFICATE_REPAIRED: Direction.LOWER_BOUNDS_TAIL,
}


@dataclass(frozen=True)
class BoundReport:
    method: BoundMethod
    log_bound: float
    applicable: bool = True
    notes: str = ""

    @property
    def direction(self) -> Direction:
        return _DIRECTION.get(self.method, Direction.UPPER_BOUNDS_TAIL)

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        d["direction"] = self.direction.value
        return d


def side_consistent(query: TailQuery) -> bool:
    """lam >= 1 for the upper tail, lam <= 1 for the lower tail."""
    return query.lam >= 1 if query.side is Side.UPPER else query.lam <= 1


def rate(query: TailQuery) -> float:
    if isinstance(query.dist, GeometricSpec):
        return rate_H(query.lam, query.mu)
    return rate_G(query.lam)


def thm1_bound(query: TailQuery) -> BoundReport:
    """Chernoff bound exp(-n * rate) on either tail."""
    if not side_consistent(query):
        return BoundReport(BoundMethod.THEOREM1, 0.0, False,
                           f"lambda={query.lam} is on the wrong side of 1 for the "
                           f"{query.side.value} tail")
    return BoundReport(BoundMethod.THEOREM1, -query.n * rate(query))


def certificate_bound(query: TailQuery, mode: CertMode | str = CertMode.REPAIRED) -> BoundReport:
    """Explicit lower bound on the tail probability.

    The repaired exponential upper-tail form keeps the factor 1/lam that the
    k = n - 1 Poisson term actually carries, adding ln(lam) to the exponent.
    """
    mode = CertMode(mode)
    n, lam = query.n, query.lam
    upper = query.side is Side.UPPER
    if upper and lam < 1:
        raise SideMismatch(f"upper-tail certificate needs lambda >= 1, got {lam}")
    if not upper and lam >= 1:
        raise SideMismatch(f"lower-tail certificate needs lambda < 1, got {lam}")
    stirling = 0.5 * math.log(n) + 0.5 * LN_2PI
    method = BoundMethod.CERTIFICATE_PAPER if mode is CertMode.PAPER else BoundMethod.CERTIFICATE_REPAIRED
    notes = ""
    if isinstance(query.dist, GeometricSpec):
        mu = query.mu
        delta_u, delta_l = delta_terms(lam, mu)
        if upper:
            slack = delta_u
        else:
            if math.floor(snap(lam * n * mu)) < 1:
                raise PreconditionError(
                    f"geometric lower-tail certificate needs n >= 1/(lambda*mu) = {1 / (lam * mu):.6g}, got n={n}")
            slack = delta_l
        return BoundReport(method, -(n * rate_H(lam, mu) + stirling + slack))
    slack = 1.0 / (12.0 * n)
    if upper and mode is CertMode.REPAIRED:
        slack += math.log(lam)
        notes = "includes the ln(lambda) term of the k = n-1 Poisson summand"
    return BoundReport(method, -(n * rate_G(lam) + stirling + slack), True, notes)


def _require_geometric(query: TailQuery, name: str) -> GeometricSpec:
    if not isinstance(query.dist, GeometricSpec):
        raise DomainError(f"{name} applies to geometric sums only")
    return query.dist


def janson_exponent(lam: float, mu: float) -> float:
    """z - ln(1 + z) with z = (lam - 1)(1 - p), p = 1/(1 + mu)."""
    z = (lam - 1.0) * mu / (1.0 + mu)
    return z - math.log1p(z)


def janson_bound(query: TailQuery) -> BoundReport:
    _require_geometric(query, "janson_bound")
    if not side_consistent(query):
        return BoundReport(BoundMethod.JANSON, 0.0, False,
                           f"lambda={query.lam} is on the wrong side of 1 for the "
                           f"{query.side.value} tail")
    return BoundReport(BoundMethod.JANSON, -query.n * janson_exponent(query.lam, query.mu))


def janson_quadratic(query: TailQuery) -> float:
    """z^2/2, the quadratic relaxation of the Janson exponent.

    It dominates the exponent only for z > 0 (lambda > 1); below 1 the
    inequality reverses. A comparator, not a tail bound.
    """
    _require_geometric(query, "janson_quadratic")
    mu = query.mu
    return mu * mu * (query.lam - 1.0) ** 2 / (2.0 * (1.0 + mu) ** 2)


def agrawal_exponent(side: Side, lam: float, mu: float) -> tuple[float | None, str]:
    """Per-sample exponent of the Agrawal et al. bound, or (None, reason)."""
    side = Side(side)
    delta = lam - 1.0 if side is Side.UPPER else 1.0 - lam
    if not delta > 0:
        return None, f"needs delta > 0, got delta={delta:.6g}"
    s = mu / (1.0 + mu)
    candidates = []
    if side is Side.UPPER:
        if mu <= 1:
            candidates.append(mu * delta**2 / (2.0 * (1.0 + delta) * (1.0 + mu) ** 2))
        if mu >= 1 and delta < 1:
            candidates.append(s * s * delta**2 / 6.0 * (3.0 - 2.0 * delta * s))
        if not candidates:
            return None, "no case covers the upper tail with mu >= 1 and delta >= 1"
    else:
        if delta >= 1:
            return None, "lower-tail cases need delta in (0, 1)"
        if mu <= 1:
            candidates.append(mu * delta**2 / (6.0 * (1.0 + mu) ** 2) * (3.0 - 2.0 * delta * s))
        if mu >= 1:
            candidates.append(s * s * delta**2 / 2.0)
    note = "mu = 1: both cases evaluated, larger exponent kept" if len(candidates) > 1 else ""
    return max(candidates), note


def agrawal_bound(query: TailQuery) -> BoundReport:
    _require_geometric(query, "agrawal_bound")
    exp_, note = agrawal_exponent(query.side, query.lam, query.mu)
    if exp_ is None:
        return BoundReport(BoundMethod.AGRAWAL, 0.0, False, note)
    return BoundReport(BoundMethod.AGRAWAL, -query.n * exp_, True, note)


def _inapplicable(method: BoundMethod, exc: Exception) -> BoundReport:
    return BoundReport(method, 0.0, False, f"{type(exc).__name__}: {exc}")


def compare_all(query: TailQuery, mode: CertMode | str = CertMode.REPAIRED) -> list[BoundReport]:
    """All catalog bounds for one query, tightest applicable upper bound first."""
    mode = CertMode(mode)
    reports = [thm1_bound(query)]
    geometric = isinstance(query.dist, GeometricSpec)
    for method, fn in ((BoundMethod.JANSON, janson_bound), (BoundMethod.AGRAWAL, agrawal_bound)):
        if geometric:
            reports.append(fn(query))
        else:
            reports.append(BoundReport(method, 0.0, False, "geometric sums only"))
    cert_method = BoundMethod.CERTIFICATE_PAPER if mode is CertMode.PAPER else BoundMethod.CERTIFICATE_REPAIRED
    try:
        reports.append(certificate_bound(query, mode))
    except DomainError as exc:
        reports.append(_inapplicable(cert_method, exc))

    def key(item):
        i, r = item
        if not r.applicable:
            return (2, 0.0, i)
        if r.direction is Direction.UPPER_BOUNDS_TAIL:
            return (0, r.log_bound, i)
        return (1, -r.log_bound, i)

    return [r for _, r in sorted(enumerate(reports), key=key)]


