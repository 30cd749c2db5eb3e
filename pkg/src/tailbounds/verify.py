"""Grid sweeps that check every inequality against exact oracles."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import bounds
from .bounds import CertMode
from .distributions import GeometricSpec, Kind, Side, TailQuery, make_spec
from .errors import BudgetExceeded, DomainError, PreconditionError, SideMismatch
from .exact import exact_tail
from .numerics import ln_factorial_array, stirling_bounds
from .rates import (
    PROP_CASE_DOMAINS, delta_terms, in_prop_domain, prop_lower_bound, rate_G, rate_H,
)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MU = tuple(float(x) for x in 10.0 ** np.linspace(-2.0, 2.0, 13))
DEFAULT_LAMBDA = (0.05, 0.1, 0.2, 0.33, 0.5, 0.8, 0.95, 1.05, 1.25, 2.0, 3.0, 5.0, 10.0, 20.0)
DEFAULT_N = (1, 2, 5, 10, 50, 200)
STIRLING_MAX_M = 10**5
COMPARISON_MU = (0.001, 0.01, 0.1)
COMPARISON_LAMBDA = (0.2, 0.5, 2.0, 5.0, 10.0)


class Suite(str, enum.Enum):
    THEOREM1 = "theorem1"
    PROPOSITION = "proposition"
    SANDWICH = "sandwich"
    STIRLING = "stirling"
    COMPARISONS = "comparisons"
    ALL = "all"


@dataclass(frozen=True)
class GridSpec:
    mu_values: tuple[float, ...] = DEFAULT_MU
    lambda_values: tuple[float, ...] = DEFAULT_LAMBDA
    n_values: tuple[int, ...] = DEFAULT_N
    distributions: tuple[Kind, ...] = (Kind.GEOMETRIC, Kind.EXPONENTIAL)
    sides: tuple[Side, ...] = (Side.UPPER, Side.LOWER)

    def __post_init__(self):
        try:
            object.__setattr__(self, "mu_values", tuple(float(v) for v in self.mu_values))
            object.__setattr__(self, "lambda_values", tuple(float(v) for v in self.lambda_values))
            object.__setattr__(self, "distributions", tuple(Kind(d) for d in self.distributions))
            object.__setattr__(self, "sides", tuple(Side(s) for s in self.sides))
        except (TypeError, ValueError) as exc:
            raise DomainError(f"malformed grid: {exc}") from None
        for name in ("mu_values", "lambda_values", "n_values", "distributions", "sides"):
            if not getattr(self, name):
                raise DomainError(f"grid field {name} is empty")
        if not all(v > 0 and math.isfinite(v) for v in self.mu_values + self.lambda_values):
            raise DomainError("grid mu and lambda values must be positive and finite")
        if not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in self.n_values):
            raise DomainError("grid n values must be positive integers")
        object.__setattr__(self, "n_values", tuple(self.n_values))

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        """Read the grid-file layout: keys mu, lambda, n, distributions, sides."""
        if not isinstance(data, dict):
            raise DomainError("grid file must hold a JSON object")
        unknown = set(data) - {"mu", "lambda", "n", "distributions", "sides"}
        if unknown:
            raise DomainError(f"unknown grid keys: {sorted(unknown)}")
        kwargs = {}
        for key, attr in (("mu", "mu_values"), ("lambda", "lambda_values"), ("n", "n_values"),
                          ("distributions", "distributions"), ("sides", "sides")):
            if key in data:
                if not isinstance(data[key], list):
                    raise DomainError(f"grid key {key} must be a list")
                kwargs[attr] = tuple(data[key])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {"mu": list(self.mu_values), "lambda": list(self.lambda_values),
                "n": list(self.n_values),
                "distributions": [d.value for d in self.distributions],
                "sides": [s.value for s in self.sides]}

    def queries(self) -> Iterator[TailQuery]:
        """Grid points in a fixed order; exponential points ignore mu but are kept."""
        for kind in self.distributions:
            for mu in self.mu_values:
                spec = make_spec(kind, mu=mu)
                for lam in self.lambda_values:
                    for n in self.n_values:
                        for side in self.sides:
                            yield TailQuery(spec, n, lam, side)


@dataclass(frozen=True)
class Counterexample:
    suite: str
    query: TailQuery | None
    lhs_log: float
    rhs_log: float
    violation: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"suite": self.suite,
                "query": self.query.describe() if self.query is not None else None,
                "lhs_log": self.lhs_log, "rhs_log": self.rhs_log,
                "violation": self.violation, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    tolerance: float
    mode: str
    points_checked: int = 0
    skipped: int = 0
    max_violation: float = 0.0
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def check(self, lhs_log: float, rhs_log: float, query: TailQuery | None,
              suite: str, detail: str = "") -> None:
        """Record the claim lhs <= rhs (log domain)."""
        self.points_checked += 1
        gap = lhs_log - rhs_log
        if math.isnan(gap):
            gap = math.inf
        self.max_violation = max(self.max_violation, gap)
        if gap > self.tolerance:
            self.counterexamples.append(
                Counterexample(suite, query, lhs_log, rhs_log, gap, detail))

    def merge(self, other: "SuiteReport") -> None:
        self.points_checked += other.points_checked
        self.skipped += other.skipped
        self.max_violation = max(self.max_violation, other.max_violation)
        self.counterexamples.extend(other.counterexamples)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "mode": self.mode, "tolerance": self.tolerance,
                "points_checked": self.points_checked, "skipped": self.skipped,
                "max_violation": self.max_violation, "passed": self.passed,
                "counterexamples": [c.to_dict() for c in self.counterexamples]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _theorem1(grid: GridSpec, report: SuiteReport) -> None:
    for q in grid.queries():
        b = bounds.thm1_bound(q)
        if not b.applicable:
            report.skipped += 1
            continue
        try:
            ex = exact_tail(q).log_value
        except BudgetExceeded:
            report.skipped += 1
            continue
        report.check(ex, b.log_bound, q, "theorem1", "exact <= exp(-n*rate)")


def proposition_grid(case: int, points: int = 200) -> list[tuple[float, float]]:
    """A points-sized product grid covering the case domain, boundaries included."""
    n_lam, n_mu = 20, points // 20
    lam_lo, lam_hi, mu_lo, mu_hi = PROP_CASE_DOMAINS[case]
    lam_lo = lam_lo or 1e-4
    lam_hi = lam_hi if math.isfinite(lam_hi) else 1e4
    mu_lo = mu_lo or 1e-4
    mu_hi = mu_hi if math.isfinite(mu_hi) else 1e4
    if case in (2,):
        lams = np.linspace(lam_lo, lam_hi, n_lam)
    else:
        lams = np.geomspace(lam_lo, lam_hi, n_lam)
    mus = np.geomspace(mu_lo, mu_hi, n_mu)
    # pin the exact endpoints (geomspace may round them)
    lams[0], lams[-1], mus[0], mus[-1] = lam_lo, lam_hi, mu_lo, mu_hi
    return [(float(l), float(m)) for l in lams for m in mus]


def _proposition(grid: GridSpec, report: SuiteReport) -> None:
    for case in sorted(PROP_CASE_DOMAINS):
        points = proposition_grid(case)
        points += [(lam, mu) for lam in grid.lambda_values for mu in grid.mu_values
                   if in_prop_domain(case, lam, mu)]
        for lam, mu in points:
            q = TailQuery(make_spec(Kind.GEOMETRIC, mu=mu), 1, lam,
                          Side.UPPER if lam >= 1 else Side.LOWER)
            report.check(prop_lower_bound(case, lam, mu), rate_H(lam, mu), q,
                         "proposition", f"case {case}: surrogate <= H")


def _sandwich(grid: GridSpec, report: SuiteReport, mode: CertMode) -> None:
    for q in grid.queries():
        try:
            cert = bounds.certificate_bound(q, mode)
        except (SideMismatch, PreconditionError):
            report.skipped += 1
            continue
        try:
            ex = exact_tail(q).log_value
        except BudgetExceeded:
            report.skipped += 1
            continue
        report.check(cert.log_bound, ex, q, "sandwich", f"{cert.method.value} <= exact")
        report.check(ex, bounds.thm1_bound(q).log_bound, q, "sandwich", "exact <= theorem1")


def _stirling(report: SuiteReport, max_m: int = STIRLING_MAX_M) -> None:
    ms = np.arange(1, max_m + 1)
    exact = ln_factorial_array(ms)
    base = (ms + 0.5) * np.log(ms) - ms + 0.5 * math.log(2 * math.pi)
    lower = base + 1.0 / (12 * ms + 1)
    upper = base + 1.0 / (12 * ms)
    gap = np.maximum(lower - exact, exact - upper)
    report.points_checked += int(ms.size)
    report.max_violation = max(report.max_violation, float(gap.max()))
    for i in np.flatnonzero(gap > report.tolerance):
        m = int(ms[i])
        br = stirling_bounds(m)
        lhs, rhs = (br.lower, float(exact[i])) if br.lower > exact[i] else (float(exact[i]), br.upper)
        report.counterexamples.append(
            Counterexample("stirling", None, lhs, rhs, float(gap[i]), f"m={m}"))


def _comparisons(grid: GridSpec, report: SuiteReport) -> None:
    lams = sorted(set(COMPARISON_LAMBDA) | set(grid.lambda_values))
    mus = sorted(set(COMPARISON_MU) | {m for m in grid.mu_values if m <= 0.1})
    for mu in mus:
        spec = make_spec(Kind.GEOMETRIC, mu=mu)
        for lam in lams:
            if lam == 1:
                continue
            side = Side.UPPER if lam > 1 else Side.LOWER
            q = TailQuery(spec, 1, lam, side)
            janson = bounds.janson_exponent(lam, mu)
            # small-mu tightness: Janson exponent <= H
            if mu <= 0.1:
                report.check(janson, rate_H(lam, mu), q, "comparisons", "janson <= H (mu <= 0.1)")
    for mu in sorted(set(grid.mu_values) | set(COMPARISON_MU)):
        spec = make_spec(Kind.GEOMETRIC, mu=mu)
        for lam in lams:
            if lam == 1:
                continue
            side = Side.UPPER if lam > 1 else Side.LOWER
            q = TailQuery(spec, 1, lam, side)
            # z - ln(1 + z) <= z^2/2 needs z > 0, i.e. lambda > 1
            if side is Side.UPPER:
                report.check(bounds.janson_exponent(lam, mu), bounds.janson_quadratic(q), q,
                             "comparisons", "janson exponent <= quadratic relaxation")
            # large-mu, small-lambda regime: H beats the Agrawal lower-tail exponent
            if mu >= math.e**2 and lam < math.e**-2:
                agr, _ = bounds.agrawal_exponent(side, lam, mu)
                if agr is None:
                    report.skipped += 1
                else:
                    report.check(agr, rate_H(lam, mu), q, "comparisons", "agrawal <= H")
            if side is Side.UPPER and mu > 1 and lam - 1 >= 1:
                # the catalog must flag the uncovered case instead of inventing a bound
                covered = bounds.agrawal_exponent(side, lam, mu)[0] is not None
                report.check(float(covered), 0.0, q, "comparisons",
                             "agrawal reports mu > 1, delta >= 1 as uncovered")
    # every applicable comparison bound must still bound the exact tail
    for q in grid.queries():
        if not isinstance(q.dist, GeometricSpec):
            continue
        reports = [r for r in (bounds.janson_bound(q), bounds.agrawal_bound(q)) if r.applicable]
        if not reports:
            report.skipped += 1
            continue
        try:
            ex = exact_tail(q).log_value
        except BudgetExceeded:
            report.skipped += 1
            continue
        for r in reports:
            report.check(ex, r.log_bound, q, "comparisons", f"exact <= {r.method.value}")


def run_suite(suite: Suite | str, grid: GridSpec | None = None,
              mode: CertMode | str = CertMode.REPAIRED,
              tolerance: float = DEFAULT_TOLERANCE) -> SuiteReport:
    suite, mode = Suite(suite), CertMode(mode)
    grid = grid if grid is not None else GridSpec()
    if not tolerance > 0:
        raise DomainError(f"tolerance must be positive, got {tolerance!r}")
    report = SuiteReport(suite.value, tolerance, mode.value)
    if suite in (Suite.THEOREM1, Suite.ALL):
        _theorem1(grid, report)
    if suite in (Suite.PROPOSITION, Suite.ALL):
        _proposition(grid, report)
    if suite in (Suite.SANDWICH, Suite.ALL):
        _sandwich(grid, report, mode)
    if suite in (Suite.STIRLING, Suite.ALL):
        _stirling(report)
    if suite in (Suite.COMPARISONS, Suite.ALL):
        _comparisons(grid, report)
    return report


def certificate_slack(query: TailQuery) -> float:
    """Additive slack beyond n*rate + ln(2 pi n)/2 in the repaired certificate."""
    n, lam = query.n, query.lam
    if isinstance(query.dist, GeometricSpec):
        delta_u, delta_l = delta_terms(lam, query.mu)
        return delta_u if query.side is Side.UPPER else delta_l
    slack = 1.0 / (12.0 * n)
    if query.side is Side.UPPER:
        slack += math.log(lam)
    return slack


def asymptotic_ratio(query: TailQuery) -> tuple[float, float]:
    """(-ln exact / (n * rate), certified upper end of that ratio)."""
    if query.lam == 1:
        raise DomainError("the ratio is undefined at lambda = 1")
    if not bounds.side_consistent(query):
        raise SideMismatch(f"lambda={query.lam} is on the wrong side of 1 for the "
                           f"{query.side.value} tail")
    # raises PreconditionError for the geometric lower tail with n < 1/(lam*mu)
    bounds.certificate_bound(query, CertMode.REPAIRED)
    n = query.n
    r = rate_H(query.lam, query.mu) if isinstance(query.dist, GeometricSpec) else rate_G(query.lam)
    ex = exact_tail(query).log_value
    ratio = -ex / (n * r)
    certified = 1.0 + (0.5 * math.log(2 * math.pi * n) + certificate_slack(query)) / (n * r)
    return ratio, certified
