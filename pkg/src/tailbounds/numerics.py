"""Log-domain scalar primitives.

``ln_factorial`` is an exact cumulative sum of ``ln k`` (Neumaier-compensated)
backed by a lazily grown table, so repeated lookups inside tail sums are O(1).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BudgetExceeded, DomainError

LN_FACTORIAL_CAP = 10**8
LN_2PI = math.log(2.0 * math.pi)

NEG_INF = float("-inf")


def _check_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    return int(value)


class _LnFactorialTable:
    """Growing table of ln(k!) for k = 0..size-1.

    Each entry is the Neumaier running sum kept as an unevaluated pair
    (hi, lo), so differences of two entries are accurate to the rounding of
    the ln k terms between them rather than to the size of ln(m!).
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.hi = np.zeros(1)
        self.lo = np.zeros(1)
        self._s = 0.0
        self._c = 0.0

    def ensure(self, m: int) -> "_LnFactorialTable":
        if m > LN_FACTORIAL_CAP:
            raise BudgetExceeded(
                f"ln_factorial({m}) exceeds the exact-summation cap {LN_FACTORIAL_CAP}"
            )
        if m < len(self.hi):
            return self
        with self._lock:
            start = len(self.hi)
            if m < start:
                return self
            stop = min(max(m + 1, 2 * start, 1024), LN_FACTORIAL_CAP + 1)
            s, c = self._s, self._c
            log = math.log
            his, los = [], []
            for k in range(start, stop):
                x = log(k)
                t = s + x
                if abs(s) >= abs(x):
                    c += (s - t) + x
                else:
                    c += (x - t) + s
                s = t
                his.append(s)
                los.append(c)
            self._s, self._c = s, c
            lo = np.concatenate([self.lo, np.asarray(los)])
            self.hi = np.concatenate([self.hi, np.asarray(his)])
            self.lo = lo
            return self


_TABLE = _LnFactorialTable()


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def ln_factorial(m: int) -> float:
    """Return ln(m!) by compensated summation of ln k, k = 1..m."""
    m = _check_int("m", m)
    if m < 0:
        raise DomainError(f"ln_factorial requires m >= 0, got {m}")
    table = _TABLE.ensure(m)
    return float(table.hi[m] + table.lo[m])


def ln_factorial_array(ks: np.ndarray) -> np.ndarray:
    """Vectorised ``ln_factorial`` for a nonnegative integer array."""
    ks = np.asarray(ks, dtype=np.int64)
    if ks.size == 0:
        return np.zeros(0)
    if ks.min() < 0:
        raise DomainError("ln_factorial requires nonnegative arguments")
    table = _TABLE.ensure(int(ks.max()))
    return table.hi[ks] + table.lo[ks]


def ln_binomial_array(a: int, ks: np.ndarray) -> np.ndarray:
    """ln C(a, k) for each k in ``ks`` (0 <= k <= a), in double-double arithmetic."""
    ks = np.asarray(ks, dtype=np.int64)
    if ks.size and (ks.min() < 0 or ks.max() > a):
        raise DomainError(f"ln_binomial requires 0 <= k <= {a}")
    table = _TABLE.ensure(int(a))
    hi, lo = table.hi, table.lo
    rest = a - ks
    s1, e1 = _two_sum(hi[a], -hi[ks])
    s2, e2 = _two_sum(s1, -hi[rest])
    return s2 + (e1 + e2 + (lo[a] - lo[ks] - lo[rest]))


@dataclass(frozen=True)
class StirlingBracket:
    m: int
    lower: float
    upper: float

    def gap(self, value: float) -> float:
        """Signed distance by which ``value`` falls outside the bracket (<= 0 inside)."""
        return max(self.lower - value, value - self.upper)

    def contains(self, value: float, tolerance: float = 0.0) -> bool:
        return self.gap(value) <= tolerance


def stirling_bounds(m: int) -> StirlingBracket:
    """Robbins' two-sided bracket on ln(m!)."""
    m = _check_int("m", m)
    if m < 1:
        raise DomainError(f"stirling_bounds requires m >= 1, got {m}")
    base = (m + 0.5) * math.log(m) - m + 0.5 * LN_2PI
    return StirlingBracket(m, base + 1.0 / (12 * m + 1), base + 1.0 / (12 * m))


def ln_binomial(a: int, b: int) -> float:
    a = _check_int("a", a)
    b = _check_int("b", b)
    if b < 0 or a < 0 or b > a:
        raise DomainError(f"ln_binomial requires 0 <= b <= a, got ({a}, {b})")
    return float(ln_binomial_array(a, np.array([b]))[0])


def log_sum_exp(terms: Iterable[float]) -> float:
    """Return ln(sum(exp(t))) shifted by the largest term.

    The shifted exponentials are added with ``math.fsum`` (correctly rounded),
    so the result does not depend on the order of ``terms``.
    """
    arr = np.asarray(list(terms) if not isinstance(terms, np.ndarray) else terms, dtype=float)
    if arr.size == 0:
        raise DomainError("log_sum_exp of an empty list")
    peak = float(arr.max())
    if peak == NEG_INF:
        return NEG_INF
    if math.isinf(peak) or math.isnan(peak):
        return peak
    return peak + math.log(math.fsum(np.exp(arr - peak)))


def log1mexp(x: float) -> float:
    """Stable ln(1 - e^x) for x <= 0."""
    if x > 0:
        raise DomainError(f"log1mexp requires x <= 0, got {x}")
    if x == 0:
        return NEG_INF
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))
