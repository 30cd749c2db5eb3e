"""Exact tail probabilities, a brute-force convolution oracle, and Monte Carlo.

Geometric sums map to binomial events: with q = 1/(1 + mu) and S the sum of n
failure counts, S >= m iff fewer than n successes occur in m + n - 1 trials,
and S <= m iff at least n successes occur in m + n trials. Exponential sums map
to a Poisson count N of mean lam*n: mean >= lam*mu iff N < n.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import (
    GENERATOR_ID, ExponentialSpec, GeometricSpec, Side, TailQuery, inverse_cdf,
    open_uniforms,
)
from .errors import BudgetExceeded, DomainError
from .numerics import NEG_INF, ln_binomial_array, ln_factorial_array, log_sum_exp

TERM_CAP = 10**7
# Terms this far (in nats) below the running peak are dropped once the walk
# is moving away from the mode; at TERM_CAP terms the neglected mass is < 1e-15.
CUTOFF_NATS = 60.0
WALK_CHUNK = 4096
SNAP = 1e-9
MC_CHUNK = 1 << 16
BRUTE_FORCE_MAX_N = 6


@dataclass(frozen=True)
class LogProb:
    log_value: float

    def __post_init__(self):
        v = float(self.log_value)
        if math.isnan(v) or v > 1e-9:
            raise DomainError(f"not a log-probability: {v!r}")
        object.__setattr__(self, "log_value", min(v, 0.0))

    @property
    def prob(self) -> float:
        return math.exp(self.log_value)


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    trials: int
    seed: int
    generator_id: str
    hits: int


def snap(x: float) -> float:
    """Round x to the nearest integer when it is within SNAP of one."""
    r = round(x)
    return float(r) if abs(x - r) <= SNAP else x


def threshold(query: TailQuery) -> int:
    """Integer threshold on the geometric sum: ceil for upper, floor for lower."""
    x = snap(query.lam * query.n * query.mu)
    return math.ceil(x) if query.side is Side.UPPER else math.floor(x)


def _walk(logterm: Callable[[np.ndarray], np.ndarray], lo: int, hi: int | None,
          mode: int) -> float:
    """Log-sum of a unimodal log-term sequence over k in [lo, hi] (hi=None: infinite).

    Walks outward from the mode (clamped into the range) in chunks and stops
    on each side once the terms fall CUTOFF_NATS below the running peak.
    """
    start = min(max(mode, lo), hi) if hi is not None else max(mode, lo)
    pieces = []
    peak = NEG_INF
    count = 0

    def take(ks: np.ndarray) -> np.ndarray:
        nonlocal peak, count
        count += ks.size
        if count > TERM_CAP:
            raise BudgetExceeded(f"tail summation needs more than {TERM_CAP} terms")
        vals = logterm(ks)
        pieces.append((ks, vals))
        peak = max(peak, float(vals.max()))
        return vals

    take(np.array([start], dtype=np.int64))
    # rightward
    k = start + 1
    while hi is None or k <= hi:
        stop = k + WALK_CHUNK if hi is None else min(k + WALK_CHUNK, hi + 1)
        vals = take(np.arange(k, stop, dtype=np.int64))
        if vals[-1] < peak - CUTOFF_NATS:
            break
        k = stop
    # leftward
    k = start - 1
    while k >= lo:
        stop = max(k - WALK_CHUNK, lo - 1)
        vals = take(np.arange(k, stop, -1, dtype=np.int64))
        if vals[-1] < peak - CUTOFF_NATS:
            break
        k = stop
    ks = np.concatenate([p[0] for p in pieces])
    vals = np.concatenate([p[1] for p in pieces])
    return log_sum_exp(vals[np.argsort(ks, kind="stable")])


def _binomial_range(trials: int, log_q: float, log_r: float, lo: int, hi: int) -> float:
    """ln Pr[lo <= Z <= hi] for Z ~ Binomial(trials, q); log_r = ln(1 - q)."""
    lo, hi = max(lo, 0), min(hi, trials)
    if lo > hi:
        return NEG_INF

    def logterm(ks):
        return ln_binomial_array(trials, ks) + ks * log_q + (trials - ks) * log_r

    mode = math.floor((trials + 1) * math.exp(log_q))
    return _walk(logterm, lo, hi, mode)


def geometric_sum_log_sf(n: int, mu: float, m: int) -> float:
    """ln Pr[X_1 + ... + X_n >= m] for i.i.d. geometric failure counts of mean mu."""
    if m <= 0:
        return 0.0
    log_q = -math.log1p(mu)
    log_r = -math.log1p(1.0 / mu)
    return _binomial_range(m + n - 1, log_q, log_r, 0, n - 1)


def geometric_sum_log_cdf(n: int, mu: float, m: int) -> float:
    """ln Pr[X_1 + ... + X_n <= m]."""
    if m < 0:
        return NEG_INF
    log_q = -math.log1p(mu)
    log_r = -math.log1p(1.0 / mu)
    return _binomial_range(m + n, log_q, log_r, n, m + n)


def _poisson_logterm(nu: float):
    log_nu = math.log(nu)
    return lambda ks: ks * log_nu - ln_factorial_array(ks) - nu


def poisson_log_cdf(nu: float, m: int) -> float:
    """ln Pr[N <= m] for N ~ Poisson(nu)."""
    if m < 0:
        return NEG_INF
    return _walk(_poisson_logterm(nu), 0, m, math.floor(nu))


def poisson_log_sf(nu: float, m: int) -> float:
    """ln Pr[N >= m] for N ~ Poisson(nu), summed directly over the infinite tail."""
    if m <= 0:
        return 0.0
    return _walk(_poisson_logterm(nu), m, None, math.floor(nu))


def exact_tail(query: TailQuery) -> LogProb:
    """Exact log tail probability via the binomial / Poisson counting identities."""
    n, lam = query.n, query.lam
    if isinstance(query.dist, GeometricSpec):
        m = threshold(query)
        if query.side is Side.UPPER:
            return LogProb(geometric_sum_log_sf(n, query.mu, m))
        return LogProb(geometric_sum_log_cdf(n, query.mu, m))
    nu = lam * n
    if query.side is Side.UPPER:
        return LogProb(poisson_log_cdf(nu, n - 1))
    return LogProb(poisson_log_sf(nu, n))


def brute_force_tail(query: TailQuery) -> LogProb:
    """Independent oracle for n <= 6.

    Geometric: n-fold convolution of the truncated pmf in probability space.
    Exponential: the Erlang survival function obtained by repeated integration
    by parts, summed in probability space with exact integer factorials.
    """
    n = query.n
    if n > BRUTE_FORCE_MAX_N:
        raise BudgetExceeded(f"brute force supports n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if isinstance(query.dist, GeometricSpec):
        p, mu = query.dist.p, query.mu
        one_minus_p = mu / (1.0 + mu)
        m = threshold(query)
        # Pr[S > K] <= n (1-p)^(K//n + 1); keep that below 1e-30
        per_var = math.ceil(math.log(1e-30 / n) / math.log(one_minus_p))
        K = max(n * per_var, m + 1)
        pmf = p * one_minus_p ** np.arange(K + 1)
        total = np.array([1.0])
        for _ in range(n):
            total = np.convolve(total, pmf)[: K + 1]
        if query.side is Side.UPPER:
            prob = math.fsum(total[m:]) if m > 0 else 1.0
        else:
            prob = math.fsum(total[: m + 1]) if m >= 0 else 0.0
        return LogProb(math.log(prob) if prob > 0 else NEG_INF)
    x = query.lam * n
    if query.side is Side.UPPER:
        prob = math.exp(-x) * math.fsum(x**k / math.factorial(k) for k in range(n))
    else:
        # Poisson terms by the ratio x/(k+1) so no power overflows
        t = math.exp(-x) * x**n / math.factorial(n)
        terms = [t]
        k = n
        while k <= x or t >= 1e-20 * max(terms):
            k += 1
            t *= x / k
            terms.append(t)
        prob = math.fsum(terms)
    return LogProb(math.log(prob))


def _mc_chunk_hits(query: TailQuery, size: int, seed: int) -> int:
    bitgen = np.random.Philox(seed % 2**64)
    n = query.n
    rows_per_block = max(1, (1 << 20) // n)
    hits = 0
    geometric = isinstance(query.dist, GeometricSpec)
    if geometric:
        m = threshold(query)
    else:
        cut = query.lam * n * query.mu
    done = 0
    while done < size:
        rows = min(rows_per_block, size - done)
        draws = inverse_cdf(query.dist, open_uniforms(bitgen, rows * n)).reshape(rows, n)
        sums = draws.sum(axis=1)
        if geometric:
            hit = sums >= m if query.side is Side.UPPER else sums <= m
        else:
            hit = sums >= cut if query.side is Side.UPPER else sums <= cut
        hits += int(np.count_nonzero(hit))
        done += rows
    return hits


def mc_tail(query: TailQuery, trials: int, seed: int, workers: int = 1,
            chunk_size: int = MC_CHUNK) -> McEstimate:
    """Monte Carlo tail estimate; chunk i uses seed + i, so the count is
    independent of ``workers``."""
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    trials, seed = int(trials), int(seed)
    sizes = [min(chunk_size, trials - start) for start in range(0, trials, chunk_size)]
    jobs = [(size, seed + i) for i, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda job: _mc_chunk_hits(query, *job), jobs))
    else:
        counts = [_mc_chunk_hits(query, *job) for job in jobs]
    hits = sum(counts)
    est = hits / trials
    return McEstimate(est, math.sqrt(est * (1.0 - est) / trials), trials, seed,
                      GENERATOR_ID, hits)
