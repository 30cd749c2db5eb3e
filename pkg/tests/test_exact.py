import math

import numpy as np
import pytest

from tailbounds.distributions import TailQuery, make_spec
from tailbounds.errors import BudgetExceeded, DomainError
from tailbounds.exact import (
    LogProb, McEstimate, brute_force_tail, exact_tail, geometric_sum_log_cdf,
    geometric_sum_log_sf, mc_tail, snap, threshold,
)

G = lambda mu: make_spec("geometric", mu=mu)  # noqa: E731
E = make_spec("exponential", mu=1.0)


def q(dist, n, lam, side):
    return TailQuery(dist, n, lam, side)


def test_exact_examples():
    assert exact_tail(q(G(1), 1, 2, "upper")).prob == pytest.approx(0.25, rel=1e-14)
    assert exact_tail(q(G(1), 2, 2, "upper")).prob == pytest.approx(0.1875, rel=1e-12)
    assert exact_tail(q(E, 2, 2, "upper")).prob == pytest.approx(5 * math.exp(-4), rel=1e-12)
    assert exact_tail(q(E, 1, 0.5, "lower")).prob == pytest.approx(-math.expm1(-0.5), rel=1e-13)
    assert exact_tail(q(G(1), 2, 0.5, "lower")).prob == pytest.approx(0.5, rel=1e-14)


def test_exact_against_extended_precision_references():
    # 40-digit sums of the negative binomial / Poisson series
    assert exact_tail(q(G(1), 10, 2, "upper")).prob == pytest.approx(
        0.0307141728699207305908203125, rel=1e-12)
    assert exact_tail(q(E, 10, 3, "upper")).prob == pytest.approx(
        7.121750862815577091646660834e-06, rel=1e-12)
    assert exact_tail(q(E, 10, 0.5, "lower")).prob == pytest.approx(
        0.03182805730620481173718657418, rel=1e-12)
    assert exact_tail(q(G(0.5), 50, 3, "upper")).log_value == pytest.approx(
        -21.293118857756114, rel=1e-12)


def test_scipy_cross_check():
    stats = pytest.importorskip("scipy.stats")
    for mu in [0.05, 0.7, 12.0]:
        for n in [1, 7, 60]:
            for lam in [0.3, 0.9, 1.4, 6.0]:
                m = math.ceil(snap(lam * n * mu))
                p = 1 / (1 + mu)
                ref = stats.nbinom.logsf(m - 1, n, p)
                assert geometric_sum_log_sf(n, mu, m) == pytest.approx(ref, rel=1e-9, abs=1e-12)
                ref = stats.nbinom.logcdf(math.floor(snap(lam * n * mu)), n, p)
                got = exact_tail(q(G(mu), n, lam, "lower")).log_value
                assert got == pytest.approx(ref, rel=1e-9, abs=1e-12)
    for n in [1, 7, 60]:
        for lam in [0.3, 0.9, 1.4, 6.0]:
            ref = stats.gamma.logsf(lam * n, n)
            assert exact_tail(q(E, n, lam, "upper")).log_value == pytest.approx(ref, rel=1e-9)
            ref = stats.gamma.logcdf(lam * n, n)
            assert exact_tail(q(E, n, lam, "lower")).log_value == pytest.approx(ref, rel=1e-9)


def test_brute_force_examples():
    assert brute_force_tail(q(G(1), 2, 2, "upper")).prob == pytest.approx(0.1875, rel=1e-13)
    assert brute_force_tail(q(G(1), 2, 0.5, "lower")).prob == pytest.approx(0.5, rel=1e-14)
    assert brute_force_tail(q(E, 1, 2, "upper")).prob == pytest.approx(math.exp(-2), rel=1e-14)
    with pytest.raises(BudgetExceeded):
        brute_force_tail(q(G(1), 7, 2, "upper"))


@pytest.mark.parametrize("kind", ["geometric", "exponential"])
@pytest.mark.parametrize("side", ["upper", "lower"])
def test_oracle_equivalence(kind, side):
    for n in range(1, 6):
        for lam in [0.2, 0.5, 2.0, 5.0]:
            for mu in [0.5, 1.0, 3.0]:
                query = q(make_spec(kind, mu=mu), n, lam, side)
                a = exact_tail(query).log_value
                b = brute_force_tail(query).log_value
                assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


@pytest.mark.parametrize("mu", [0.01, 0.5, 3.0, 80.0])
@pytest.mark.parametrize("n", [1, 4, 50, 200])
def test_complement_consistency(mu, n):
    for m in [1, 2, n, 3 * n, int(mu * n) + 1]:
        sf = geometric_sum_log_sf(n, mu, m)
        cdf = geometric_sum_log_cdf(n, mu, m - 1)
        assert math.exp(sf) + math.exp(cdf) == pytest.approx(1.0, abs=1e-12)


def test_monotonicity():
    for mu in [0.1, 1.0, 10.0]:
        lams = [1.05, 1.25, 2.0, 3.0, 5.0, 10.0]
        for n in [1, 2, 5, 10, 50]:
            vals = [exact_tail(q(G(mu), n, lam, "upper")).log_value for lam in lams]
            assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    # near lam = 1 the tail can rise from n = 1 to n = 2
    for lam in [2.0, 10.0]:
        vals = [exact_tail(q(E, n, lam, "upper")).log_value for n in [1, 2, 5, 10, 50, 200]]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("lam", [1.0, 1.05, 2.0, 7.5, 20.0, 300.0])
def test_single_exponential_survival(lam):
    assert abs(exact_tail(q(E, 1, lam, "upper")).log_value + lam) <= 1e-14 * max(1.0, lam)


def test_threshold_snapping():
    # 0.1 * 3 * 10 = 3.0000000000000004 in floating point
    query = q(G(10.0), 3, 0.1, "upper")
    assert query.lam * query.n * query.mu != 3.0
    assert threshold(query) == 3
    assert threshold(q(G(10.0), 3, 0.1, "lower")) == 3
    assert snap(2.5) == 2.5


def test_large_queries_stay_finite():
    lp = exact_tail(q(G(100.0), 200, 20.0, "upper"))
    assert -1e6 < lp.log_value < -100
    lp = exact_tail(q(G(0.01), 200, 20.0, "upper"))
    assert math.isfinite(lp.log_value) and lp.log_value < -50
    lp = exact_tail(q(E, 200, 0.05, "lower"))
    assert math.isfinite(lp.log_value) and lp.log_value < -300


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        exact_tail(q(G(1e9), 10**6, 0.999, "lower"))


def test_logprob_validation():
    assert LogProb(-0.5).prob == pytest.approx(math.exp(-0.5))
    assert LogProb(1e-13).log_value == 0.0
    with pytest.raises(DomainError):
        LogProb(0.1)
    with pytest.raises(DomainError):
        LogProb(math.nan)


CANONICAL = [
    (G(1.0), 2, 2.0, "upper", 0.1875),
    (E, 1, 2.0, "upper", math.exp(-2)),
    (G(1.0), 2, 0.5, "lower", 0.5),
    (E, 1, 0.5, "lower", -math.expm1(-0.5)),
]


@pytest.mark.parametrize("dist, n, lam, side, truth", CANONICAL)
def test_monte_carlo_within_five_standard_errors(dist, n, lam, side, truth):
    est = mc_tail(q(dist, n, lam, side), 10**6, seed=20240601)
    assert isinstance(est, McEstimate)
    assert abs(est.estimate - truth) <= 5 * est.std_error
    assert est.std_error == pytest.approx(math.sqrt(est.estimate * (1 - est.estimate) / 10**6))


def test_monte_carlo_reproducible_across_workers():
    query = q(G(1.0), 3, 1.5, "upper")
    a = mc_tail(query, 300_000, seed=9, workers=1)
    b = mc_tail(query, 300_000, seed=9, workers=4)
    assert a == b
    assert mc_tail(query, 300_000, seed=10) != a


def test_monte_carlo_single_trial():
    for seed in range(5):
        assert mc_tail(q(E, 3, 1.2, "upper"), 1, seed).estimate in (0.0, 1.0)
    with pytest.raises(DomainError):
        mc_tail(q(E, 3, 1.2, "upper"), 0, 1)


def test_monte_carlo_large_n_is_chunked():
    est = mc_tail(q(G(0.3), 500, 1.1, "upper"), 5000, seed=1)
    ref = math.exp(exact_tail(q(G(0.3), 500, 1.1, "upper")).log_value)
    assert abs(est.estimate - ref) <= 5 * math.sqrt(ref * (1 - ref) / 5000)
    assert np.isfinite(est.std_error)
