import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailbounds.errors import BudgetExceeded, DomainError
from tailbounds.numerics import (
    LN_FACTORIAL_CAP, ln_binomial, ln_factorial, log1mexp, log_sum_exp, stirling_bounds,
)


def test_ln_factorial_small_values():
    assert ln_factorial(0) == 0.0
    assert ln_factorial(1) == 0.0
    assert ln_factorial(5) == pytest.approx(math.log(120), abs=1e-15)
    # 40-digit reference: ln(10!) = 15.1044125730755152952...
    assert ln_factorial(10) == pytest.approx(15.104412573075515, abs=1e-14)


def test_ln_factorial_matches_lgamma_up_to_1e5():
    for m in [100, 1000, 12345, 10**5]:
        assert ln_factorial(m) == pytest.approx(math.lgamma(m + 1), rel=1e-10)


def test_ln_factorial_errors():
    with pytest.raises(DomainError):
        ln_factorial(-1)
    with pytest.raises(DomainError):
        ln_factorial(2.5)
    with pytest.raises(BudgetExceeded):
        ln_factorial(LN_FACTORIAL_CAP + 1)


def test_stirling_examples():
    b = stirling_bounds(1)
    assert b.lower == pytest.approx(-0.004138389872250335, abs=1e-15)
    assert b.upper == pytest.approx(0.002271866538006075, abs=1e-15)
    assert b.contains(0.0)
    b = stirling_bounds(10)
    assert b.lower == pytest.approx(15.10434647245207, abs=1e-12)
    assert b.upper == pytest.approx(15.104415342975486, abs=1e-12)
    assert b.contains(ln_factorial(10))
    with pytest.raises(DomainError):
        stirling_bounds(0)


def test_stirling_width_matches_remainder_difference():
    for m in [1, 2, 7, 50]:
        b = stirling_bounds(m)
        assert b.upper - b.lower == pytest.approx(1 / (12 * m) - 1 / (12 * m + 1), rel=1e-9)


def test_stirling_remainder_strict_with_extended_precision():
    # the bracket is far narrower than a float ulp of ln(m!) for large m, so
    # the strict containment is checked on the remainder at 50 digits
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    for m in list(range(1, 200)) + [1000, 54321, 10**5]:
        base = (m + mpmath.mpf(1) / 2) * mpmath.log(m) - m + mpmath.log(2 * mpmath.pi) / 2
        rem = mpmath.loggamma(m + 1) - base
        assert mpmath.mpf(1) / (12 * m + 1) < rem < mpmath.mpf(1) / (12 * m)


def test_ln_binomial_examples():
    for n in [0, 1, 9, 1000]:
        assert ln_binomial(n, 0) == 0.0
    assert ln_binomial(5, 1) == pytest.approx(math.log(5), abs=1e-15)
    assert ln_binomial(4, 2) == pytest.approx(math.log(6), abs=1e-15)
    with pytest.raises(DomainError):
        ln_binomial(3, 4)


def test_ln_binomial_large_argument_precision():
    # differences of ln(m!) near 5e6 would lose ~1e-9 without the split table
    a = 400_000
    for b in [1, 7, 199]:
        exact = math.log(math.comb(a, b))
        assert ln_binomial(a, b) == pytest.approx(exact, abs=1e-11)


def test_pascal_consistency():
    for a in range(1, 61):
        for b in range(1, a):
            lhs = log_sum_exp([ln_binomial(a - 1, b - 1), ln_binomial(a - 1, b)])
            assert lhs == pytest.approx(ln_binomial(a, b), abs=1e-12)


def test_log_sum_exp_examples():
    assert log_sum_exp([-3.25]) == -3.25
    assert log_sum_exp([math.log(0.5), math.log(0.5)]) == pytest.approx(0.0, abs=1e-16)
    assert log_sum_exp([-1000.0, -1000.0]) == pytest.approx(-1000.0 + math.log(2), abs=1e-12)
    assert log_sum_exp([-math.inf, -math.inf]) == -math.inf
    assert log_sum_exp([-math.inf, 0.0]) == 0.0
    with pytest.raises(DomainError):
        log_sum_exp([])


def test_log_sum_exp_permutation_invariance_long_list():
    rng = random.Random(3)
    terms = [rng.uniform(-50, 5) for _ in range(10_000)]
    base = log_sum_exp(terms)
    for _ in range(3):
        rng.shuffle(terms)
        assert abs(log_sum_exp(terms) - base) <= 1e-13


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-700, 700), min_size=1, max_size=50), st.randoms())
def test_log_sum_exp_permutation_property(terms, rnd):
    shuffled = list(terms)
    rnd.shuffle(shuffled)
    assert abs(log_sum_exp(terms) - log_sum_exp(shuffled)) <= 1e-13
    assert log_sum_exp(terms) >= max(terms)


def test_log1mexp():
    for x in [-1e-12, -0.1, -0.69, -0.7, -5.0, -50.0]:
        assert log1mexp(x) == pytest.approx(math.log(-math.expm1(x)), rel=1e-12)
    assert log1mexp(0.0) == -math.inf
    with pytest.raises(DomainError):
        log1mexp(0.1)


def test_vectorised_lookup_agrees_with_scalar():
    from tailbounds.numerics import ln_binomial_array, ln_factorial_array

    ks = np.arange(0, 300)
    assert np.array_equal(ln_factorial_array(ks), [ln_factorial(int(k)) for k in ks])
    row = ln_binomial_array(299, ks[:300])
    assert row[0] == 0.0
    assert row[150] == pytest.approx(math.log(math.comb(299, 150)), abs=1e-12)
