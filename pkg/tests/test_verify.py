import math

import pytest

from tailbounds.distributions import TailQuery, make_spec
from tailbounds.errors import DomainError, PreconditionError, SideMismatch
from tailbounds.verify import GridSpec, Suite, asymptotic_ratio, proposition_grid, run_suite


def test_default_grid_shape():
    g = GridSpec()
    assert len(g.mu_values) == 13 and len(g.lambda_values) == 14 and len(g.n_values) == 6
    assert g.mu_values[0] == pytest.approx(0.01) and g.mu_values[-1] == pytest.approx(100)
    assert sum(1 for _ in g.queries()) == 13 * 14 * 6 * 2 * 2


@pytest.mark.parametrize("suite", ["theorem1", "proposition", "stirling", "comparisons", "sandwich"])
def test_default_suites_clean(suite):
    report = run_suite(suite)
    assert report.passed, report.counterexamples[:3]
    assert report.points_checked > 0
    assert report.max_violation <= 1e-9


def test_theorem1_skips_side_mismatches():
    report = run_suite(Suite.THEOREM1)
    # lam < 1 with upper or lam > 1 with lower is half of every (mu, n, dist) block
    assert report.skipped == 13 * 14 * 6 * 2
    assert report.points_checked == 13 * 14 * 6 * 2


def test_proposition_grids():
    for case in range(1, 6):
        pts = proposition_grid(case)
        assert len(pts) == 200
        assert len(set(pts)) == 200


def test_paper_mode_sandwich_regression_lock():
    grid = GridSpec(lambda_values=(2.0,), n_values=(1, 2, 3, 4, 5), distributions=("exponential",),
                    sides=("upper",), mu_values=(1.0,))
    paper = run_suite("sandwich", grid, mode="paper")
    bad_n = sorted({c.query.n for c in paper.counterexamples})
    assert {1, 2} <= set(bad_n)
    assert all(c.violation > 1e-9 for c in paper.counterexamples)
    assert run_suite("sandwich", grid, mode="repaired").passed


def test_paper_mode_clean_on_other_tails():
    grid = GridSpec(distributions=("geometric", "exponential"), sides=("lower",))
    assert run_suite("sandwich", grid, mode="paper").passed
    grid = GridSpec(distributions=("geometric",), sides=("upper",))
    assert run_suite("sandwich", grid, mode="paper").passed


def test_reports_are_deterministic():
    grid = GridSpec(mu_values=(0.5, 2.0), n_values=(1, 3), lambda_values=(0.5, 2.0))
    a = run_suite("all", grid, mode="paper").to_json()
    b = run_suite("all", grid, mode="paper").to_json()
    assert a == b


def test_report_dict_keys():
    d = run_suite("stirling").to_dict()
    assert set(d) == {"suite", "mode", "tolerance", "points_checked", "skipped",
                      "max_violation", "passed", "counterexamples"}
    assert d["points_checked"] == 10**5


@pytest.mark.parametrize("data", [
    {"mu": [-1.0]}, {"mu": []}, {"n": [0]}, {"n": [1.5]}, {"lambda": "2"},
    {"distributions": ["poisson"]}, {"sides": ["middle"]}, {"colour": [1]}, [1, 2],
    {"mu": [math.inf]},
])
def test_grid_validation(data):
    with pytest.raises(DomainError):
        GridSpec.from_dict(data)


def test_grid_round_trip():
    g = GridSpec.from_dict({"mu": [1, 2], "lambda": [0.5], "n": [3], "sides": ["lower"]})
    assert GridSpec.from_dict(g.to_dict()) == g
    assert g.distributions == GridSpec().distributions


def test_bad_tolerance():
    with pytest.raises(DomainError):
        run_suite("stirling", tolerance=0)


def test_asymptotic_examples():
    g1 = make_spec("geometric", mu=1.0)
    ratio, cmax = asymptotic_ratio(TailQuery(g1, 100, 2.0, "upper"))
    assert cmax == pytest.approx(1.340, abs=5e-4)
    assert 1 <= ratio <= cmax
    ratio, cmax = asymptotic_ratio(TailQuery(g1, 2000, 2.0, "upper"))
    assert cmax == pytest.approx(1.0214, abs=1e-4)
    assert 1 <= ratio <= 1.022


def test_asymptotic_certified_max_shrinks():
    g = make_spec("geometric", mu=3.0)
    prev = math.inf
    for n in [1, 10, 100, 1000, 10000]:
        _, cmax = asymptotic_ratio(TailQuery(g, n, 0.4, "lower"))
        assert cmax < prev
        prev = cmax
    assert prev < 1.01


def test_asymptotic_errors():
    g = make_spec("geometric", mu=1.0)
    with pytest.raises(DomainError):
        asymptotic_ratio(TailQuery(g, 5, 1.0, "upper"))
    with pytest.raises(SideMismatch):
        asymptotic_ratio(TailQuery(g, 5, 0.5, "upper"))
    with pytest.raises(PreconditionError):
        asymptotic_ratio(TailQuery(make_spec("geometric", mu=0.1), 2, 0.5, "lower"))


def test_asymptotic_ratio_bracketed_on_grid():
    for q in GridSpec().queries():
        if q.lam == 1:
            continue
        try:
            ratio, cmax = asymptotic_ratio(q)
        except (SideMismatch, PreconditionError):
            continue
        assert 1 - 1e-9 <= ratio <= cmax + 1e-9, q.describe()
