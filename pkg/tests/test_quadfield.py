from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtails.pell import error_series
from qtails.quadfield import (
    NumericInstabilityError,
    element_ideal_count,
    ideal_counts,
    limit_Q_value,
    linear_grid,
    lvalue_extract,
    norm1mod8_series,
    theta_sum_numeric,
    theta_sum_regularized,
    verify_2_5,
    verify_theorem2,
)
from qtails.series import QSeries

TABLE = ideal_counts(10_000)


def test_count_examples():
    assert [TABLE[m] for m in (1, 9, 17, 7, 2, 3, 4, 41)] == [1, 1, 2, 2, 1, 0, 1, 2]
    with pytest.raises(ValueError):
        ideal_counts(0)
    with pytest.raises(IndexError):
        TABLE[10_001]


@given(st.integers(1, 10_000), st.integers(1, 10_000))
def test_counts_multiplicative(a, b):
    if gcd(a, b) == 1 and a * b <= 10_000:
        assert TABLE[a * b] == TABLE[a] * TABLE[b]


def test_counts_multiplicative_exhaustive_small():
    for a in range(1, 100):
        for b in range(1, 10_000 // a + 1):
            if gcd(a, b) == 1:
                assert TABLE[a * b] == TABLE[a] * TABLE[b]


def test_element_oracle_agrees():
    for m in range(1, 501):
        assert element_ideal_count(m) == TABLE[m], m


def test_verify_2_5():
    rep = verify_2_5(60)
    assert rep.passed and rep.identity_id == "2.5"
    assert norm1mod8_series(60) == error_series("E1", 60)
    with pytest.raises(ValueError):
        verify_2_5(5)


def test_e1_coefficients_bounded_by_counts():
    e1 = error_series("E1", 200)
    assert all(abs(e1.coeff(m)) <= TABLE[8 * m + 1] for m in range(200))


def test_e2_coefficient_profile():
    from collections import Counter

    e2 = error_series("E2", 400).raw()
    assert all(isinstance(c, int) for c in e2)
    # recorded profile, not a theorem: values reach +-4 (first |c| >= 3 at m = 49)
    assert sorted(Counter(e2).items()) == [(-4, 3), (-3, 4), (-2, 39), (-1, 22), (0, 272), (1, 6), (2, 47),
                                           (3, 1), (4, 6)]
    assert min(m for m, c in enumerate(e2) if abs(c) >= 3) == 49


def rel(a, b):
    return abs(a - b) / abs(b)


def test_forced_single_exponential():
    est = lvalue_extract(QSeries([0, 1]), 4)
    for e in est:
        assert rel(e.value, -1) < 1e-10
        assert e.uncertainty >= 0


def test_forced_two_exponentials():
    est = lvalue_extract(QSeries([0, 1, 0, -1]), 4)
    assert abs(est[0].value) < 1e-10
    for e in est[1:]:
        assert rel(e.value, 3**e.n - 1) < 1e-10


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4), st.lists(st.integers(-3, 3), min_size=2, max_size=4),
       st.integers(-2, 2), st.integers(-2, 2))
def test_lvalue_linear(a, b, c1, c2):
    A, B = QSeries(a, 4), QSeries(b, 4)
    ea, eb = lvalue_extract(A, 3), lvalue_extract(B, 3)
    ec = lvalue_extract(A.scale(c1) + B.scale(c2), 3)
    for x, y, z in zip(ea, eb, ec):
        assert abs(z.value - (c1 * x.value + c2 * y.value)) < 1e-12
        # closed form: sum_m c_m (-1)^m (-1)^n ... = sum_m c_m (-1)^m m^n
        want = sum((c1 * ai + c2 * bi) * (-1) ** m * m**z.n
                   for m, (ai, bi) in enumerate(zip(a + [0] * 4, b + [0] * 4)) if m < 4)
        assert abs(z.value - want) < 1e-10


def test_lvalue_preconditions():
    with pytest.raises(ValueError):
        lvalue_extract(QSeries([0, 1]), 10, linear_grid(Fraction(1, 100), Fraction(1, 10), 6))
    with pytest.raises(NumericInstabilityError):
        lvalue_extract(error_series("E2", 100), 3, coeff_bound=8)
    with pytest.raises(NumericInstabilityError):
        lvalue_extract(QSeries([0, 1]), 3, linear_grid(Fraction(1, 1000), Fraction(1001, 1000000), 12), digits=30)


def test_tolerance_hides_uncertain_values():
    est = lvalue_extract(QSeries([0, 1]), 2, tol=Fraction(1, 10**300))
    assert all(e.value is None for e in est)


def test_theta_sum_numeric_examples():
    with mpmath.workdps(60):
        t = mpmath.mpf("0.3")
        assert theta_sum_numeric(0, t) == -1
        assert abs(theta_sum_numeric(1, t) - (-2 + mpmath.exp(-t))) < mpmath.mpf(10) ** -50


def test_theta_sum_drift_and_regularised_value():
    with mpmath.workdps(40):
        t = mpmath.mpf("0.1")
        Q = limit_Q_value(-mpmath.exp(-t))
        reg = theta_sum_regularized(t, 40)
        assert abs(reg - mpmath.mpf("0.560516872480104261976")) < mpmath.mpf(10) ** -20
        # partial sums drift by (M+1) Q; after removing it they settle on reg
        a = -theta_sum_numeric(100, t, 40) - 101 * Q
        b = -theta_sum_numeric(150, t, 40) - 151 * Q
        assert abs(a - reg) < mpmath.mpf(10) ** -10
        assert abs(b - reg) < mpmath.mpf(10) ** -12


def test_theta_sum_sign():
    rep = verify_theorem2(3)
    assert rep.status == "pass"
    assert rep.matched_sign == 1
    assert rep.discrepancy[1] < 1e-6 < rep.discrepancy[-1]
    assert [round(float(x), 6) for x in rep.lhat] == [0.5, -0.5, 1.5, -11.0]


def test_theta_sum_sign_zero_source():
    rep = verify_theorem2(1, source=QSeries.zero(10))
    assert all(abs(x) < 1e-30 for x in rep.lhat)
    assert rep.matched_sign is None
