from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtails.builders import gaussian_binomial
from qtails.series import QSeries, neg_exp_expansion

ORDER = 12
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
series = st.lists(rationals, min_size=ORDER, max_size=ORDER).map(lambda c: QSeries(c, ORDER))
units = st.tuples(rationals.filter(lambda x: x != 0), st.lists(rationals, min_size=ORDER - 1, max_size=ORDER - 1)) \
    .map(lambda p: QSeries([p[0], *p[1]], ORDER))


@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


@given(units)
def test_inverse(a):
    assert a * a.inverse() == QSeries.one(ORDER)


@given(series, st.integers(1, 3))
def test_subst_minus_involution(a, k):
    assert a.subst(-1, 1).subst(-1, 1) == a
    assert a.subst(1, k).coeffs[::k] == a.coeffs[: (ORDER + k - 1) // k]


@given(series, series, rationals, rationals)
def test_neg_exp_linear(a, b, c1, c2):
    lhs = neg_exp_expansion(a.scale(c1) + b.scale(c2), 5)
    ea, eb = neg_exp_expansion(a, 5), neg_exp_expansion(b, 5)
    for j in range(5):
        assert lhs.coeff(j) == ea.coeff(j).scale(c1) + eb.coeff(j).scale(c2)


@pytest.mark.parametrize("n", range(13))
def test_gaussian_binomial_palindromes(n):
    for m in range(n + 1):
        g = gaussian_binomial(n, m, 40).raw()
        deg = m * (n - m)
        assert g[deg] != 0 and not any(g[deg + 1:])
        assert g[: deg + 1] == g[deg::-1]
        assert all(isinstance(c, int) and c >= 0 for c in g)


def test_rational_entries_exact():
    a = QSeries([Fraction(1, 3)] * 4)
    assert (a.scale(3)).raw() == [1, 1, 1, 1]
