"""The q-Pell sequences and the other named series built on them.

``omega_n`` and ``theta_n`` come from their double sums over Gaussian
binomials; the two-variable families ``L1``, ``L2``, ``FineV`` and ``M`` are
expanded from their defining sums over Pochhammer quotients.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

from .builders import (
    INF,
    Poch,
    PochTerm,
    TPoint,
    gaussian_binomial,
    mono,
    pochhammer,
    pochhammer_inverse,
    sum_terms,
)
from .series import QSeries, TSeries


class Family(str, Enum):
    L1 = "L1"
    L2 = "L2"
    FineV = "FineV"
    M = "M"


def _double_sum(n: int, qorder: int, kshift: int) -> QSeries:
    # sum_{j<=n} sum_{k<=j} [j,k][n-k,j] q^{j(j+1)/2 + k(k+kshift)/2}
    acc = [0] * qorder
    for j in range(n + 1):
        tj = j * (j + 1) // 2
        if tj >= qorder:
            break
        for k in range(j + 1):
            e = tj + k * (k + kshift) // 2
            if e >= qorder:
                break
            w = qorder - e
            a = gaussian_binomial(j, k, w).raw()
            b = gaussian_binomial(n - k, j, w).raw()
            nz = [(i, y) for i, y in enumerate(b) if y]
            for i, x in enumerate(a):
                if not x:
                    continue
                for l, y in nz:
                    if i + l >= w:
                        break
                    acc[e + i + l] += x * y
    return QSeries._raw(acc)


def omega_n(n: int, qorder: int) -> QSeries:
    """``omega_n(q)``: the double sum with exponent ``j(j+1)/2 + k(k+1)/2``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _double_sum(n, qorder, 1)


def theta_n(n: int, qorder: int) -> QSeries:
    """``Theta_n(q)``: the double sum with exponent ``j(j+1)/2 + k(k-1)/2``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _double_sum(n, qorder, -1)


def v_m(m: int, qorder: int) -> QSeries:
    """``V_m(q) = sum_n [n+m, n]_q q^{n(n+1)/2}``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    out = QSeries.zero(qorder)
    n = 0
    while n * (n + 1) // 2 < qorder:
        out = out + gaussian_binomial(n + m, n, qorder).shift(n * (n + 1) // 2)
        n += 1
    return out


def j_n(n: int, qorder: int) -> QSeries:
    """``j_n(q) = sum_{m<n} q^m [n-1, m]_q`` with ``j_0 = 1``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return QSeries.one(qorder)
    out = QSeries.zero(qorder)
    for m in range(min(n, qorder)):
        out = out + gaussian_binomial(n - 1, m, qorder).shift(m)
    return out


def sigma_series(qorder: int) -> QSeries:
    """``sigma(q) = sum_n q^{n(n+1)/2} / (-q)_n``."""
    out = term = QSeries.one(qorder)
    n = 1
    while n * (n + 1) // 2 < qorder:
        term = term.shift(n).div_binomial(1, n)
        out = out + term
        n += 1
    return out


def error_series(which: str, qorder: int) -> QSeries:
    """The error series ``E1`` (n >= 0, ``(q)_n``) or ``E2`` (n >= 1, ``(q)_{n-1}``).

    Terms are built incrementally so orders in the thousands stay cheap.
    """
    if which not in ("E1", "E2"):
        raise ValueError("which must be 'E1' or 'E2'")
    if which == "E1":
        out = term = QSeries.one(qorder)
        n = 1
        while n * (n + 1) // 2 < qorder:
            # (q)_n/(q)_{n-1} = 1 - q^n;  (-q)_n/(-q)_{n-1} = 1 + q^n
            term = (-term.shift(n)).mul_binomial(-1, n).div_binomial(1, n)
            out = out + term
            n += 1
        return out
    # n = 1: (q)_0 * (-1) * q / (-q)_1
    term = (-QSeries.monomial(1, 1, qorder)).div_binomial(1, 1)
    out = term
    n = 2
    while n * (n + 1) // 2 < qorder:
        term = (-term.shift(n)).mul_binomial(-1, n - 1).div_binomial(1, n)
        out = out + term
        n += 1
    return out


def mock_theta_f(qorder: int) -> QSeries:
    """Third order mock theta ``f(q) = sum_n q^{n^2} / (-q)_n^2``."""
    out = term = QSeries.one(qorder)
    n = 1
    while n * n < qorder:
        term = term.shift(2 * n - 1).div_binomial(1, n).div_binomial(1, n)
        out = out + term
        n += 1
    return out


def limit_P(qorder: int) -> QSeries:
    """``(-q^2; q^2)_inf / (q; q^2)_inf``."""
    return pochhammer(mono(-1, 2), 2, INF, qorder) * pochhammer_inverse(mono(1, 1), 2, INF, qorder)


def limit_Q(qorder: int) -> QSeries:
    """``(-q; q^2)_inf / (q; q^2)_inf``."""
    return pochhammer(mono(-1, 1), 2, INF, qorder) * pochhammer_inverse(mono(1, 1), 2, INF, qorder)


def partition_gf(qorder: int) -> QSeries:
    """``1/(q)_inf``."""
    return pochhammer_inverse(mono(1, 1), 1, INF, qorder)


def distinct_gf(qorder: int) -> QSeries:
    """``(-q)_inf``."""
    return pochhammer(mono(-1, 1), 1, INF, qorder)


NAMED_SERIES = {
    "1/(q)_inf": partition_gf,
    "(-q)_inf": distinct_gf,
    "P": limit_P,
    "Q": limit_Q,
    "sigma": sigma_series,
    "E1": lambda n: error_series("E1", n),
    "E2": lambda n: error_series("E2", n),
    "f": mock_theta_f,
}


def named_series(name: str, qorder: int) -> QSeries:
    try:
        return NAMED_SERIES[name](qorder)
    except KeyError:
        raise KeyError(f"unknown named series {name!r}; known: {', '.join(NAMED_SERIES)}") from None


# ---------------------------------------------------------------------------
# Two-variable families


def family_term(family: Family | str, n: int) -> PochTerm:
    """The n-th summand of the family's defining sum."""
    family = Family(family)
    tri = n * (n + 1) // 2
    if family is Family.L1:
        return PochTerm(mono(1, tri, n), (Poch(mono(-1, 1, 1), 1, n),), (Poch(mono(1, 0, 1), 1, n + 1),))
    if family is Family.L2:
        return PochTerm(mono(1, tri, n), (Poch(mono(-1, 0, 1), 1, n),), (Poch(mono(1, 0, 1), 1, n + 1),))
    if family is Family.FineV:
        return PochTerm(mono(1, tri, 0), (), (Poch(mono(1, 0, 1), 1, n + 1),))
    return PochTerm(
        mono(1, n * n, 2 * n), (), (Poch(mono(1, 0, 1), 1, n + 1), Poch(mono(1, 1, 1), 1, n))
    )


@lru_cache(maxsize=64)
def family_tseries(family: Family | str, torder: int, qorder: int) -> TSeries:
    """The family expanded in t to ``t^(torder-1)`` and in q to ``qorder``."""
    return sum_terms(lambda n: family_term(family, n), TPoint.formal(torder), qorder)


def family_tcoeff(family: Family | str, n: int, qorder: int) -> QSeries:
    """Coefficient of ``t^n`` in the family's defining sum."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return family_tseries(Family(family), n + 1, qorder).coeff(n)


def family_tcoeffs(family: Family | str, count: int, qorder: int) -> list[QSeries]:
    return family_tseries(Family(family), count, qorder).tcoeffs


def family_at_minus_one(family: Family | str, qorder: int) -> QSeries:
    """Termwise substitution ``t = -1`` in the defining sum.

    ``L2`` is refused: every summand with n >= 1 carries the factor ``1 + t``
    so the termwise value collapses to 1/2. The intended value at ``t = -1``
    is ``error_series('E2')``.
    """
    family = Family(family)
    if family is Family.L2:
        raise ValueError("vanishing-factor anomaly; use error_series(E2)")
    total = sum_terms(lambda n: family_term(family, n), TPoint.at(-1), qorder)
    return total.coeff(0)
