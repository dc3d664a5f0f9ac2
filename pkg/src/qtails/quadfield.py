"""Ideals of Z[sqrt 2] by norm, and numeric L-values at non-positive integers.

L-values are read off the small-t behaviour of ``G(t) = sum_m c_m (-1)^m e^{-mt}``:
sample G on a grid, least-squares fit a polynomial in t, and use
``L(-n) = (-1)^n n! [t^n]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Sequence

import mpmath

from .pell import error_series
from .report import IdentityReport
from .series import DEFAULT_DIGITS, QSeries, eval_numeric


class NumericInstabilityError(ArithmeticError):
    """The fit is too ill-conditioned for the working precision."""


# ---------------------------------------------------------------------------
# Ideal counting


def _spf_table(n: int) -> list[int]:
    spf = list(range(n + 1))
    for p in range(2, isqrt(n) + 1):
        if spf[p] == p:
            for k in range(p * p, n + 1, p):
                if spf[k] == k:
                    spf[k] = p
    return spf


def _prime_power_count(p: int, k: int) -> int:
    if p == 2:
        return 1
    if p % 8 in (1, 7):
        return k + 1
    return 1 if k % 2 == 0 else 0


@dataclass(frozen=True)
class IdealCountTable:
    max_norm: int
    counts: tuple  # counts[m] for 0 <= m <= max_norm; counts[0] unused (0)

    def __getitem__(self, m: int) -> int:
        if not 1 <= m <= self.max_norm:
            raise IndexError(f"norm {m} outside 1..{self.max_norm}")
        return self.counts[m]


def ideal_counts(max_norm: int) -> IdealCountTable:
    """Number of ideals of Z[sqrt 2] of each norm up to ``max_norm``.

    From prime splitting: 2 ramifies, p = +-1 mod 8 splits, p = +-3 mod 8 is inert.
    """
    if max_norm < 1:
        raise ValueError("max_norm must be at least 1")
    spf = _spf_table(max_norm)
    counts = [0, 1] + [0] * (max_norm - 1)
    for m in range(2, max_norm + 1):
        p, r, k = spf[m], m, 0
        while r % p == 0:
            r //= p
            k += 1
        counts[m] = counts[r] * _prime_power_count(p, k)
    return IdealCountTable(max_norm, tuple(counts))


def _sqrt2_ge(a: int, b: int) -> bool:
    """Exact test of ``a*sqrt(2) >= b``."""
    if a >= 0 and b <= 0:
        return True
    if a <= 0 and b > 0:
        return False
    if a >= 0:  # both positive
        return 2 * a * a >= b * b
    return 2 * a * a <= b * b  # both negative


def element_ideal_count(m: int) -> int:
    """Count ideals of norm m by enumerating generators ``x + y sqrt 2``.

    Every ideal is principal; one generator per ideal is chosen as the
    positive one with ``sqrt(m) <= alpha < (1 + sqrt 2) sqrt(m)``.
    """
    if m < 1:
        raise ValueError("norm must be positive")
    bx, by = 2 * isqrt(m) + 2, 2 * isqrt(m) + 2
    n = 0
    for x in range(-bx, bx + 1):
        for y in range(-by, by + 1):
            if abs(x * x - 2 * y * y) != m:
                continue
            if not _sqrt2_ge(y, -x) or (x == 0 and y == 0):  # alpha > 0
                continue
            # alpha^2 = x^2 + 2y^2 + 2xy sqrt2 ; lower: alpha^2 >= m
            if not _sqrt2_ge(2 * x * y, m - x * x - 2 * y * y):
                continue
            # upper: alpha^2 < (3 + 2 sqrt2) m
            if _sqrt2_ge(2 * x * y - 2 * m, 3 * m - x * x - 2 * y * y):
                continue
            n += 1
    return n


def norm1mod8_series(qorder: int, table: IdealCountTable | None = None) -> QSeries:
    """``sum_m (-1)^m #{ideals of norm 8m+1} q^m``."""
    table = table or ideal_counts(8 * (qorder - 1) + 1)
    return QSeries._raw([(-1) ** m * table[8 * m + 1] for m in range(qorder)])


def verify_2_5(qorder: int) -> IdentityReport:
    """E1 against the signed count of ideals of norm ``8m+1``."""
    if qorder < 6:
        raise ValueError("qorder must be at least 6")
    return IdentityReport.compare("2.5", error_series("E1", qorder), norm1mod8_series(qorder), qorder)


# ---------------------------------------------------------------------------
# Direct evaluation of the q-series at a real point


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def error_series_value(which: str, x, digits: int | None = None):
    """Value of E1 or E2 at ``|x| < 1`` summed from the defining series."""
    digits = digits or DEFAULT_DIGITS
    with mpmath.workdps(digits + 15):
        x = _mpf(x)
        if abs(x) >= 1:
            raise ValueError("need |x| < 1")
        eps = mpmath.mpf(10) ** (-(digits + 10))
        if which == "E1":
            total, ratio, n = mpmath.mpf(1), mpmath.mpf(1), 1
        elif which == "E2":
            total, ratio, n = mpmath.mpf(0), 1 / (1 + x), 1
        else:
            raise ValueError("which must be 'E1' or 'E2'")
        # ratio tracks (x;x)_n / (-x;x)_n for E1, (x;x)_{n-1} / (-x;x)_n for E2
        quiet = 0
        while quiet < 3:
            if which == "E1":
                ratio = ratio * (1 - x**n) / (1 + x**n)
            term = (-1) ** n * x ** (n * (n + 1) // 2) * ratio
            total += term
            quiet = quiet + 1 if abs(term) < eps else 0
            if which == "E2":
                ratio = ratio * (1 - x**n) / (1 + x ** (n + 1))
            n += 1
        return +total


def _qfac_table(x, n: int) -> list:
    out = [mpmath.mpf(1)]
    for k in range(1, n + 1):
        out.append(out[-1] * (1 - x**k))
    return out


def theta_value(n: int, x, digits: int | None = None, _fac=None):
    """``Theta_n(x)`` from the double sum with numeric Gaussian binomials."""
    digits = digits or DEFAULT_DIGITS
    with mpmath.workdps(digits + 30):
        x = _mpf(x)
        fac = _fac or _qfac_table(x, n)

        def gb(a, b):
            return fac[a] / (fac[b] * fac[a - b]) if 0 <= b <= a else 0

        total = mpmath.mpf(0)
        lim = mpmath.mpf(10) ** (-(digits + 25))
        for j in range(n + 1):
            if abs(x) ** (j * (j + 1) // 2) < lim:
                break
            for k in range(j + 1):
                total += gb(j, k) * gb(n - k, j) * x ** (j * (j + 1) // 2 + k * (k - 1) // 2)
        return +total


def limit_Q_value(x, digits: int | None = None):
    """``(-x; x^2)_inf / (x; x^2)_inf`` numerically."""
    digits = digits or DEFAULT_DIGITS
    with mpmath.workdps(digits + 15):
        x = _mpf(x)
        return mpmath.qp(-x, x * x) / mpmath.qp(x, x * x)


def theta_sum_numeric(M: int, t, digits: int | None = None):
    """``-sum_{n=0}^{M} Theta_n(-e^{-t})``.

    The partial sum drifts: it differs from the regularised value
    (:func:`theta_sum_regularized`) by about ``(M+1) Q(-e^{-t})`` plus the
    not yet settled tail, and ``Q(-e^{-t})`` is exponentially small in 1/t.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    digits = digits or DEFAULT_DIGITS
    with mpmath.workdps(digits + 30):
        t = _mpf(t)
        if not 0 < t < 1:
            raise ValueError("t must lie in (0, 1)")
        x = -mpmath.exp(-t)
        fac = _qfac_table(x, M)
        return -mpmath.fsum(theta_value(n, x, digits, fac) for n in range(M + 1))


def theta_sum_regularized(t, digits: int | None = None):
    """``sum_n (Theta_n(x) - Q(x))`` at ``x = -e^{-t}``.

    Equals ``-eps (1-u) L2(u, x)``: the u-derivative at ``u = 1`` of
    ``sum_k (-u;x)_k u^k x^{k(k+1)/2} / (ux;x)_k`` summed termwise.
    """
    digits = digits or DEFAULT_DIGITS
    with mpmath.workdps(digits + 20):
        t = _mpf(t)
        x = -mpmath.exp(-t)
        eps = mpmath.mpf(10) ** (-(digits + 10))
        total = mpmath.mpf(0)
        h = mpmath.mpf(1)  # (-1;x)_k x^{T_k} / (x;x)_k
        logd = mpmath.mpf(0)  # sum_{j<k} x^j/(1+x^j) + sum_{1<=j<=k} x^j/(1-x^j)
        k, quiet = 0, 0
        while quiet < 3:
            term = h * (logd + k)
            total += term
            quiet = quiet + 1 if abs(term) < eps and k > 2 else 0
            xj = x**k
            h = h * (1 + xj) * x ** (k + 1) / (1 - x ** (k + 1))
            logd += xj / (1 + xj) + x ** (k + 1) / (1 - x ** (k + 1))
            k += 1
        return -total


# ---------------------------------------------------------------------------
# L-value extraction


@dataclass(frozen=True)
class LValueEstimate:
    n: int
    value: object  # mpf, or None when the uncertainty exceeds the requested tolerance
    uncertainty: object


DEFAULT_GRID = (Fraction(1, 1000), Fraction(5, 1000))
DEFAULT_SAMPLES = 12


def linear_grid(tmin, tmax, samples: int) -> list[Fraction]:
    tmin, tmax = Fraction(tmin), Fraction(tmax)
    if samples < 2 or not 0 < tmin < tmax < 1:
        raise ValueError("grid needs 0 < tmin < tmax < 1 and at least two samples")
    return [tmin + (tmax - tmin) * i / (samples - 1) for i in range(samples)]


def _polyfit(ts, ys, degree: int, digits: int):
    scale = max(ts)
    A = mpmath.matrix([[(t / scale) ** k for k in range(degree + 1)] for t in ts])
    y = mpmath.matrix(ys)
    # conditioning of the scaled normal matrix
    svals = mpmath.svd_r(A, compute_uv=False)
    cond = max(svals) / min(svals) if min(svals) else mpmath.inf
    if cond > mpmath.mpf(10) ** (digits - 12):
        raise NumericInstabilityError(
            f"fit condition number {mpmath.nstr(cond, 3)} too large for {digits} digits; "
            "use a wider grid, fewer fit terms or more precision"
        )
    coef, res = mpmath.qr_solve(A, y)
    return [coef[k] / scale**k for k in range(degree + 1)], res, cond, A


def lvalue_extract(
    source: QSeries | Callable,
    nmax: int,
    t_grid: Sequence | None = None,
    qorder_numeric: int | None = None,
    *,
    degree: int | None = None,
    coeff_bound=None,
    digits: int | None = None,
    tol=None,
) -> list[LValueEstimate]:
    """Estimate ``L(-n)`` for ``n <= nmax``.

    ``source`` is either a QSeries of coefficients ``c_m`` (evaluated through
    :func:`~qtails.series.eval_numeric`; ``coeff_bound`` bounds the dropped
    coefficients, None meaning the listed coefficients are the whole
    polynomial) or a callable ``t -> G(t)`` evaluating the full series.

    The uncertainty combines least-squares scatter, propagated tail bound,
    and the change when the fit degree is lowered by one.
    """
    digits = digits or DEFAULT_DIGITS
    ts = [Fraction(t) for t in (t_grid or linear_grid(*DEFAULT_GRID, DEFAULT_SAMPLES))]
    if nmax < 0 or nmax + 2 > len(ts):
        raise ValueError("need nmax + 2 <= number of grid points")
    if any(not 0 < t < 1 for t in ts):
        raise ValueError("grid points must lie in (0, 1)")
    if degree is None:
        degree = len(ts) - 2
    if not nmax < degree <= len(ts) - 1:
        raise ValueError("fit degree must exceed nmax and stay below the number of points")
    if isinstance(source, QSeries):
        order = qorder_numeric or source.order
        src = source.truncate(min(order, source.order))
        if coeff_bound is not None and src.order * min(ts) < 30:
            raise NumericInstabilityError("truncated source needs qorder_numeric * min(t_grid) >= 30")
    with mpmath.workdps(digits):
        tsm = [_mpf(t) for t in ts]
        ys, tail = [], mpmath.mpf(0)
        for t in tsm:
            if isinstance(source, QSeries):
                v, tb = eval_numeric(src, -mpmath.exp(-t), coeff_bound or 0, digits)
                tail = max(tail, tb)
            else:
                v = _mpf(source(t))
            ys.append(v)
        coef, res, cond, A = _polyfit(tsm, ys, degree, digits)
        coef_lo = _polyfit(tsm, ys, degree - 1, digits)[0] if degree - 1 > nmax else coef
        dof = len(ts) - degree - 1
        sigma = res / mpmath.sqrt(dof) if dof > 0 else mpmath.mpf(0)
        scale = max(tsm)
        out = []
        for n in range(nmax + 1):
            f = (-1) ** n * mpmath.factorial(n)
            val = f * coef[n]
            # sensitivity of the t^n coefficient to unit perturbations of the data
            sens = cond * mpmath.sqrt(len(ts)) / scale**n
            unc = abs(f) * (sens * (sigma + tail) + abs(coef[n] - coef_lo[n]))
            shown = val if tol is None or unc < _mpf(tol) else None
            out.append(LValueEstimate(n, +val if shown is not None else None, +unc))
        return out


def e2_evaluator(digits: int | None = None) -> Callable:
    """``t -> E2(-e^{-t})`` from the defining sum (no truncation)."""

    def G(t):
        with mpmath.workdps((digits or DEFAULT_DIGITS) + 10):
            return error_series_value("E2", -mpmath.exp(-_mpf(t)), digits)

    return G


@dataclass
class Theorem2Report:
    nmax: int
    lhat: list  # estimates of L(-n) from the error series
    taylor: dict  # sign -> fitted (-1)^n n! [t^n] of sign * sum_n (Theta_n - Q)
    discrepancy: dict  # sign -> max_n |taylor - lhat|
    tolerance: float
    matched_sign: int | None = None
    status: str = "fail"
    notes: list = field(default_factory=list)


def verify_theorem2(
    nmax: int = 3,
    t_grid: Sequence | None = None,
    *,
    digits: int | None = None,
    tolerance: float = 1e-6,
    source: Callable | QSeries | None = None,
) -> Theorem2Report:
    """Compare ``s * sum_n Theta_n(-e^{-t})`` (regularised) with ``sum (-t)^n L(-n)/n!``.

    The Theta side is the drift-free value of the partial sums,
    ``sum_n (Theta_n - Q)``, taken from the epsilon form of the generating
    function; the L side is extracted from the error series E2 (or
    ``source``). Reports which sign ``s`` in {+1, -1} matches.
    """
    digits = digits or DEFAULT_DIGITS
    ts = [Fraction(t) for t in (t_grid or linear_grid(*DEFAULT_GRID, DEFAULT_SAMPLES))]
    src = source if source is not None else e2_evaluator(digits)
    lhat = [e.value for e in lvalue_extract(src, nmax, ts, digits=digits)]
    cache: dict = {}

    def reg(t):
        key = mpmath.nstr(t, 40)
        if key not in cache:
            cache[key] = theta_sum_regularized(t, digits)
        return cache[key]

    taylor, disc = {}, {}
    for s in (1, -1):
        est = lvalue_extract(lambda t, s=s: s * reg(t), nmax, ts, digits=digits)
        taylor[s] = [e.value for e in est]
        disc[s] = max(abs(a - b) for a, b in zip(taylor[s], lhat))
    matches = [s for s in (1, -1) if disc[s] < tolerance]
    rep = Theorem2Report(nmax, lhat, taylor, disc, tolerance)
    if len(matches) == 1:
        rep.matched_sign = matches[0]
        rep.status = "pass"
    else:
        rep.notes.append(f"{len(matches)} signs matched within {tolerance}")
    return rep
