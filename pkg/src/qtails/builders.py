"""Constructors for the standard q-objects.

Pochhammer symbols, Gaussian binomials, Lambert-type divisor series and eta
quotients, plus :class:`PochTerm`, a hypergeometric-style summand that can be
evaluated with the formal variable t kept symbolic, set to a rational value,
or expanded to first order around a rational point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Sequence

from .series import QSeries, TSeries, _norm

INF = None  # count value meaning an infinite product


class StabilizationError(RuntimeError):
    """An infinite sum or product failed to settle within its iteration cap."""


@dataclass(frozen=True)
class SignedMonomial:
    """``sign * t^tpow * q^qpow``; ``sign == 0`` stands for the zero monomial."""

    sign: int = 1
    qpow: int = 0
    tpow: int = 0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or 1")
        if self.tpow < 0:
            raise ValueError("tpow must be nonnegative")

    def __mul__(self, other: "SignedMonomial") -> "SignedMonomial":
        return SignedMonomial(self.sign * other.sign, self.qpow + other.qpow, self.tpow + other.tpow)

    def __neg__(self) -> "SignedMonomial":
        return SignedMonomial(-self.sign, self.qpow, self.tpow)

    def __pow__(self, n: int) -> "SignedMonomial":
        if n < 0:
            raise ValueError("negative power of a monomial")
        if n == 0:
            return SignedMonomial(1, 0, 0)
        return SignedMonomial(self.sign**n, self.qpow * n, self.tpow * n)

    def divide(self, other: "SignedMonomial") -> "SignedMonomial":
        if other.sign == 0:
            raise ZeroDivisionError("division by the zero monomial")
        if other.tpow > self.tpow:
            raise ValueError("monomial quotient has a negative power of t")
        return SignedMonomial(self.sign * other.sign, self.qpow - other.qpow, self.tpow - other.tpow)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __str__(self):
        if self.sign == 0:
            return "0"
        body = "*".join(
            x for x in (
                "" if not self.tpow else ("t" if self.tpow == 1 else f"t^{self.tpow}"),
                "" if not self.qpow else ("q" if self.qpow == 1 else f"q^{self.qpow}"),
            ) if x
        ) or "1"
        return ("-" if self.sign < 0 else "") + body


ONE = SignedMonomial(1, 0, 0)
T = SignedMonomial(1, 0, 1)


def mono(sign: int = 1, qpow: int = 0, tpow: int = 0) -> SignedMonomial:
    return SignedMonomial(sign, qpow, tpow)


@dataclass(frozen=True)
class TPoint:
    """Where the formal variable t is evaluated.

    ``t = center + u`` and results are series in u to ``u^(torder-1)``. A
    formal expansion in t is ``center == 0``; ``torder == 1`` is plain
    evaluation at ``center``; ``torder == 2`` carries the first derivative.
    """

    center: Fraction = Fraction(0)
    torder: int = 1

    @classmethod
    def formal(cls, torder: int) -> "TPoint":
        return cls(Fraction(0), torder)

    @classmethod
    def at(cls, value) -> "TPoint":
        return cls(Fraction(value), 1)

    @classmethod
    def jet(cls, value, torder: int = 2) -> "TPoint":
        return cls(Fraction(value), torder)

    def mono_kappas(self, coeff, tpow: int) -> list:
        """Coefficients of ``coeff * (center + u)^tpow`` in powers of u."""
        s, k = self.center, self.torder
        out = []
        for j in range(min(tpow, k - 1) + 1):
            e = tpow - j
            out.append(_norm(coeff * comb(tpow, j) * (s**e if e else 1)))
        return out


@dataclass(frozen=True)
class Poch:
    """``(arg; base_sign*q^base)_count``; ``count=None`` is the infinite product."""

    arg: SignedMonomial
    base: int = 1
    count: int | None = None
    base_sign: int = 1

    def factors(self, qorder: int, tlimit: int | None = None) -> Iterable[SignedMonomial]:
        if self.base < 1:
            raise ValueError("base exponent must be positive")
        a = self.arg
        if a.is_zero:
            return
        if self.count is None:
            if a.qpow < 1 and a.tpow < 1:
                raise StabilizationError(f"infinite product ({a}; q^{self.base}) does not stabilize")
            cap = 10 * qorder + 10
        elif self.count < 0:
            raise ValueError("negative Pochhammer length")
        j = 0
        while self.count is None or j < self.count:
            e = a.qpow + self.base * j
            if e >= qorder:
                if self.count is None:
                    return
                j += 1
                continue
            if e < 0:
                raise ValueError(f"factor with negative power of q in ({a}; q^{self.base})")
            sgn = a.sign * (self.base_sign**j)
            yield SignedMonomial(sgn, e, a.tpow)
            j += 1
            if self.count is None and j > cap:
                raise StabilizationError("infinite product did not stabilize")

    def __str__(self):
        b = ("q" if self.base == 1 else f"q^{self.base}")
        if self.base_sign < 0:
            b = "-" + b
        n = "inf" if self.count is None else str(self.count)
        return f"({self.arg};{b})_{n}"


def apply_factor(ts: TSeries, m: SignedMonomial, point: TPoint, invert: bool = False) -> TSeries:
    """Multiply (or divide) ``ts`` by ``1 - m`` with t specialised at ``point``."""
    if m.is_zero or m.qpow >= ts.qorder:
        return ts
    kappas = point.mono_kappas(-m.sign, m.tpow)
    if m.tpow == 0:
        kappas = [-m.sign]
    return ts.div_factor(kappas, m.qpow) if invert else ts.mul_factor(kappas, m.qpow)


def apply_poch(ts: TSeries, p: Poch, point: TPoint, invert: bool = False) -> TSeries:
    for m in p.factors(ts.qorder):
        if point.center == 0 and m.tpow >= point.torder:
            continue
        ts = apply_factor(ts, m, point, invert)
    return ts


def monomial_series(coeff, m: SignedMonomial, point: TPoint, qorder: int) -> TSeries:
    out = TSeries.zero(point.torder, qorder)
    if m.is_zero or not coeff:
        return out
    if m.qpow < 0:
        raise ValueError(f"monomial {m} has a negative power of q")
    if m.qpow >= qorder:
        return out
    rows = out.rows()
    for j, k in enumerate(point.mono_kappas(_norm(Fraction(coeff) * m.sign), m.tpow)):
        rows[j][m.qpow] = k
    return out


@dataclass(frozen=True)
class PochTerm:
    """``coeff * prefactor * prod(numer) / prod(denom)`` with Pochhammer factors."""

    prefactor: SignedMonomial = ONE
    numer: tuple = ()
    denom: tuple = ()
    coeff: Fraction = Fraction(1)

    def negligible(self, point: TPoint, qorder: int) -> bool:
        """True when the term is provably zero to the truncation window."""
        if self.prefactor.is_zero or not self.coeff or self.prefactor.qpow >= qorder:
            return True
        return point.center == 0 and self.prefactor.tpow >= point.torder

    def evaluate(self, point: TPoint, qorder: int) -> TSeries:
        if self.negligible(point, qorder):
            return TSeries.zero(point.torder, qorder)
        ts = monomial_series(self.coeff, self.prefactor, point, qorder)
        for p in self.denom:
            ts = apply_poch(ts, p, point, invert=True)
        for p in self.numer:
            ts = apply_poch(ts, p, point)
        return ts

    def qseries(self, qorder: int, t=None) -> QSeries:
        return self.evaluate(TPoint.at(t or 0), qorder).coeff(0)


def stable_sum(
    term: Callable[[int], object],
    start: int,
    qorder: int,
    is_zero: Callable[[object], bool],
    zero,
    window: int = 5,
    cap: int | None = None,
):
    """Sum ``term(n)`` for ``n >= start`` until ``window`` consecutive terms vanish.

    ``term`` may return None for a term known to vanish without computing it.
    """
    cap = cap if cap is not None else 10 * qorder + 10
    total, quiet, n = zero, 0, start
    while quiet < window:
        if n - start > cap:
            raise StabilizationError(f"infinite sum did not stabilize within {cap} terms")
        v = term(n)
        if v is None or is_zero(v):
            quiet += 1
        else:
            quiet = 0
            total = total + v
        n += 1
    return total


def sum_terms(
    make: Callable[[int], PochTerm],
    point: TPoint,
    qorder: int,
    start: int = 0,
    stop: int | None = None,
) -> TSeries:
    """Sum PochTerms over ``start <= n < stop`` (``stop=None``: until stable)."""
    zero = TSeries.zero(point.torder, qorder)

    def term(n):
        t = make(n)
        if t.negligible(point, qorder):
            return None
        return t.evaluate(point, qorder)

    if stop is not None:
        total = zero
        for n in range(start, stop):
            v = term(n)
            if v is not None:
                total = total + v
        return total
    return stable_sum(term, start, qorder, TSeries.is_zero, zero, cap=10 * max(qorder, point.torder) + 10)


# ---------------------------------------------------------------------------
# Named constructors


def pochhammer(arg: SignedMonomial, base_qpow: int, n: int | None, qorder: int, torder: int | None = None,
               base_sign: int = 1):
    """``(arg; q^base_qpow)_n`` as a QSeries, or a TSeries when arg contains t."""
    p = Poch(arg, base_qpow, n, base_sign)
    if arg.tpow > 0:
        if torder is None:
            raise ValueError("torder required for a Pochhammer symbol in t")
        return apply_poch(TSeries.one(torder, qorder), p, TPoint.formal(torder))
    out = QSeries.one(qorder)
    for m in p.factors(qorder):
        out = out.mul_binomial(-m.sign, m.qpow)
    return out


def pochhammer_inverse(arg: SignedMonomial, base_qpow: int, n: int | None, qorder: int,
                       base_sign: int = 1) -> QSeries:
    """``1/(arg; q^base_qpow)_n`` for a t-free argument."""
    out = QSeries.one(qorder)
    for m in Poch(arg, base_qpow, n, base_sign).factors(qorder):
        out = out.div_binomial(-m.sign, m.qpow)
    return out


@lru_cache(maxsize=None)
def _gauss(n: int, m: int, qorder: int) -> tuple:
    if m < 0 or m > n:
        return (0,) * qorder
    if m == 0 or m == n:
        return (1,) + (0,) * (qorder - 1)
    # q-Pascal: [n, m] = [n-1, m-1] + q^m [n-1, m]
    a = _gauss(n - 1, m - 1, qorder)
    b = _gauss(n - 1, m, qorder)
    return tuple(a[i] + (b[i - m] if i >= m else 0) for i in range(qorder))


def gaussian_binomial(n: int, m: int, qorder: int) -> QSeries:
    """The Gaussian binomial ``[n, m]_q``, zero unless ``0 <= m <= n``."""
    if n < 0 or m < 0 or m > n:
        return QSeries.zero(qorder)
    m = min(m, n - m)
    return QSeries._raw(list(_gauss(n, m, qorder)))


def lambert_sum(stride: int, offset: int, denom_sign: int, start_n: int, qorder: int) -> QSeries:
    """``sum_{n >= start_n} q^e / (1 - denom_sign q^e)`` with ``e = stride*n + offset``."""
    if stride < 1 or denom_sign not in (1, -1):
        raise ValueError("stride must be positive and denom_sign +-1")
    if stride * start_n + offset < 1:
        raise ValueError("Lambert sum exponent must start at 1 or above")
    c = [0] * qorder
    n = start_n
    while True:
        e = stride * n + offset
        if e >= qorder:
            break
        k = 1
        while k * e < qorder:
            c[k * e] += denom_sign ** (k - 1)
            k += 1
        n += 1
    return QSeries._raw(c)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """``prod eta(scale*z)^exponent``."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("eta quotient needs at least one factor")
        scales = [s for s, _ in self.factors]
        if len(set(scales)) != len(scales) or min(scales) < 1:
            raise ValueError("eta scales must be distinct positive integers")


def eta_quotient(spec: EtaQuotientSpec | Sequence, qorder: int) -> tuple[Fraction, QSeries]:
    """Return ``(prefactor exponent, series)`` for an eta quotient.

    The series part is ``prod (q^s; q^s)_inf^e``; the q-power prefactor
    ``sum s*e/24`` is reported separately.
    """
    if not isinstance(spec, EtaQuotientSpec):
        spec = EtaQuotientSpec(tuple(spec))
    pre = Fraction(sum(s * e for s, e in spec.factors), 24)
    out = QSeries.one(qorder)
    for s, e in spec.factors:
        if e == 0:
            continue
        for j in range(abs(e)):
            for m in Poch(mono(1, s), s, INF).factors(qorder):
                out = out.mul_binomial(-1, m.qpow) if e > 0 else out.div_binomial(-1, m.qpow)
    return pre, out
