"""Exact truncated power series in q, and in t with q-series coefficients.

Coefficients are exact rationals. Internally they are kept as ``int`` when
integral and :class:`fractions.Fraction` otherwise, which keeps the integer
heavy workloads (Pochhammer products, Gaussian binomials) fast.

Truncation contract: no operation ever extends the order of its inputs;
arithmetic between series of different orders truncates to the smaller one.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

DEFAULT_DIGITS = int(os.environ.get("QTAILS_DIGITS", "60"))


class SeriesError(ArithmeticError):
    """Raised for undefined series operations (non-invertible series etc.)."""


def _norm(c):
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"exact rational coefficient expected, got {type(c).__name__}")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def rational_str(c) -> str:
    """Exact ``p/q`` string (``p`` alone for integers)."""
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class QSeries:
    """Truncated power series ``c_0 + c_1 q + ... + c_{order-1} q^{order-1}``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = (), order: int | None = None):
        c = [_norm(x) for x in coeffs]
        if order is not None:
            if order < 1:
                raise ValueError("order must be positive")
            if len(c) > order:
                del c[order:]
            else:
                c.extend([0] * (order - len(c)))
        if not c:
            raise ValueError("order must be positive")
        self._c = c

    @classmethod
    def _raw(cls, c: list) -> "QSeries":
        s = object.__new__(cls)
        s._c = c
        return s

    @classmethod
    def zero(cls, order: int) -> "QSeries":
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls((1,), order)

    @classmethod
    def monomial(cls, coeff, power: int, order: int) -> "QSeries":
        c = [0] * order
        if 0 <= power < order:
            c[power] = _norm(coeff)
        return cls._raw(c)

    @classmethod
    def from_dict(cls, terms: dict, order: int) -> "QSeries":
        c = [0] * order
        for k, v in terms.items():
            if 0 <= k < order:
                c[k] += _norm(v)
        return cls._raw([_norm(x) for x in c])

    # -- access ---------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._c)

    @property
    def coeffs(self) -> list[Fraction]:
        return [Fraction(x) for x in self._c]

    def raw(self) -> list:
        """Coefficient list (ints where integral). Do not mutate."""
        return self._c

    def coeff(self, m: int) -> Fraction:
        if not 0 <= m < len(self._c):
            raise IndexError(f"coefficient q^{m} outside truncation order {self.order}")
        return Fraction(self._c[m])

    __getitem__ = coeff

    def valuation(self) -> int | None:
        for i, x in enumerate(self._c):
            if x:
                return i
        return None

    def is_zero(self) -> bool:
        return not any(self._c)

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return QSeries._raw(self._c[:order])

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        if _is_scalar(other):
            return QSeries((other,), self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        a, b = self._c, other._c
        return QSeries._raw([_norm(a[i] + b[i]) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw([-x for x in self._c])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = _norm(c)
        return QSeries._raw([_norm(c * x) for x in self._c])

    def __mul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(self.order, other.order)
        a, b = self._c, other._c
        out = [0] * n
        nz_b = [(j, y) for j, y in enumerate(b[:n]) if y]
        for i in range(n):
            x = a[i]
            if not x:
                continue
            lim = n - i
            for j, y in nz_b:
                if j >= lim:
                    break
                out[i + j] += x * y
        return QSeries._raw([_norm(x) for x in out])

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        a = self._c
        if not a[0]:
            raise SeriesError("non-invertible series (zero constant term)")
        n = len(a)
        inv0 = Fraction(1) / a[0]
        nz = [(j, y) for j, y in enumerate(a) if y and j]
        out = [0] * n
        out[0] = _norm(inv0)
        for m in range(1, n):
            acc = 0
            for j, y in nz:
                if j > m:
                    break
                acc += y * out[m - j]
            out[m] = _norm(-acc * inv0)
        return QSeries._raw(out)

    def __truediv__(self, other):
        if _is_scalar(other):
            if other == 0:
                raise ZeroDivisionError("division of a series by zero")
            return self.scale(Fraction(1) / other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return self.inverse().scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QSeries.one(self.order), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "QSeries":
        """Multiply by ``q^k`` (``k >= 0``), dropping what falls past the order."""
        if k < 0:
            raise ValueError("negative shift")
        n = self.order
        if k >= n:
            return QSeries.zero(n)
        return QSeries._raw([0] * k + self._c[: n - k])

    def mul_binomial(self, c, k: int) -> "QSeries":
        """Multiply by ``1 + c q^k``."""
        return QSeries._raw(_mul_binomial(self._c, _norm(c), k))

    def div_binomial(self, c, k: int) -> "QSeries":
        """Divide by ``1 + c q^k``."""
        return QSeries._raw(_div_binomial(self._c, _norm(c), k))

    def subst(self, sign: int, k: int) -> "QSeries":
        """Return ``A(sign * q^k)`` truncated to the same order."""
        if sign not in (1, -1) or k < 1:
            raise ValueError("substitution needs sign in {1,-1} and k >= 1")
        n = self.order
        out = [0] * n
        for m, x in enumerate(self._c):
            if m * k >= n:
                break
            out[m * k] = x if (sign == 1 or m % 2 == 0) else -x
        return QSeries._raw(out)

    def __eq__(self, other):
        if isinstance(other, TSeries):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = min(self.order, other.order)
        return self._c[:n] == other._c[:n]

    __hash__ = None

    def __repr__(self):
        return f"QSeries({[rational_str(x) for x in self._c]!r})"

    def __str__(self):
        return format_series(self._c, "q") + f" + O(q^{self.order})"


def format_series(coeffs: Sequence, var: str = "q") -> str:
    parts = []
    for i, x in enumerate(coeffs):
        if not x:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        c = Fraction(x)
        if mono and abs(c) == 1:
            body = mono
        else:
            body = rational_str(abs(c)) + ("*" + mono if mono else "")
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {s} {b}" for s, b in parts[1:])


def _mul_binomial(a: list, c, k: int) -> list:
    n = len(a)
    if k == 0:
        return [_norm(x * (1 + c)) for x in a]
    out = list(a)
    if c:
        for m in range(k, n):
            y = a[m - k]
            if y:
                out[m] = _norm(out[m] + c * y)
    return out


def _div_binomial(a: list, c, k: int) -> list:
    n = len(a)
    if k == 0:
        d = 1 + c
        if not d:
            raise SeriesError("non-invertible series (division by 1 - q^0)")
        inv = Fraction(1) / d
        return [_norm(x * inv) for x in a]
    out = list(a)
    if c:
        for m in range(k, n):
            y = out[m - k]
            if y:
                out[m] = _norm(out[m] - c * y)
    return out


# ---------------------------------------------------------------------------
# Series in t with q-series coefficients


class TSeries:
    """Truncated series ``sum_{i<torder} A_i(q) t^i`` with a shared q-order.

    Purely rational t-expansions use ``qorder == 1``.
    """

    __slots__ = ("_rows", "qorder")

    def __init__(self, tcoeffs: Iterable, torder: int | None = None, qorder: int | None = None):
        rows = []
        for x in tcoeffs:
            if isinstance(x, QSeries):
                rows.append(list(x.raw()))
            elif _is_scalar(x) or isinstance(x, (Rational, str)):
                rows.append([_norm(x)])
            else:
                rows.append([_norm(y) for y in x])
        if qorder is None:
            qorder = min((len(r) for r in rows), default=1)
        rows = [(r + [0] * qorder)[:qorder] for r in rows]
        if torder is not None:
            rows = (rows + [[0] * qorder for _ in range(torder)])[:torder]
        if not rows or qorder < 1:
            raise ValueError("torder and qorder must be positive")
        self._rows = rows
        self.qorder = qorder

    @classmethod
    def _raw(cls, rows: list, qorder: int) -> "TSeries":
        s = object.__new__(cls)
        s._rows = rows
        s.qorder = qorder
        return s

    @classmethod
    def zero(cls, torder: int, qorder: int) -> "TSeries":
        return cls._raw([[0] * qorder for _ in range(torder)], qorder)

    @classmethod
    def one(cls, torder: int, qorder: int) -> "TSeries":
        s = cls.zero(torder, qorder)
        s._rows[0][0] = 1
        return s

    @classmethod
    def constant(cls, a: QSeries, torder: int) -> "TSeries":
        s = cls.zero(torder, a.order)
        s._rows[0] = list(a.raw())
        return s

    @property
    def torder(self) -> int:
        return len(self._rows)

    def coeff(self, i: int) -> QSeries:
        if not 0 <= i < self.torder:
            raise IndexError(f"coefficient t^{i} outside truncation order {self.torder}")
        return QSeries._raw(list(self._rows[i]))

    __getitem__ = coeff

    @property
    def tcoeffs(self) -> list[QSeries]:
        return [self.coeff(i) for i in range(self.torder)]

    def rows(self) -> list[list]:
        return self._rows

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def _check(self, other: "TSeries"):
        if other.qorder != self.qorder:
            raise ValueError("incompatible q-orders")

    def _coerce(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            return other
        if isinstance(other, QSeries):
            if other.order != self.qorder:
                other = other.truncate(self.qorder) if other.order > self.qorder else None
                if other is None:
                    raise ValueError("incompatible q-orders")
            return TSeries.constant(other, self.torder)
        if _is_scalar(other):
            return TSeries.constant(QSeries((other,), self.qorder), self.torder)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.torder, other.torder)
        return TSeries._raw(
            [[_norm(x + y) for x, y in zip(self._rows[i], other._rows[i])] for i in range(n)],
            self.qorder,
        )

    __radd__ = __add__

    def __neg__(self):
        return TSeries._raw([[-x for x in r] for r in self._rows], self.qorder)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TSeries":
        c = _norm(c)
        return TSeries._raw([[_norm(c * x) for x in r] for r in self._rows], self.qorder)

    def __mul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.torder, other.torder)
        rows = [QSeries._raw(r) for r in self._rows[:n]]
        orows = [QSeries._raw(r) for r in other._rows[:n]]
        out = []
        for k in range(n):
            acc = QSeries.zero(self.qorder)
            for i in range(k + 1):
                if any(rows[i].raw()) and any(orows[k - i].raw()):
                    acc = acc + rows[i] * orows[k - i]
            out.append(acc.raw())
        return TSeries._raw(out, self.qorder)

    __rmul__ = __mul__

    def inverse(self) -> "TSeries":
        a0 = QSeries._raw(self._rows[0])
        inv0 = a0.inverse()
        rows = [QSeries._raw(r) for r in self._rows]
        out = [inv0]
        for k in range(1, self.torder):
            acc = QSeries.zero(self.qorder)
            for j in range(1, k + 1):
                if any(rows[j].raw()):
                    acc = acc + rows[j] * out[k - j]
            out.append(-(acc * inv0))
        return TSeries._raw([o.raw() for o in out], self.qorder)

    def __truediv__(self, other):
        if _is_scalar(other):
            return self.scale(Fraction(1) / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = TSeries.one(self.torder, self.qorder), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_factor(self, kappas: Sequence, b: int) -> "TSeries":
        """Multiply by ``1 + q^b * sum_j kappas[j] t^j``."""
        rows, n = self._rows, self.torder
        ks = [(j, _norm(k)) for j, k in enumerate(kappas) if k and j < n]
        out = []
        for i in range(n):
            r = list(rows[i])
            for j, k in ks:
                if j > i:
                    break
                src = rows[i - j]
                for m in range(b, self.qorder):
                    y = src[m - b]
                    if y:
                        r[m] += k * y
            out.append([_norm(x) for x in r])
        return TSeries._raw(out, self.qorder)

    def div_factor(self, kappas: Sequence, b: int) -> "TSeries":
        """Divide by ``1 + q^b * sum_j kappas[j] t^j``."""
        k0 = _norm(kappas[0]) if kappas else 0
        ks = [(j, _norm(k)) for j, k in enumerate(kappas) if k and 0 < j < self.torder]
        out: list[list] = []
        for i in range(self.torder):
            r = list(self._rows[i])
            for j, k in ks:
                if j > i:
                    break
                src = out[i - j]
                for m in range(b, self.qorder):
                    y = src[m - b]
                    if y:
                        r[m] -= k * y
            out.append(_div_binomial([_norm(x) for x in r], k0, b))
        return TSeries._raw(out, self.qorder)

    def __eq__(self, other):
        if not isinstance(other, TSeries) or other.qorder != self.qorder:
            return NotImplemented
        n = min(self.torder, other.torder)
        return self._rows[:n] == other._rows[:n]

    __hash__ = None

    def __repr__(self):
        return f"TSeries(torder={self.torder}, qorder={self.qorder})"

    def __str__(self):
        lines = []
        for i, r in enumerate(self._rows):
            if any(r):
                lines.append(f"t^{i}: {format_series(r)}")
        return "\n".join(lines) or "0"


# ---------------------------------------------------------------------------
# Numerics


def eval_numeric(a: QSeries, x, coeff_bound, digits: int | None = None):
    """Evaluate the truncation of ``a`` at real ``x`` with ``|x| < 1``.

    Returns ``(value, tail_bound)`` where ``tail_bound`` bounds the dropped
    tail given that every dropped coefficient is at most ``coeff_bound`` in
    absolute value.
    """
    digits = digits or DEFAULT_DIGITS
    with mpmath.workdps(digits):
        x = mpmath.mpf(x) if not isinstance(x, Fraction) else mpmath.mpf(x.numerator) / x.denominator
        if abs(x) >= 1:
            raise ValueError("evaluation point must satisfy |x| < 1")
        value = mpmath.mpf(0)
        for c in reversed(a.raw()):
            value = value * x + (mpmath.mpf(c) if isinstance(c, int) else mpmath.mpf(c.numerator) / c.denominator)
        cb = Fraction(coeff_bound)
        tail = mpmath.mpf(cb.numerator) / cb.denominator * abs(x) ** a.order / (1 - abs(x))
        return +value, +tail


def neg_exp_expansion(a: QSeries, torder: int) -> TSeries:
    """Expand ``sum_m c_m (-1)^m e^{-m t}`` in powers of t (rational coefficients).

    The listed coefficients of ``a`` are treated as an exact polynomial.
    """
    rows = []
    for j in range(torder):
        s = 0
        for m, c in enumerate(a.raw()):
            if c:
                s += c * (-1) ** m * (-m) ** j
        rows.append([_norm(Fraction(s, factorial(j)))])
    return TSeries._raw(rows, 1)


# Functional aliases for callers that prefer the operation names.


def linear(c1, a: QSeries, c2, b: QSeries) -> QSeries:
    return a.scale(c1) + b.scale(c2)


def inverse(a: QSeries) -> QSeries:
    return a.inverse()


def valuation(a: QSeries) -> int | None:
    return a.valuation()
