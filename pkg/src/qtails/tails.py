"""Sums of tails and the epsilon operator on coefficient families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .builders import StabilizationError
from .series import QSeries

WINDOW = 5


@dataclass(frozen=True)
class SeriesFamily:
    """Approximants ``a_n`` converging coefficientwise to ``limit``."""

    generator: Callable[[int], QSeries]
    limit: QSeries
    stabilization_cap: int | None = None

    def cap(self, qorder: int) -> int:
        return self.stabilization_cap if self.stabilization_cap is not None else 4 * qorder


def tails_sum(family: SeriesFamily, qorder: int) -> QSeries:
    """``sum_{n >= 0} (F - a_n)`` truncated to ``qorder``.

    Summation stops once ``F - a_n`` vanishes to ``qorder`` for WINDOW
    consecutive indices; failing that within the cap raises
    :class:`StabilizationError`.
    """
    F = family.limit.truncate(qorder)
    total = QSeries.zero(qorder)
    quiet, cap = 0, family.cap(qorder)
    n = 0
    while quiet < WINDOW:
        if n > cap:
            raise StabilizationError(f"family does not stabilize within {cap} indices at order {qorder}")
        d = F - family.generator(n)
        if d.is_zero():
            quiet += 1
        else:
            quiet = 0
            total = total + d
        n += 1
    return total


def epsilon_limit(tfamily: Callable[[int], QSeries], qorder: int, cap: int | None = None) -> QSeries:
    """``lim_{t->1} d/dt (1-t) f(t)`` for ``f = sum a_n t^n``.

    Evaluated as ``sum_{n >= 1} n (a_n - a_{n-1})``, which needs the
    t-coefficients to settle coefficientwise (same window rule as
    :func:`tails_sum`).
    """
    cap = 4 * qorder if cap is None else cap
    total = QSeries.zero(qorder)
    prev = tfamily(0).truncate(qorder)
    quiet, n = 0, 1
    while quiet < WINDOW:
        if n > cap:
            raise StabilizationError(f"family does not stabilize within {cap} indices at order {qorder}")
        cur = tfamily(n).truncate(qorder)
        d = cur - prev
        if d.is_zero():
            quiet += 1
        else:
            quiet = 0
            total = total + d.scale(n)
        prev = cur
        n += 1
    return total
