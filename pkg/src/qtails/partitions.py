"""Brute-force partition enumeration and statistics.

This is the combinatorial oracle layer: every generating function checked
against it is built elsewhere from products and sums, never from here.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterator

from .series import QSeries

ENUMERATION_CAP = 45


class EnumerationCapError(ValueError):
    """Requested size exceeds the enumeration cap."""


@dataclass(frozen=True)
class PartitionStats:
    num_parts: int
    largest: int
    rank: int
    num_odd: int


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple = ()

    def __post_init__(self):
        p = tuple(self.parts)
        if any(x < 1 for x in p) or any(a < b for a, b in zip(p, p[1:])):
            raise ValueError(f"not a partition: {p}")
        object.__setattr__(self, "parts", p)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def stats(self) -> PartitionStats:
        return stats(self)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def stats(p: Partition | tuple) -> PartitionStats:
    parts = p.parts if isinstance(p, Partition) else tuple(p)
    k = len(parts)
    big = parts[0] if parts else 0
    return PartitionStats(k, big, big - k, sum(1 for x in parts if x % 2))


# ---------------------------------------------------------------------------
# Classes


@dataclass(frozen=True)
class PartitionClass:
    """``kind`` in all, D, O, DE, D_le (largest <= k), D_exact (exactly k parts)."""

    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("all", "D", "O", "DE", "D_le", "D_exact"):
            raise ValueError(f"unknown partition class {self.kind!r}")
        if self.kind in ("D_le", "D_exact") and (self.k is None or self.k < 0):
            raise ValueError(f"class {self.kind} needs a nonnegative k")

    def contains(self, parts: tuple) -> bool:
        distinct = all(a > b for a, b in zip(parts, parts[1:]))
        if self.kind == "all":
            return True
        if self.kind == "D":
            return distinct
        if self.kind == "O":
            return all(x % 2 for x in parts)
        if self.kind == "DE":
            evens = [x for x in parts if x % 2 == 0]
            return len(evens) == len(set(evens))
        if self.kind == "D_le":
            return distinct and (not parts or parts[0] <= self.k)
        return distinct and len(parts) == self.k


ALL = PartitionClass("all")
D = PartitionClass("D")
O = PartitionClass("O")
DE = PartitionClass("DE")


def D_le(k: int) -> PartitionClass:
    return PartitionClass("D_le", k)


def D_exact(k: int) -> PartitionClass:
    return PartitionClass("D_exact", k)


def _gen(n: int, largest: int, ok_part: Callable[[int, int, int], bool], distinct: bool,
         prefix: list) -> Iterator[tuple]:
    # ok_part(part, previous_part, count_so_far)
    if n == 0:
        yield tuple(prefix)
        return
    for p in range(min(n, largest), 0, -1):
        prev = prefix[-1] if prefix else None
        if not ok_part(p, prev, len(prefix)):
            continue
        prefix.append(p)
        yield from _gen(n - p, p - 1 if distinct else p, ok_part, distinct, prefix)
        prefix.pop()


def iter_partitions(n: int, cls: PartitionClass = ALL) -> Iterator[tuple]:
    """Yield part tuples (nonincreasing) of the partitions of n in ``cls``."""
    if n < 0:
        return
    kind = cls.kind
    if kind == "all":
        yield from _gen(n, n, lambda p, prev, c: True, False, [])
    elif kind == "D":
        yield from _gen(n, n, lambda p, prev, c: True, True, [])
    elif kind == "O":
        yield from _gen(n, n, lambda p, prev, c: p % 2 == 1, False, [])
    elif kind == "DE":
        yield from _gen(n, n, lambda p, prev, c: p % 2 == 1 or p != prev, False, [])
    elif kind == "D_le":
        yield from _gen(n, min(n, cls.k), lambda p, prev, c: True, True, [])
    else:
        k = cls.k
        for parts in _gen(n, n, lambda p, prev, c: c < k and p >= k - c, True, []):
            if len(parts) == k:
                yield parts


def enumerate_partitions(n: int, cls: PartitionClass = ALL, cap: int | None = None) -> list[Partition]:
    """All partitions of n in ``cls``, each exactly once."""
    cap = ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap}")
    return [Partition(p) for p in iter_partitions(n, cls)]


# ---------------------------------------------------------------------------
# Weighted generating series


def _odd_indicator(x: int) -> int:
    # (1 - (-1)^x) / 2, taken literally
    return (1 - (-1) ** x) // 2


WEIGHTS: dict[str, Callable[[PartitionStats], int]] = {
    "one": lambda s: 1,
    "num_parts": lambda s: s.num_parts,
    "largest": lambda s: s.largest,
    "num_odd": lambda s: s.num_odd,
    "rank_plus_parity": lambda s: s.rank + _odd_indicator(s.rank),
    "largest_plus_parts_plus_parity": lambda s: s.largest + s.num_parts + _odd_indicator(s.rank),
    "signed_rank_parity": lambda s: (-1) ** (s.rank % 2),
}


def _shape_counts(n_max: int, parts_ok: Callable[[int], bool], distinct: bool) -> list[Counter]:
    # by weight: Counter of (num_parts, largest, num_odd)
    out = []
    for w in range(n_max):
        c: Counter = Counter()
        for p in _gen(w, w, lambda x, prev, k: parts_ok(x), distinct, []):
            c[(len(p), p[0] if p else 0, sum(1 for x in p if x % 2))] += 1
        out.append(c)
    return out


def stats_counts(n_max: int, cls: PartitionClass) -> list[Counter]:
    """For each ``n < n_max``, a Counter of PartitionStats over the class.

    DE is aggregated through the bijection with pairs (partition into distinct
    even parts, partition into odd parts); other classes enumerate directly.
    """
    if cls.kind != "DE":
        return [Counter(stats(p) for p in iter_partitions(n, cls)) for n in range(n_max)]
    evens = _shape_counts(n_max, lambda x: x % 2 == 0, True)
    odds = _shape_counts(n_max, lambda x: x % 2 == 1, False)
    out = []
    for n in range(n_max):
        c: Counter = Counter()
        for we in range(n + 1):
            for (ke, be, _), me in evens[we].items():
                for (ko, bo, no), mo in odds[n - we].items():
                    big = max(be, bo)
                    c[PartitionStats(ke + ko, big, big - ke - ko, no)] += me * mo
        out.append(c)
    return out


def class_series(cls: PartitionClass, weight: str, qorder: int, cap: int | None = None) -> QSeries:
    """``sum_{n < qorder} sum_{pi in cls, |pi| = n} weight(pi) q^n``."""
    cap = ENUMERATION_CAP if cap is None else cap
    if qorder - 1 > cap:
        raise EnumerationCapError(f"order {qorder} needs n up to {qorder - 1}, above the cap {cap}")
    w = WEIGHTS[weight]
    return QSeries._raw([sum(m * w(s) for s, m in c.items()) for c in stats_counts(qorder, cls)])


def rank_counts(n: int, cap: int | None = None) -> dict[int, int]:
    """``m -> N(m, n)``, the number of partitions of n with rank m."""
    cap = ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap}")
    return dict(Counter(stats(p).rank for p in iter_partitions(n)))


def parts_counts(n: int, cap: int | None = None) -> dict[int, int]:
    """``m -> p(n, m)``, the number of partitions of n into exactly m parts."""
    cap = ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap}")
    return dict(Counter(len(p) for p in iter_partitions(n)))


def j_oracle(n: int, qorder: int, cap: int | None = None) -> QSeries:
    """Count partitions of m with ``largest + num_parts <= n`` for each ``m < qorder``."""
    cap = ENUMERATION_CAP if cap is None else cap
    if qorder - 1 > cap:
        raise EnumerationCapError(f"order {qorder} exceeds the enumeration cap {cap}")
    out = []
    for m in range(qorder):
        out.append(sum(1 for p in iter_partitions(m) if (p[0] if p else 0) + len(p) <= n))
    return QSeries._raw(out)


# ---------------------------------------------------------------------------
# Pairs (pi_1, pi_2) in D_{<=n} x D_n


def pair_table(n_max: int, cap: int | None = None) -> dict[int, Counter]:
    """Total weight ``w < n_max`` -> Counter of ``(n(pi_1), largest(pi_2))``.

    Runs over every n with ``n(n+1)/2 < n_max`` (the least weight of a
    partition into n distinct parts) and every pair in ``D_{<=n} x D_n``.
    """
    cap = ENUMERATION_CAP if cap is None else cap
    if n_max - 1 > cap:
        raise EnumerationCapError(f"weight {n_max - 1} exceeds the enumeration cap {cap}")
    table: dict[int, Counter] = {w: Counter() for w in range(n_max)}
    n = 0
    while n * (n + 1) // 2 < n_max:
        second = [(w, p[0] if p else 0) for w in range(n * (n + 1) // 2, n_max)
                  for p in iter_partitions(w, D_exact(n))]
        first = [(w, len(p)) for w in range(n_max - n * (n + 1) // 2)
                 for p in iter_partitions(w, D_le(n))]
        for w1, c in first:
            for w2, big in second:
                if w1 + w2 < n_max:
                    table[w1 + w2][(c, big)] += 1
        n += 1
    return table


def pair_series(qorder: int, cap: int | None = None) -> QSeries:
    """``sum over pairs of (gamma + (1 - (-1)^gamma)/2) q^{|pi_1| + |pi_2|}``."""
    table = pair_table(qorder, cap)
    out = []
    for w in range(qorder):
        out.append(sum(m * (c + big + _odd_indicator(c + big)) for (c, big), m in table[w].items()))
    return QSeries._raw(out)


def pair_polynomial(qorder: int, torder: int, cap: int | None = None) -> list[list[int]]:
    """Rows ``[t^g][q^w]``: pairs counted with ``t^gamma`` (``a = b = t``)."""
    table = pair_table(qorder, cap)
    rows = [[0] * qorder for _ in range(torder)]
    for w, cnt in table.items():
        for (c, big), m in cnt.items():
            if c + big < torder:
                rows[c + big][w] += m
    return rows
