import pytest

from qtails.builders import INF, lambert_sum, mono, pochhammer
from qtails.partitions import (
    DE,
    ALL,
    D,
    O,
    EnumerationCapError,
    D_exact,
    D_le,
    Partition,
    PartitionStats,
    class_series,
    enumerate_partitions,
    j_oracle,
    pair_series,
    parts_counts,
    rank_counts,
    stats,
)
from qtails.series import QSeries


def parts(n, cls):
    return sorted(p.parts for p in enumerate_partitions(n, cls))


def test_enumerate_examples():
    assert parts(4, D) == [(3, 1), (4,)]
    assert parts(4, DE) == [(1, 1, 1, 1), (2, 1, 1), (3, 1), (4,)]
    assert parts(3, O) == [(1, 1, 1), (3,)]
    assert parts(0, D) == [()]
    assert parts(6, D_le(3)) == [(3, 2, 1)]
    assert parts(6, D_exact(2)) == [(4, 2), (5, 1)]
    with pytest.raises(EnumerationCapError):
        enumerate_partitions(46, ALL)


def test_enumeration_counts():
    assert [len(enumerate_partitions(n, ALL)) for n in range(10)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]


def test_stats_examples():
    assert stats((3, 1)) == PartitionStats(2, 3, 1, 2)
    assert stats(()) == PartitionStats(0, 0, 0, 0)
    assert stats(Partition((2, 2, 1))) == PartitionStats(3, 2, -1, 1)
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_class_series_examples():
    assert class_series(O, "num_parts", 5).coeff(4) == 6
    assert class_series(D, "num_parts", 5).coeff(4) == 3
    assert class_series(DE, "one", 5).coeff(4) == 4


def test_pair_series_examples():
    assert pair_series(3).raw() == [0, 2, 4]


def test_rank_and_parts_counts():
    assert rank_counts(2) == {1: 1, -1: 1}
    assert parts_counts(4)[2] == 2


@pytest.mark.parametrize("n", range(31))
def test_rank_moment_vanishes(n):
    assert sum(m * c for m, c in rank_counts(n).items()) == 0


def test_j_oracle_examples():
    assert j_oracle(2, 5).raw() == [1, 1, 0, 0, 0]
    assert j_oracle(4, 6).coeff(4) == 1
    assert j_oracle(0, 5) == QSeries.one(5)


def test_identity_1_1_enumeration_side():
    lhs = class_series(D, "largest_plus_parts_plus_parity", 30)
    assert lhs == class_series(O, "num_parts", 30).scale(2)


def test_identity_1_3_enumeration_side():
    lhs = class_series(D, "rank_plus_parity", 30)
    assert lhs == (class_series(O, "num_parts", 30) - class_series(D, "num_parts", 30)).scale(2)


def test_identity_1_4_mixed():
    dq = pochhammer(mono(-1, 1), 1, INF, 30)
    lhs = (dq * lambert_sum(2, 0, 1, 1, 30)).scale(2)
    assert lhs == (class_series(O, "num_parts", 30) - class_series(D, "num_parts", 30)).scale(2)


def test_identity_2_22_enumeration_side():
    assert pair_series(25) == class_series(DE, "num_odd", 25).scale(2)


def test_euler_distinct_equals_odd():
    assert class_series(D, "one", 41) == class_series(O, "one", 41)


def test_distinct_series_matches_product():
    assert class_series(D, "one", 40) == pochhammer(mono(-1, 1), 1, INF, 40)
