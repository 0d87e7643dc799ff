from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logrank_incidence.configurations import (
    Configuration,
    InvalidBiclique,
    ParallelPartition,
    arity,
    con_of,
    find_parallel_partition,
    incidence_stats,
    is_k_partition,
    is_parallel_partition,
    listability,
    mat_of,
    offset_set,
    rectangle_from_biclique,
)
from logrank_incidence.constructions import LatticeConstruction
from logrank_incidence.geometry import Flat, Hyperplane
from logrank_incidence.linalg import RationalMatrix
from logrank_incidence.search import Biclique

from oracles import on_plane


@st.composite
def boolean_matrices(draw, max_side=6):
    r, c = draw(st.integers(1, max_side)), draw(st.integers(1, max_side))
    rows = [draw(st.lists(st.integers(0, 1), min_size=c, max_size=c)) for _ in range(r)]
    if not any(any(row) for row in rows):
        rows[0][0] = 1
    return rows


@st.composite
def small_int_matrices(draw, max_side=5):
    r, c = draw(st.integers(1, max_side)), draw(st.integers(1, max_side))
    rows = [draw(st.lists(st.integers(-2, 3), min_size=c, max_size=c)) for _ in range(r)]
    if not any(any(row) for row in rows):
        rows[0][0] = 1
    return rows


def test_incidence_stats_examples():
    one = Configuration(((0, 0),), (Hyperplane((1, 0), 0),))
    assert incidence_stats(one).incidences == 1 and incidence_stats(one).density == 1
    off = Configuration(((1, 1),), (Hyperplane((1, 0), 0),))
    assert incidence_stats(off).incidences == 0 and incidence_stats(off).density == 0
    lc = LatticeConstruction(2)
    assert incidence_stats(lc.configuration(universe=True)).incidences == 4


@given(small_int_matrices())
def test_incidence_count_matches_pairwise(rows):
    c, _ = con_of(RationalMatrix.from_rows(rows))
    direct = sum(on_plane(p, h.normal, h.offset) for p in c.points for h in c.hyperplanes)
    assert incidence_stats(c).incidences == direct


def test_listability_and_arity():
    assert listability(RationalMatrix.from_rows([[3, 3], [3, 3]])) == 1
    assert listability(RationalMatrix.from_rows([[0, 1], [1, 1]])) == 2
    assert listability(RationalMatrix.from_rows([[0, 0], [1, 1], [2, 0]])) == 3
    assert arity(RationalMatrix.zeros(2, 2)) == 1
    assert arity(RationalMatrix.from_rows([[0, 1], [1, 1]])) == 2
    assert arity(RationalMatrix.from_rows([[0, 1], [2, 3]])) == 4


def test_con_of_identity():
    c, pp = con_of(RationalMatrix.identity(2))
    assert set(c.points) == {(1, 0), (0, 1)}
    assert c.m == 4 and offset_set(c) == {0, 1}
    assert is_parallel_partition(c, pp) and pp.k == 2
    assert find_parallel_partition(c, 2) is not None


def test_con_of_small_cases():
    c, pp = con_of(RationalMatrix.from_rows([[7]]))
    assert c.n == 1 and c.m == 1 and pp.blocks == ((0,),) and pp.k == 1
    c, pp = con_of(RationalMatrix.from_rows([[1, 5], [0, 5]]))
    assert len(pp.blocks[1]) == 1
    with pytest.raises(ValueError):
        con_of(RationalMatrix.zeros(2, 2))


def test_con_of_skips_zero_columns():
    m = RationalMatrix.from_rows([[1, 0, 2], [0, 0, 1]])
    c, pp = con_of(m)
    assert pp.labels == (0, 2)
    assert mat_of(c, pp) == m.submatrix([0, 1], [0, 2])


@given(boolean_matrices())
def test_boolean_roundtrip_and_partition(rows):
    m = RationalMatrix.from_rows(rows)
    c, pp = con_of(m)
    assert is_parallel_partition(c, pp)
    assert find_parallel_partition(c, 2) is not None
    keep = list(pp.labels)
    assert mat_of(c, pp) == m.submatrix(range(m.rows), keep)
    assert offset_set(c) <= {Fraction(0), Fraction(1)}


@settings(max_examples=80)
@given(small_int_matrices())
def test_roundtrip_general(rows):
    m = RationalMatrix.from_rows(rows)
    c, pp = con_of(m)
    assert is_parallel_partition(c, pp)
    assert mat_of(c, pp) == m.submatrix(range(m.rows), list(pp.labels))
    # hyperplane count lies between (nonzero columns) and k * (nonzero columns)
    nz = len(pp.labels)
    assert nz <= c.m <= nz * listability(m)
    assert len(offset_set(c)) <= arity(m)


def test_offsets_stay_within_arity_with_mixed_signs():
    m = RationalMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
    c, pp = con_of(m)
    assert offset_set(c) == {0, 1}


def test_find_parallel_partition_cases():
    lonely = Configuration(((0, 0), (1, 0)), (Hyperplane((1, 0), 0),))
    assert all(find_parallel_partition(lonely, k) is None for k in (1, 2, 3))
    c = Configuration(((0, 0), (0, 1), (1, 0), (1, 5)), (Hyperplane((1, 0), 0), Hyperplane((1, 0), 1)))
    pp = find_parallel_partition(c, 2)
    assert pp is not None and pp.blocks == ((0, 1),)
    assert find_parallel_partition(c, 1) is None
    assert is_k_partition(c, [[0, 1]], 2)


def test_invalid_partitions_rejected():
    c = Configuration(((0, 0), (1, 0)), (Hyperplane((1, 0), 0), Hyperplane((0, 1), 0)))
    assert not is_parallel_partition(c, ParallelPartition(((0, 1),), 2))  # mixed directions
    assert not is_parallel_partition(c, ParallelPartition(((0,),), 2))  # misses hyperplane 1


def test_mat_of_small():
    c = Configuration(((2, 3),), (Hyperplane((1, 1), 5),))
    assert mat_of(c, ParallelPartition(((0,),), 1)).tolist() == [[5]]


def test_rectangle_from_biclique():
    c, pp = con_of(RationalMatrix.identity(2))
    i = c.points.index((1, 0))
    h = next(j for j, hp in enumerate(c.hyperplanes) if hp.normal == (1, 0) and hp.offset == 1)
    bic = Biclique(Flat.from_equations([(1, 0, 1), (0, 1, 0)], 2), (i,), (h,))
    r = rectangle_from_biclique(c, pp, bic)
    assert r.size == 1 and r.rows == (i,)
    with pytest.raises(InvalidBiclique):
        rectangle_from_biclique(c, pp, Biclique(Flat.whole(2), (), (h,)))


def test_rectangle_from_full_hyperplane():
    m = RationalMatrix.from_rows([[1, 0], [1, 1], [0, 1]])
    c, pp = con_of(m)
    h = next(j for j, hp in enumerate(c.hyperplanes) if pp.block_of()[j] == 0 and hp.offset == 1)
    pts = tuple(i for i, p in enumerate(c.points) if on_plane(p, c.hyperplanes[h].normal, 1))
    bic = Biclique(Flat.from_hyperplane(c.hyperplanes[h]), pts, (h,))
    r = rectangle_from_biclique(c, pp, bic)
    assert r.rows == (0, 1) and r.cols == (0,)
    assert r.is_monochromatic(m)
