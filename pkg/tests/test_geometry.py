import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from logrank_incidence.geometry import (
    DimensionMismatch,
    Flat,
    Hyperplane,
    affine_hull,
    count_hypercube_points_on_flat,
    flat_contains_point,
    hyperplane_contains_flat,
    incidence_matrix,
    incident,
    intersect_all,
    intersect_flat_hyperplane,
)

from oracles import on_plane

coord = st.integers(-3, 3)


def plane(normal, offset):
    return Hyperplane(tuple(normal), offset)


@st.composite
def hyperplanes(draw, d):
    n = draw(st.lists(coord, min_size=d, max_size=d).filter(any))
    return plane(n, draw(coord))


def test_incident_examples():
    assert incident((0, 0), plane((1, 0), 0))
    assert not incident((1, 1), plane((1, 1), 1))
    assert incident((1, 1, 2), plane((1, 1, -1), 0))
    with pytest.raises(DimensionMismatch):
        incident((1, 2), plane((1, 0, 0), 0))


def test_hyperplane_identity_uses_canonical_scale():
    a, b = plane((2, 4), 6), plane((1, 2), 3)
    assert a == b and hash(a) == hash(b)
    assert a.normal == (2, 4)  # stored as given
    assert a.parallel_to(plane((-1, -2), 7))
    with pytest.raises(ValueError):
        plane((0, 0), 1)


def test_intersection_examples():
    f = Flat.from_hyperplane(plane((1, 0), 0))
    p = intersect_flat_hyperplane(f, plane((0, 1), 0))
    assert p.dim == 0 and p.contains_point((0, 0))
    assert intersect_flat_hyperplane(f, plane((1, 0), 0)) == f
    assert intersect_flat_hyperplane(f, plane((1, 0), 1)).is_empty
    assert not flat_contains_point(Flat.empty(2), (0, 0))


def test_containment_examples():
    line = intersect_all([plane((1, 0, 0), 0), plane((0, 1, 0), 0)], 3)
    assert flat_contains_point(line, (0, 0, 5))
    assert hyperplane_contains_flat(plane((1, 1, 0), 0), line)
    origin = intersect_all([plane((1, 0), 0), plane((0, 1), 0)], 2)
    assert hyperplane_contains_flat(plane((1, 0), 0), origin)
    assert not hyperplane_contains_flat(plane((1, 0), 0), Flat.from_hyperplane(plane((0, 1), 0)))


def test_affine_hull_examples():
    assert affine_hull([(3, 4)]).dim == 0
    line = affine_hull([(0, 0), (1, 0)])
    assert line == Flat.from_hyperplane(plane((0, 1), 0))
    assert affine_hull([(0, 0), (1, 0), (0, 1)]) == Flat.whole(2)


@settings(max_examples=80)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(st.just(d), st.lists(hyperplanes(d), min_size=1, max_size=4))))
def test_canonical_form_is_order_independent(args):
    d, hs = args
    f = intersect_all(hs, d)
    for perm in itertools.islice(itertools.permutations(hs), 6):
        assert intersect_all(perm, d) == f
    if not f.is_empty:
        for h in hs:
            assert f.contained_in(h)
        p0, dirs = f.parametrization()
        assert len(dirs) == f.dim
        assert all(on_plane(p0, h.normal, h.offset) for h in hs)
        q = f.sample_point([i + 1 for i in range(f.dim)])
        assert all(on_plane(q, h.normal, h.offset) for h in hs)


@settings(max_examples=60)
@given(st.integers(1, 3).flatmap(lambda d: st.lists(st.lists(coord, min_size=d, max_size=d), min_size=1, max_size=4)))
def test_affine_hull_contains_points(points):
    f = affine_hull(points)
    assert all(f.contains_point(p) for p in points)
    # hull dimension equals rank of differences
    diffs = np.array([[a - b for a, b in zip(p, points[0])] for p in points], dtype=float)
    assert f.dim == np.linalg.matrix_rank(diffs) if len(points) > 1 else f.dim == 0


def test_hypercube_examples():
    assert count_hypercube_points_on_flat(Flat.whole(3), 3) == 8
    assert count_hypercube_points_on_flat(Flat.from_hyperplane(plane((1, 0, 0), 1)), 3) == 4
    assert count_hypercube_points_on_flat(Flat.from_hyperplane(plane((1, 1), 0)), 2) == 2


@settings(max_examples=60)
@given(st.integers(1, 5).flatmap(lambda d: st.tuples(st.just(d), st.lists(hyperplanes(d), max_size=3))))
def test_hypercube_count_matches_enumeration(args):
    d, hs = args
    f = intersect_all(hs, d)
    direct = sum(1 for x in itertools.product((-1, 1), repeat=d) if all(on_plane(x, h.normal, h.offset) for h in hs))
    assert count_hypercube_points_on_flat(f, d) == direct
    if not f.is_empty:
        assert direct <= 2 ** f.dim


@given(st.lists(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=2, max_size=2), min_size=1, max_size=6),
       st.lists(hyperplanes(2), min_size=1, max_size=5))
def test_bulk_incidence_matches_pairwise(points, hs):
    inc = incidence_matrix([tuple(p) for p in points], hs)
    assert inc.shape == (len(hs), len(points))
    for j, h in enumerate(hs):
        for i, p in enumerate(points):
            assert bool(inc[j, i]) == on_plane(p, h.normal, h.offset)


def test_bulk_incidence_large_integers_fall_back_exactly():
    big = 10**15
    pts = [(big, 1), (big + 1, 1)]
    hs = [plane((big, -1), big * big - 1)]
    inc = incidence_matrix(pts, hs)
    assert inc.tolist() == [[True, False]]
