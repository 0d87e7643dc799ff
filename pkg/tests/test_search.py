import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logrank_incidence.configurations import Configuration, Rectangle, con_of, incidence_stats
from logrank_incidence.constructions import LatticeConstruction
from logrank_incidence.geometry import Flat, Hyperplane
from logrank_incidence.linalg import RationalMatrix
from logrank_incidence.search import (
    Biclique,
    SearchBudget,
    biclique_oracle_edges,
    greedy_biclique,
    iter_sampler_trials,
    max_1listable_submatrix,
    max_monochromatic_rectangle,
    randomized_biclique,
    rs_exact,
    sampler_success_rate,
    validate_biclique,
)
from logrank_incidence.configurations import InvalidBiclique

from oracles import brute_biclique_edges, brute_max_rectangle, is_column_constant, is_monochromatic


@st.composite
def configurations(draw, max_d=3):
    d = draw(st.integers(1, max_d))
    c = st.integers(-2, 2)
    pts = draw(st.lists(st.tuples(*[c] * d), min_size=1, max_size=6))
    normals = draw(st.lists(st.tuples(*[c] * d).filter(any), min_size=1, max_size=5))
    offsets = draw(st.lists(c, min_size=len(normals), max_size=len(normals)))
    return Configuration(tuple(pts), tuple(Hyperplane(n, b) for n, b in zip(normals, offsets)))


@st.composite
def small_matrices(draw, max_side=4, values=(0, 1)):
    r, c = draw(st.integers(1, max_side)), draw(st.integers(1, max_side))
    return [draw(st.lists(st.sampled_from(values), min_size=c, max_size=c)) for _ in range(r)]


def test_rs_exact_examples():
    one = Configuration(((0, 0),), (Hyperplane((1, 0), 0),))
    assert rs_exact(one).edges == 1
    c, _ = con_of(RationalMatrix.from_rows([[1, 1], [1, 1]]))
    bic = rs_exact(c)
    assert bic.edges == 4 and len(bic.point_indices) == 2
    assert all(c.hyperplanes[h].offset == 1 for h in bic.hyperplane_indices)


@settings(max_examples=80, deadline=None)
@given(configurations())
def test_rs_exact_matches_oracles(c):
    bic = rs_exact(c)
    validate_biclique(c, bic)
    assert bic.edges == biclique_oracle_edges(c)
    pts = [p for p in c.points]
    planes = [(h.normal, h.offset) for h in c.hyperplanes]
    assert bic.edges == brute_biclique_edges(pts, planes)


@settings(max_examples=40, deadline=None)
@given(configurations())
def test_greedy_and_sampler_never_beat_exact(c):
    best = rs_exact(c).edges
    g = greedy_biclique(c)
    validate_biclique(c, g)
    assert g.edges <= best
    if incidence_stats(c).density > 0:
        s = randomized_biclique(c, SearchBudget(trials=30, seed=1))
        if s is not None:
            validate_biclique(c, s)
            assert s.edges <= best


def test_validate_biclique_rejects_bad_witness():
    c = Configuration(((0, 0), (1, 0)), (Hyperplane((1, 0), 0),))
    with pytest.raises(InvalidBiclique):
        validate_biclique(c, Biclique(Flat.from_hyperplane(c.hyperplanes[0]), (0, 1), (0,)))


def test_max_monochromatic_rectangle_examples():
    r, v = max_monochromatic_rectangle(RationalMatrix.from_rows([[4] * 3] * 2))
    assert r.size == 6 and v == 4
    # the two zeros of the 2x2 identity are not in a common rectangle
    r, _ = max_monochromatic_rectangle(RationalMatrix.identity(2))
    assert r.size == 1
    r, v = max_monochromatic_rectangle(RationalMatrix.identity(4))
    assert r == Rectangle((0, 1), (2, 3)) and v == 0


@settings(max_examples=80, deadline=None)
@given(small_matrices(values=(0, 1, 2)))
def test_max_monochromatic_matches_brute_force(rows):
    m = RationalMatrix.from_rows(rows)
    r, v = max_monochromatic_rectangle(m)
    assert r.is_monochromatic(m)
    assert r.size == brute_max_rectangle(rows, is_monochromatic)
    for val in (0, 1):
        r0, v0 = max_monochromatic_rectangle(m, value=val)
        target = brute_max_rectangle(rows, lambda s: is_monochromatic(s) and s[0][0] == val)
        assert r0.size == target
        if target:
            assert v0 == val


def test_max_1listable_examples():
    row = RationalMatrix.from_rows([[1, 2, 3]])
    assert max_1listable_submatrix(row).size == 3
    assert max_1listable_submatrix(RationalMatrix.identity(2)).size == 2
    twins = RationalMatrix.from_rows([[1, 2, 3], [0, 0, 1], [1, 2, 3]])
    r = max_1listable_submatrix(twins)
    assert r.size >= 6 and r.is_1listable(twins)


@settings(max_examples=80, deadline=None)
@given(small_matrices(values=(0, 1, 2)))
def test_max_1listable_matches_brute_force(rows):
    m = RationalMatrix.from_rows(rows)
    r = max_1listable_submatrix(m)
    assert r.is_1listable(m)
    assert r.size == brute_max_rectangle(rows, is_column_constant)
    # both enumeration orientations agree
    assert max_1listable_submatrix(m.T.T).size == r.size


def test_sampler_all_incident_succeeds_first_trial():
    c = Configuration(((0, 0, 1), (0, 0, 2)), (Hyperplane((1, 0, 0), 0), Hyperplane((0, 1, 0), 0)))
    bic = randomized_biclique(c, SearchBudget(trials=5))
    assert bic is not None and bic.edges == 4
    run = sampler_success_rate(c, SearchBudget(trials=5))
    assert run.first_success == 0


def test_sampler_single_incidence():
    c = Configuration(((0,),), (Hyperplane((1,), 0),))
    bic = randomized_biclique(c, SearchBudget(trials=3))
    assert bic is not None and bic.edges == 1


def test_sampler_lattice_d2_meets_guarantee():
    c = LatticeConstruction(2).configuration(universe=False)
    run = sampler_success_rate(c, SearchBudget(trials=200, seed=3))
    eps = incidence_stats(c).density
    assert run.successes > 0
    assert run.min_success_edges >= eps**4 / 12 * c.m * c.n
    assert run.best.edges <= rs_exact(c).edges


def test_sampler_is_deterministic_per_trial():
    c = LatticeConstruction(2).configuration(universe=True)
    b = SearchBudget(trials=50, seed=11)
    first = [x.edges if x else None for x in iter_sampler_trials(c, b)]
    again = [x.edges if x else None for x in iter_sampler_trials(c, b)]
    assert first == again
    # trial t does not depend on how many trials run
    short = [x.edges if x else None for x in iter_sampler_trials(c, SearchBudget(trials=10, seed=11))]
    assert short == first[:10]


def test_sampler_needs_incidences():
    c = Configuration(((1, 1),), (Hyperplane((1, 0), 0),))
    with pytest.raises(ValueError):
        sampler_success_rate(c, SearchBudget(trials=1))


def test_rs_exact_lattice_d5():
    c = LatticeConstruction(5).configuration(universe=True)
    bic = rs_exact(c)
    validate_biclique(c, bic)
    assert bic.edges <= 16
