from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logrank_incidence.linalg import (
    BitLengthExceeded,
    IndexSpaceExceeded,
    RationalMatrix,
    SupportPolynomial,
    entrywise_poly,
    factorize,
    kronecker_power,
    poly_rank_certificate,
    rank,
    rref,
    to_rational,
)

from oracles import kron, matmul, naive_rank

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_side=5, elements=small):
    r = draw(st.integers(1, max_side))
    c = draw(st.integers(1, max_side))
    return [draw(st.lists(elements, min_size=c, max_size=c)) for _ in range(r)]


@st.composite
def low_rank(draw, max_rank=3, max_side=5):
    r = draw(st.integers(1, max_rank))
    n = draw(st.integers(1, max_side))
    m = draw(st.integers(1, max_side))
    ints = st.integers(-3, 3)
    a = [draw(st.lists(ints, min_size=r, max_size=r)) for _ in range(n)]
    b = [draw(st.lists(ints, min_size=m, max_size=m)) for _ in range(r)]
    return matmul(a, b)


def test_to_rational_rejects_floats():
    assert to_rational("3/4") == Fraction(3, 4)
    assert to_rational(-2) == -2
    for bad in (0.5, "0.5", "1e3"):
        with pytest.raises((TypeError, ValueError)):
            to_rational(bad)


@pytest.mark.parametrize("rows, expected", [
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3),
    ([[1, 2], [2, 4]], 1),
    ([[0] * 5 for _ in range(4)], 0),
])
def test_rank_examples(rows, expected):
    assert rank(RationalMatrix.from_rows(rows)) == expected


@given(matrices())
def test_rank_matches_naive_elimination(rows):
    m = RationalMatrix.from_rows(rows)
    assert rank(m) == naive_rank(rows)
    assert rank(m.T) == rank(m)


def test_rank_bit_cap():
    m = RationalMatrix.from_rows([[Fraction(1, 3**200), 1], [1, 2]])
    with pytest.raises(BitLengthExceeded):
        rank(m, bit_cap=64)


def test_rref_is_reduced():
    rows, piv = rref(RationalMatrix.from_rows([[2, 4, 1], [1, 2, 0]]))
    assert piv == [0, 2]
    assert rows == [[1, 2, 0], [0, 0, 1]]


def test_factorize_examples():
    eye = RationalMatrix.identity(2)
    f = factorize(eye)
    assert f.left == eye and f.right == eye
    f = factorize(RationalMatrix.from_rows([[1, 2], [2, 4]]))
    assert f.left.tolist() == [[1], [2]]
    assert f.right.tolist() == [[1, 2]]
    f = factorize(RationalMatrix.zeros(3, 2))
    assert f.inner_dim == 0
    assert f.product() == RationalMatrix.zeros(3, 2)


@given(low_rank())
def test_factorization_reproduces_matrix(rows):
    m = RationalMatrix.from_rows(rows)
    f = factorize(m)
    assert f.inner_dim == naive_rank(rows)
    assert f.product() == m


def test_kronecker_power_examples():
    assert kronecker_power((1, 2), 2) == (1, 2, 2, 4)
    assert kronecker_power((7, -1, 3), 0) == (1,)
    v = kronecker_power((0, 1, 0), 3)
    assert len(v) == 27 and sum(v) == 1
    # multi-index (2,2,2) 1-based, most significant first
    assert v[(1 * 3 + 1) * 3 + 1] == 1
    with pytest.raises(IndexSpaceExceeded):
        kronecker_power((1, 1, 1, 1), 11, cap=4**10)


@given(st.integers(1, 3).flatmap(lambda k: st.tuples(*[st.tuples(small, small)] * k)), st.integers(0, 3))
def test_kronecker_power_inner_products(pairs, c):
    u, v = [p[0] for p in pairs], [p[1] for p in pairs]
    # <u^(x)c, v^(x)c> = <u, v>^c
    lhs = sum(x * y for x, y in zip(kronecker_power(u, c), kronecker_power(v, c)))
    assert lhs == sum(x * y for x, y in zip(u, v)) ** c
    if c >= 1:
        assert kronecker_power(u, c + 1) == kron(kronecker_power(u, c), u)


def test_entrywise_poly_examples():
    z2 = SupportPolynomial({2: 1})
    assert entrywise_poly(RationalMatrix.from_rows([[0, 1], [2, 3]]), z2).tolist() == [[0, 1], [4, 9]]
    assert entrywise_poly(RationalMatrix.identity(2), SupportPolynomial({2: 1, 0: 1})).tolist() == [[2, 1], [1, 2]]
    step = SupportPolynomial({2: 1, 1: -1})
    assert entrywise_poly(RationalMatrix.from_rows([[0, 1], [1, 1]]), step) == RationalMatrix.zeros(2, 2)


def test_poly_certificate_examples():
    fac, bound = poly_rank_certificate(RationalMatrix.identity(2), SupportPolynomial({2: 1}))
    assert bound == 4 and fac.inner_dim == 4
    assert fac.product() == RationalMatrix.identity(2)

    boolean = RationalMatrix.from_rows([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    d = rank(boolean)
    fac, bound = poly_rank_certificate(boolean, SupportPolynomial({2: 1, 1: -1}))
    assert bound == d * d + d
    assert fac.product() == RationalMatrix.zeros(3, 3)

    fac, bound = poly_rank_certificate(boolean, SupportPolynomial({0: 5}))
    assert bound == 1
    assert fac.product().values() == {5}


@settings(max_examples=60)
@given(low_rank(), st.dictionaries(st.integers(0, 2), small, min_size=1))
def test_poly_certificate_random(rows, coeffs):
    m = RationalMatrix.from_rows(rows)
    p = SupportPolynomial(coeffs)
    fac, bound = poly_rank_certificate(m, p)
    target = [[p(x) for x in r] for r in rows]
    assert fac.product().tolist() == target
    assert naive_rank(target) <= bound
    assert bound == sum(naive_rank(rows) ** k for k in p.support)


def test_matrix_arithmetic():
    a = RationalMatrix.from_rows([[1, 2], [3, 4]])
    assert (a @ RationalMatrix.identity(2)) == a
    assert (a - a) == RationalMatrix.zeros(2, 2)
    assert (a + a).tolist() == [[2, 4], [6, 8]]
    assert a.T.tolist() == [[1, 3], [2, 4]]
    assert a.submatrix([1], [0, 1]).tolist() == [[3, 4]]
    with pytest.raises(ValueError):
        RationalMatrix.from_rows([[1, 2], [3]])
