"""Slow, obviously-correct reference implementations used only by tests.

Nothing here imports the package's search or elimination code.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def naive_rank(rows) -> int:
    """Textbook Gauss-Jordan over Fractions, full pivot search per column."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a or not a[0]:
        return 0
    n, m = len(a), len(a[0])
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def matmul(a, b):
    return [[sum((Fraction(x) * Fraction(y) for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def dot(p, q) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(p, q)), Fraction(0))


def on_plane(p, normal, offset) -> bool:
    return dot(p, normal) == Fraction(offset)


def brute_max_rectangle(rows, predicate) -> int:
    """Largest |R||C| over all nonempty row/column subsets satisfying ``predicate``."""
    n, m = len(rows), len(rows[0])
    best = 0
    for rmask in range(1, 1 << n):
        rs = [i for i in range(n) if rmask >> i & 1]
        for cmask in range(1, 1 << m):
            cs = [j for j in range(m) if cmask >> j & 1]
            if len(rs) * len(cs) > best and predicate([[rows[i][j] for j in cs] for i in rs]):
                best = len(rs) * len(cs)
    return best


def is_monochromatic(sub) -> bool:
    return len({x for r in sub for x in r}) == 1


def is_column_constant(sub) -> bool:
    return all(len(set(col)) == 1 for col in zip(*sub))


def brute_biclique_edges(points, planes) -> int:
    """Max |S| * |T| over point subsets S, where T is every plane through all of S."""
    best = 0
    n = len(points)
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            t = sum(1 for nrm, off in planes if all(on_plane(points[i], nrm, off) for i in S))
            best = max(best, k * t)
    return best


def kron(u, v):
    return tuple(Fraction(x) * Fraction(y) for x in u for y in v)
