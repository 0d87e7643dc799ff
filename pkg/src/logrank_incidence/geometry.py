"""Points, hyperplanes and affine flats in Q^d with exact predicates.

Flats are stored as constraint systems: the reduced row echelon form of the
augmented matrix ``(A | b)``. For a nonempty flat this row space is exactly the
space of affine functionals vanishing on it, so the RREF is a canonical form and
flat equality is plain field equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .linalg import rref, to_rational

Point = tuple[Fraction, ...]

#: Largest cube dimension accepted by :func:`count_hypercube_points_on_flat`.
HYPERCUBE_CAP = 40


class DimensionMismatch(ValueError):
    pass


class HypercubeCapExceeded(ValueError):
    pass


def as_point(coords: Iterable) -> Point:
    p = tuple(to_rational(x) for x in coords)
    if not p:
        raise ValueError("points need at least one coordinate")
    return p


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The locus ``<normal, x> = offset``.

    The equation is kept exactly as given (so offset sets and matrix entries
    built from it are meaningful); identity, hashing and parallelism use the
    canonical scaling where the first nonzero normal coordinate is 1.
    """

    normal: tuple[Fraction, ...]
    offset: Fraction

    def __post_init__(self):
        normal = tuple(to_rational(x) for x in self.normal)
        if not normal or all(x == 0 for x in normal):
            raise ValueError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", to_rational(self.offset))

    @property
    def dim(self) -> int:
        return len(self.normal)

    def canonical(self) -> "Hyperplane":
        lead = next(x for x in self.normal if x != 0)
        if lead == 1:
            return self
        return Hyperplane(tuple(x / lead for x in self.normal), self.offset / lead)

    @property
    def key(self) -> tuple[tuple[Fraction, ...], Fraction]:
        c = self.canonical()
        return c.normal, c.offset

    def parallel_to(self, other: "Hyperplane") -> bool:
        return self.canonical().normal == other.canonical().normal

    def row(self) -> tuple[Fraction, ...]:
        """Augmented equation row ``(normal | offset)``."""
        return self.normal + (self.offset,)

    def __eq__(self, other):
        return isinstance(other, Hyperplane) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        terms = ", ".join(str(x) for x in self.normal)
        return f"Hyperplane(<({terms}), x> = {self.offset})"


def incident(p: Sequence[Fraction], h: Hyperplane) -> bool:
    if len(p) != h.dim:
        raise DimensionMismatch(f"point in R^{len(p)}, hyperplane in R^{h.dim}")
    return _dot(h.normal, p) == h.offset


# --------------------------------------------------------------------------
# flats


@dataclass(frozen=True, order=True)
class Flat:
    """Affine subspace as a canonical RREF augmented system.

    ``system`` rows have ``ambient_dim + 1`` entries; the empty flat is the single
    row ``(0, ..., 0 | 1)`` and reports ``dim == -1``.
    """

    ambient_dim: int
    system: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def whole(cls, d: int) -> "Flat":
        return cls(d, ())

    @classmethod
    def empty(cls, d: int) -> "Flat":
        return cls(d, ((Fraction(0),) * d + (Fraction(1),),))

    @classmethod
    def from_equations(cls, rows: Iterable[Sequence], d: int | None = None) -> "Flat":
        """Flat of solutions to the augmented rows ``(a_1..a_d | b)``."""
        rows = [tuple(to_rational(x) for x in r) for r in rows]
        if d is None:
            if not rows:
                raise ValueError("ambient dimension needed for an empty system")
            d = len(rows[0]) - 1
        if any(len(r) != d + 1 for r in rows):
            raise DimensionMismatch("augmented rows must have ambient_dim + 1 entries")
        if not rows:
            return cls.whole(d)
        red, pivots = rref(rows)
        if pivots and pivots[-1] == d:
            return cls.empty(d)
        return cls(d, tuple(tuple(r) for r in red))

    @classmethod
    def from_hyperplane(cls, h: Hyperplane) -> "Flat":
        return cls.from_equations([h.row()])

    @property
    def is_empty(self) -> bool:
        return len(self.system) == 1 and all(x == 0 for x in self.system[0][:-1])

    @property
    def dim(self) -> int:
        if self.is_empty:
            return -1
        return self.ambient_dim - len(self.system)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(r) if x != 0) for r in self.system)

    def _reduce(self, row: Sequence[Fraction]) -> list[Fraction]:
        v = list(row)
        for r, c in zip(self.system, self.pivots):
            f = v[c]
            if f != 0:
                v = [x - f * y for x, y in zip(v, r)]
        return v

    def intersect(self, h: Hyperplane) -> "Flat":
        """Canonical ``self & h``: ``self`` itself, a flat one dimension lower, or empty."""
        if h.dim != self.ambient_dim:
            raise DimensionMismatch(f"flat in R^{self.ambient_dim}, hyperplane in R^{h.dim}")
        if self.is_empty:
            return self
        v = self._reduce(h.row())
        c = next((i for i, x in enumerate(v[:-1]) if x != 0), None)
        if c is None:
            return self if v[-1] == 0 else Flat.empty(self.ambient_dim)
        inv = 1 / v[c]
        v = [x * inv for x in v]
        rows = []
        for r in self.system:
            f = r[c]
            rows.append(tuple(x - f * y for x, y in zip(r, v)) if f != 0 else r)
        rows.append(tuple(v))
        rows.sort(key=lambda r: next(i for i, x in enumerate(r) if x != 0))
        return Flat(self.ambient_dim, tuple(rows))

    def contains_point(self, p: Sequence[Fraction]) -> bool:
        if len(p) != self.ambient_dim:
            raise DimensionMismatch(f"flat in R^{self.ambient_dim}, point in R^{len(p)}")
        if self.is_empty:
            return False
        return all(_dot(r[:-1], p) == r[-1] for r in self.system)

    def contained_in(self, h: Hyperplane) -> bool:
        """True iff every point of this (nonempty) flat lies on ``h``."""
        if h.dim != self.ambient_dim:
            raise DimensionMismatch(f"flat in R^{self.ambient_dim}, hyperplane in R^{h.dim}")
        if self.is_empty:
            raise ValueError("containment of the empty flat is not defined here")
        return all(x == 0 for x in self._reduce(h.row()))

    def parametrization(self) -> tuple[Point, list[Point]]:
        """A particular point and a basis of the direction space."""
        if self.is_empty:
            raise ValueError("empty flat has no parametrization")
        d = self.ambient_dim
        pivots = self.pivots
        point = [Fraction(0)] * d
        for r, c in zip(self.system, pivots):
            point[c] = r[-1]
        free = [c for c in range(d) if c not in pivots]
        dirs = []
        for f in free:
            v = [Fraction(0)] * d
            v[f] = Fraction(1)
            for r, c in zip(self.system, pivots):
                v[c] = -r[f]
            dirs.append(tuple(v))
        return tuple(point), dirs

    def integer_parametrization(self) -> tuple[list[int], int, list[list[int]]]:
        """``(P0, L, D)`` with integer entries: the flat is ``{P0/L + span(D)}``."""
        point, dirs = self.parametrization()
        scale = lcm(*(x.denominator for x in point))
        p0 = [int(x * scale) for x in point]
        idirs = []
        for v in dirs:
            s = lcm(*(x.denominator for x in v))
            idirs.append([int(x * s) for x in v])
        return p0, scale, idirs

    def sample_point(self, coeffs: Sequence) -> Point:
        """Point ``P0 + sum coeffs_i * D_i`` of the flat."""
        point, dirs = self.parametrization()
        out = list(point)
        for c, v in zip(coeffs, dirs):
            c = to_rational(c)
            out = [x + c * y for x, y in zip(out, v)]
        return tuple(out)

    def __repr__(self):
        if self.is_empty:
            return f"Flat(empty in R^{self.ambient_dim})"
        return f"Flat(dim={self.dim} in R^{self.ambient_dim}, {len(self.system)} equations)"


def intersect_flat_hyperplane(f: Flat, h: Hyperplane) -> Flat:
    if f.is_empty:
        raise ValueError("intersection requires a nonempty flat")
    return f.intersect(h)


def flat_contains_point(f: Flat, p: Sequence[Fraction]) -> bool:
    return f.contains_point(p)


def hyperplane_contains_flat(h: Hyperplane, f: Flat) -> bool:
    return f.contained_in(h)


def intersect_all(hyperplanes: Iterable[Hyperplane], d: int) -> Flat:
    f = Flat.whole(d)
    for h in hyperplanes:
        f = f.intersect(h)
        if f.is_empty:
            break
    return f


def _nullspace(vectors: Sequence[Sequence[Fraction]], d: int) -> list[tuple[Fraction, ...]]:
    if not vectors:
        return [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
    red, pivots = rref(vectors)
    basis = []
    for f in (c for c in range(d) if c not in pivots):
        v = [Fraction(0)] * d
        v[f] = Fraction(1)
        for r, c in zip(red, pivots):
            v[c] = -r[f]
        basis.append(tuple(v))
    return basis


def affine_hull(points: Sequence[Sequence]) -> Flat:
    """Smallest flat containing every point."""
    if not points:
        raise ValueError("affine hull of an empty point list")
    pts = [as_point(p) for p in points]
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DimensionMismatch("points of mixed dimension")
    p0 = pts[0]
    diffs = [tuple(x - y for x, y in zip(p, p0)) for p in pts[1:]]
    diffs = [v for v in diffs if any(x != 0 for x in v)]
    normals = _nullspace(diffs, d)
    return Flat.from_equations([a + (_dot(a, p0),) for a in normals], d)


def count_hypercube_points_on_flat(f: Flat, ell: int, *, cap: int = HYPERCUBE_CAP) -> int:
    """Number of points of ``{-1, 1}^ell`` on ``f``.

    Splits on one coordinate at a time (``x_k = 1`` and ``x_k = -1``), descending
    only into nonempty pieces; a flat already inside one of the two slabs has a
    single surviving branch. The count never exceeds ``2 ** f.dim``.
    """
    if f.ambient_dim != ell:
        raise DimensionMismatch(f"flat lives in R^{f.ambient_dim}, cube is in R^{ell}")
    if ell > cap:
        raise HypercubeCapExceeded(f"ell={ell} exceeds hypercube cap {cap}")
    one, minus = Fraction(1), Fraction(-1)
    slabs = []
    for k in range(ell):
        normal = tuple(Fraction(int(i == k)) for i in range(ell))
        slabs.append((Hyperplane(normal, one), Hyperplane(normal, minus)))

    def rec(g: Flat, k: int) -> int:
        if g.is_empty:
            return 0
        if g.dim == 0:
            p, _ = g.parametrization()
            return int(all(x in (one, minus) for x in p[k:]))
        if k == ell:
            return 1
        return rec(g.intersect(slabs[k][0]), k + 1) + rec(g.intersect(slabs[k][1]), k + 1)

    return rec(f, 0)


# --------------------------------------------------------------------------
# bulk exact predicates on integer-scaled data

_INT64_SAFE = 1 << 62


def exact_matmul(a: list[list[int]], b: list[list[int]]) -> np.ndarray:
    """Exact integer product; int64 when provably overflow-free, Python ints otherwise."""
    inner = len(b)
    amax = max((abs(x) for r in a for x in r), default=0)
    bmax = max((abs(x) for r in b for x in r), default=0)
    ncols = len(b[0]) if b else 0
    if not a or ncols == 0 or inner == 0:
        return np.zeros((len(a), ncols), dtype=np.int64)
    if amax * bmax * inner < _INT64_SAFE:
        return np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)
    return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)


def integer_hyperplanes(hyperplanes: Sequence[Hyperplane]) -> tuple[list[list[int]], list[int]]:
    """Denominator-cleared ``(normals, offsets)`` describing the same hyperplanes."""
    normals, offsets = [], []
    for h in hyperplanes:
        row = h.row()
        s = lcm(*(x.denominator for x in row))
        ints = [int(x * s) for x in row]
        normals.append(ints[:-1])
        offsets.append(ints[-1])
    return normals, offsets


def integer_points(points: Sequence[Point]) -> tuple[list[list[int]], list[int]]:
    """Rows ``P_i`` and scales ``L_i`` with ``points[i] == P_i / L_i``."""
    coords, scales = [], []
    for p in points:
        s = lcm(*(x.denominator for x in p))
        coords.append([int(x * s) for x in p])
        scales.append(s)
    return coords, scales


def incidence_matrix(points: Sequence[Point], hyperplanes: Sequence[Hyperplane]) -> np.ndarray:
    """Boolean ``(m, n)`` array; entry ``[j, i]`` says point ``i`` lies on hyperplane ``j``."""
    if not points or not hyperplanes:
        return np.zeros((len(hyperplanes), len(points)), dtype=bool)
    d = len(points[0])
    if any(len(p) != d for p in points) or any(h.dim != d for h in hyperplanes):
        raise DimensionMismatch("mixed dimensions in incidence computation")
    normals, offsets = integer_hyperplanes(hyperplanes)
    coords, scales = integer_points(points)
    lhs = exact_matmul(normals, [list(c) for c in zip(*coords)])
    rhs = exact_matmul([[b] for b in offsets], [scales])
    return np.asarray(lhs == rhs, dtype=bool)


def hyperplanes_containing(f: Flat, normals: list[list[int]], offsets: list[int]) -> np.ndarray:
    """Boolean mask over integer-scaled hyperplanes that contain the nonempty flat ``f``."""
    p0, scale, dirs = f.integer_parametrization()
    base = exact_matmul(normals, [[x] for x in p0])[:, 0]
    ok = base == np.asarray([b * scale for b in offsets], dtype=object)
    if dirs:
        prod = exact_matmul(normals, [list(c) for c in zip(*dirs)])
        ok &= np.all(prod == 0, axis=1)
    return np.asarray(ok, dtype=bool)
