"""Explicit configurations and set systems, with exact verifiers for the
counting claims made about them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, isqrt
from typing import Sequence

import numpy as np

from .configurations import Configuration, incidence_stats
from .geometry import Flat, Hyperplane, count_hypercube_points_on_flat, intersect_all
from .linalg import RationalMatrix
from .search import DEFAULT_SEED, max_monochromatic_rectangle, rs_exact

#: Largest point set the lattice construction will materialize.
POINT_CAP = 250_000
#: Largest family size a^b the grid generator will produce.
FAMILY_CAP = 4096
#: Exact threshold strictly below 1 - 2/e^2 (about 0.7293).
DENSE_FRACTION = Fraction(18, 25)


class ConstructionCapExceeded(ValueError):
    pass


# --------------------------------------------------------------------------
# lattice construction


@dataclass(frozen=True)
class LatticeConstruction:
    """Points ``{-1,1}^(d-1) x [-R, R]`` against hyperplanes
    ``sum_{i<d} a_i x_i - x_d = 0`` with ``a in {0,1}^(d-1)``.

    ``R = 2 sqrt(d-1)`` for ``P`` and ``R = d - 1`` for the universe ``U``.
    Point sets are only materialized on request, subject to ``POINT_CAP``.
    """

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("lattice construction needs d >= 2")
        r = isqrt(self.d - 1)
        if r * r != self.d - 1:
            raise ValueError(f"d - 1 = {self.d - 1} is not a perfect square")

    @property
    def p_range(self) -> int:
        return 2 * isqrt(self.d - 1)

    @property
    def u_range(self) -> int:
        return self.d - 1

    @property
    def m(self) -> int:
        return 2 ** (self.d - 1)

    @property
    def n_P(self) -> int:
        return 2 ** (self.d - 1) * (2 * self.p_range + 1)

    @property
    def n_U(self) -> int:
        return 2 ** (self.d - 1) * (2 * self.u_range + 1)

    @property
    def p_within_u(self) -> bool:
        return self.p_range <= self.u_range

    def normals(self):
        for a in itertools.product((0, 1), repeat=self.d - 1):
            yield a + (-1,)

    @cached_property
    def hyperplanes_H(self) -> tuple[Hyperplane, ...]:
        if self.m > POINT_CAP:
            raise ConstructionCapExceeded(f"{self.m} hyperplanes exceeds cap")
        return tuple(Hyperplane(a, 0) for a in self.normals())

    def _points(self, r: int) -> tuple[tuple[Fraction, ...], ...]:
        count = 2 ** (self.d - 1) * (2 * r + 1)
        if count > POINT_CAP:
            raise ConstructionCapExceeded(f"{count} points exceeds cap {POINT_CAP}")
        f = [Fraction(v) for v in range(-r, r + 1)]
        cube = list(itertools.product((Fraction(-1), Fraction(1)), repeat=self.d - 1))
        return tuple(x + (z,) for x in cube for z in f)

    @cached_property
    def points_P(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._points(self.p_range)

    @cached_property
    def universe_U(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._points(self.u_range)

    def configuration(self, universe: bool = False) -> Configuration:
        pts = self.universe_U if universe else self.points_P
        return Configuration(pts, self.hyperplanes_H)

    def materializable(self, universe: bool = False) -> bool:
        return (self.n_U if universe else self.n_P) <= POINT_CAP and self.m <= POINT_CAP


def lattice_construction(d: int) -> LatticeConstruction:
    return LatticeConstruction(d)


def _sign_sum_distribution(weights: tuple[Fraction, ...]) -> dict[Fraction, int]:
    dist = {Fraction(0): 1}
    for w in weights:
        nxt: dict[Fraction, int] = {}
        for s, c in dist.items():
            for t in (s + w, s - w):
                nxt[t] = nxt.get(t, 0) + c
        dist = nxt
    return dist


def product_lattice_incidences(normals, offsets, d: int, r: int) -> int:
    """Incidences between ``{-1,1}^(d-1) x {-r..r}`` and the given hyperplanes,
    counted one hyperplane at a time.

    For a hyperplane whose last normal coordinate ``c`` is nonzero, each cube
    vertex ``x`` forces ``x_d = (b - sum a_i x_i) / c``; we count vertices whose
    forced value is an integer in range. The distribution of ``sum a_i x_i``
    depends only on the multiset ``{|a_i|}``, so it is memoized on that key.
    """
    memo: dict[tuple, dict[Fraction, int]] = {}
    total = 0
    for a, b in zip(normals, offsets):
        a = tuple(Fraction(x) for x in a)
        b = Fraction(b)
        c = a[-1]
        if c == 0:
            raise ValueError("per-hyperplane shortcut needs a nonzero last normal coordinate")
        key = tuple(sorted(abs(x) for x in a[:-1] if x != 0))
        dist = memo.get(key)
        if dist is None:
            dist = memo[key] = _sign_sum_distribution(key)
        zeros = (d - 1) - len(key)
        hits = 0
        for s, cnt in dist.items():
            z = (b - s) / c
            if z.denominator == 1 and -r <= z <= r:
                hits += cnt
        total += hits << zeros
    return total


def lattice_incidences_shortcut(lc: LatticeConstruction, universe: bool) -> int:
    r = lc.u_range if universe else lc.p_range
    return product_lattice_incidences(lc.normals(), itertools.repeat(0), lc.d, r)


def _preimage_on_cube(f: Flat, normal: Sequence[Fraction]) -> Flat:
    """Pull ``f`` (inside ``x_d = sum a_i x_i``) back to R^(d-1) along
    ``y -> (y, sum a_i y_i)``."""
    d = f.ambient_dim
    a = normal[:-1]
    rows = []
    for r in f.system:
        rows.append(tuple(r[i] + r[d - 1] * a[i] for i in range(d - 1)) + (r[-1],))
    return Flat.from_equations(rows, d - 1)


@dataclass
class LatticeReport:
    d: int
    m: int
    n_P: int
    n_U: int
    incidences_U: int
    expected_U: int
    method_U: str
    shortcut_U: int
    incidences_P: int
    dense_ratio: Fraction
    p_within_u: bool
    containment_claimed: bool
    flats_sampled: int = 0
    point_bound_violations: list = field(default_factory=list)
    hyper_bound_violations: list = field(default_factory=list)
    hypercube_crosschecks: int = 0
    hypercube_mismatches: list = field(default_factory=list)
    rs_U: int | None = None
    rs_bound: int = 0

    @property
    def claims(self) -> dict[str, bool]:
        out = {
            "incidence_bound": self.incidences_U == self.expected_U and self.shortcut_U == self.expected_U,
            "point_bound": not self.point_bound_violations and not self.hypercube_mismatches,
            "hyper_bound": not self.hyper_bound_violations,
            "dense_subgraph": self.dense_ratio >= DENSE_FRACTION,
        }
        if self.rs_U is not None:
            out["rs_bound"] = self.rs_U <= self.rs_bound
        if self.containment_claimed:
            out["p_within_u"] = self.p_within_u
        return out

    @property
    def passed(self) -> bool:
        return all(self.claims.values())


def sample_intersection_flats(lc: LatticeConstruction, count: int, seed: int):
    """Yield ``(indices, flat)`` for random intersections of 1..d members of H."""
    rng = np.random.default_rng(seed)
    hs = lc.hyperplanes_H
    for _ in range(count):
        k = int(rng.integers(1, lc.d + 1))
        idx = sorted(rng.choice(lc.m, size=min(k, lc.m), replace=False).tolist())
        yield idx, intersect_all((hs[i] for i in idx), lc.d)


def verify_lattice_claims(
    lc: LatticeConstruction,
    *,
    samples: int = 1000,
    seed: int = DEFAULT_SEED,
    hypercube_checks: int = 50,
    with_rs: bool | None = None,
) -> LatticeReport:
    """Check the incidence count, the point/hyperplane bounds on sampled flats,
    the dense-subset ratio and (for small d) the exact rs bound."""
    d = lc.d
    expected = 2 ** (2 * d - 2)
    short_u = lattice_incidences_shortcut(lc, universe=True)
    short_p = lattice_incidences_shortcut(lc, universe=False)
    if lc.materializable(universe=True):
        conf_u = lc.configuration(universe=True)
        inc_u, method = incidence_stats(conf_u).incidences, "pairwise"
        conf_p = lc.configuration(universe=False) if lc.materializable() else None
        inc_p = incidence_stats(conf_p).incidences if conf_p is not None else short_p
        if inc_p != short_p:
            raise AssertionError(f"pairwise I(P,H)={inc_p} disagrees with shortcut {short_p}")
    else:
        conf_u = None
        inc_u, method, inc_p = short_u, "shortcut", short_p
    rep = LatticeReport(
        d=d, m=lc.m, n_P=lc.n_P, n_U=lc.n_U,
        incidences_U=inc_u, expected_U=expected, method_U=method, shortcut_U=short_u,
        incidences_P=inc_p, dense_ratio=Fraction(inc_p, inc_u) if inc_u else Fraction(0),
        p_within_u=lc.p_within_u, containment_claimed=d >= 5,
        rs_bound=2 ** (d - 1),
    )
    if conf_u is None or samples <= 0:
        return rep
    for t, (idx, f) in enumerate(sample_intersection_flats(lc, samples, seed)):
        j = f.dim
        npts = conf_u.points_on(f).bit_count()
        nhyp = int(conf_u.containing(f).sum())
        rep.flats_sampled += 1
        if npts > 2**j:
            rep.point_bound_violations.append({"hyperplanes": idx, "dim": j, "points": npts})
        if nhyp > 2 ** (d - j - 1):
            rep.hyper_bound_violations.append({"hyperplanes": idx, "dim": j, "containing": nhyp})
        if t < hypercube_checks:
            pre = _preimage_on_cube(f, lc.hyperplanes_H[idx[0]].normal)
            via_cube = count_hypercube_points_on_flat(pre, d - 1)
            rep.hypercube_crosschecks += 1
            if via_cube != npts:
                rep.hypercube_mismatches.append({"hyperplanes": idx, "direct": npts, "via_cube": via_cube})
    if with_rs is None:
        with_rs = d <= 5
    if with_rs:
        rep.rs_U = rs_exact(conf_u).edges
    return rep


# --------------------------------------------------------------------------
# set families


def _as_family(sets) -> tuple[frozenset, ...]:
    return tuple(frozenset(int(x) for x in s) for s in sets)


@dataclass(frozen=True)
class SetFamilyPair:
    """Two families of subsets of ``{0, ..., ground_size - 1}``."""

    ground_size: int
    family_A: tuple[frozenset, ...]
    family_B: tuple[frozenset, ...]

    def __post_init__(self):
        a, b = _as_family(self.family_A), _as_family(self.family_B)
        if not a or not b:
            raise ValueError("families must be nonempty")
        for s in a + b:
            if any(not 0 <= x < self.ground_size for x in s):
                raise ValueError(f"set {sorted(s)} is not inside the ground set")
        object.__setattr__(self, "family_A", a)
        object.__setattr__(self, "family_B", b)


@dataclass(frozen=True)
class GridFamilyParams:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError("a and b must be positive")

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.a, self.b)

    @property
    def d(self) -> int:
        return self.a * self.b


def grid_family(params: GridFamilyParams, *, cap: int = FAMILY_CAP) -> SetFamilyPair:
    """All ``a x b`` 0/1 matrices with exactly one 1 per column, as subsets of
    ``[a*b]`` (cell ``(row i, column j)`` is element ``j*a + i``); A = B."""
    a, b = params.a, params.b
    if a**b > cap:
        raise ConstructionCapExceeded(f"a^b = {a**b} exceeds cap {cap}")
    sets = tuple(
        frozenset(j * a + r for j, r in enumerate(choice))
        for choice in itertools.product(range(a), repeat=b)
    )
    return SetFamilyPair(a * b, sets, sets)


def cross_disjoint_epsilon(fp: SetFamilyPair) -> Fraction:
    """``Pr[A & B != {}]`` for independent uniform ``A``, ``B``."""
    hits = sum(1 for x in fp.family_A for y in fp.family_B if x & y)
    return Fraction(hits, len(fp.family_A) * len(fp.family_B))


def disjoint_fraction(fp: SetFamilyPair) -> Fraction:
    return 1 - cross_disjoint_epsilon(fp)


def grid_disjoint_closed_form(params: GridFamilyParams) -> Fraction:
    """Each set misses ``(a-1)^b`` of the ``a^b`` sets: fraction ``((a-1)/a)^b``."""
    return Fraction(params.a - 1, params.a) ** params.b


def cross_intersecting_profile(fp: SetFamilyPair) -> tuple[int, ...]:
    return tuple(sorted({len(x & y) for x in fp.family_A for y in fp.family_B}))


def intersection_matrix(fp: SetFamilyPair) -> RationalMatrix:
    return RationalMatrix.from_rows([[len(x & y) for y in fp.family_B] for x in fp.family_A])


def max_zero_rectangle_density(fp: SetFamilyPair, *, cap: int | None = None) -> Fraction:
    """Largest ``|R||S| / (|A||B|)`` with ``R x S`` exactly cross-disjoint."""
    kw = {} if cap is None else {"cap": cap}
    rect, _ = max_monochromatic_rectangle(intersection_matrix(fp), value=0, **kw)
    return Fraction(rect.size, len(fp.family_A) * len(fp.family_B))


def set_family_configuration(fp: SetFamilyPair) -> Configuration:
    """Sets of A as 0/1 points, sets of B as hyperplanes ``<1_B, x> = 0``;
    incidence is exactly disjointness."""
    dim = fp.ground_size
    if any(not s for s in fp.family_B):
        raise ValueError("the empty set has no hyperplane")
    pts = [tuple(int(i in s) for i in range(dim)) for s in fp.family_A]
    hs = [Hyperplane(tuple(int(i in s) for i in range(dim)), 0) for s in fp.family_B]
    return Configuration(tuple(pts), tuple(hs))


def is_t_cross_intersecting(r: Sequence[frozenset], s: Sequence[frozenset], t: int) -> bool:
    return all(len(x & y) == t for x in r for y in s)


def random_sparse_family(d: int, set_size: int, count: int, seed: int = DEFAULT_SEED) -> tuple[frozenset, ...]:
    """``count`` uniformly random ``set_size``-subsets of ``[d]``. Measurement
    only; no density guarantee is attached."""
    if not 0 <= set_size <= d:
        raise ValueError("set_size must lie in [0, d]")
    rng = np.random.default_rng(seed)
    return tuple(frozenset(rng.choice(d, size=set_size, replace=False).tolist()) for _ in range(count))


@dataclass
class FranklRodlReport:
    d: int
    bound: int
    max_product: int
    per_t: dict[int, int]
    maximizers: list[tuple[tuple[frozenset, ...], tuple[frozenset, ...], int]]
    families_examined: int

    @property
    def within_bound(self) -> bool:
        return self.max_product <= self.bound

    @property
    def attains_bound(self) -> bool:
        return self.max_product == self.bound


def frankl_rodl_check(d: int, *, cap: int = 4, keep: int = 5) -> FranklRodlReport:
    """Exhaustive max of ``|R||S|`` over ``{t}``-cross-intersecting pairs in ``2^[d]``.

    For a fixed ``R`` and ``t`` the best ``S`` is forced (every ``B`` meeting
    each member of ``R`` in exactly ``t`` elements), so it suffices to
    enumerate ``R``; branches whose forced ``S`` is empty are cut.
    """
    if d > cap:
        raise ConstructionCapExceeded(f"d = {d} exceeds exhaustive cap {cap}")
    universe = 1 << d
    best = 0
    per_t: dict[int, int] = {}
    maximizers: list = []
    examined = 0

    def to_sets(mask_list):
        return tuple(frozenset(i for i in range(d) if x >> i & 1) for x in mask_list)

    for t in range(d + 1):
        compat = []
        for a in range(universe):
            mk = 0
            for b in range(universe):
                if (a & b).bit_count() == t:
                    mk |= 1 << b
            compat.append(mk)
        tbest = 0
        stack = [(0, (1 << universe) - 1, ())]
        while stack:
            start, smask, chosen = stack.pop()
            for a in range(start, universe):
                nxt = smask & compat[a]
                if not nxt:
                    continue
                r = chosen + (a,)
                examined += 1
                prod = len(r) * nxt.bit_count()
                tbest = max(tbest, prod)
                if prod > best:
                    best, maximizers = prod, []
                if prod == best and len(maximizers) < keep:
                    s_list = [b for b in range(universe) if nxt >> b & 1]
                    maximizers.append((to_sets(r), to_sets(s_list), t))
                stack.append((a + 1, nxt, r))
        per_t[t] = tbest
    return FranklRodlReport(d, 2**d, best, per_t, maximizers, examined)
