"""Point-hyperplane configurations, parallel partitions and the correspondence
between partitioned configurations and listable matrices."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

import numpy as np

from .geometry import (
    DimensionMismatch,
    Flat,
    Hyperplane,
    Point,
    as_point,
    exact_matmul,
    hyperplanes_containing,
    incidence_matrix,
    integer_hyperplanes,
    integer_points,
)
from .linalg import RationalMatrix, as_matrix, factorize

log = logging.getLogger(__name__)


class InvalidPartition(ValueError):
    pass


class InvalidBiclique(ValueError):
    pass


def mask_to_indices(mask: int) -> tuple[int, ...]:
    bits = bin(mask)[:1:-1]
    return tuple(i for i, b in enumerate(bits) if b == "1")


def indices_to_mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class Configuration:
    """A finite multiset of points and a finite list of hyperplanes in R^d.

    Duplicate points are allowed. Duplicate hyperplanes are allowed too (they
    arise in ``con_of`` when two columns share a normal and a value); use
    :meth:`deduplicated` for the set view.
    """

    points: tuple[Point, ...]
    hyperplanes: tuple[Hyperplane, ...]

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.points)
        hs = tuple(self.hyperplanes)
        if not pts or not hs:
            raise ValueError("a configuration needs at least one point and one hyperplane")
        d = len(pts[0])
        if any(len(p) != d for p in pts) or any(h.dim != d for h in hs):
            raise DimensionMismatch("configuration mixes ambient dimensions")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "hyperplanes", hs)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.hyperplanes)

    def deduplicated(self) -> "Configuration":
        seen, hs = set(), []
        for h in self.hyperplanes:
            if h not in seen:
                seen.add(h)
                hs.append(h)
        return Configuration(self.points, tuple(hs))

    @cached_property
    def incidence(self) -> np.ndarray:
        """``(m, n)`` Boolean incidence matrix."""
        return incidence_matrix(self.points, self.hyperplanes)

    @cached_property
    def point_masks(self) -> tuple[int, ...]:
        """Per hyperplane, the bitmask of incident points."""
        out = []
        for row in self.incidence:
            out.append(int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little"))
        return tuple(out)

    @cached_property
    def _int_hyperplanes(self):
        return integer_hyperplanes(self.hyperplanes)

    @cached_property
    def _int_points(self):
        coords, scales = integer_points(self.points)
        return [list(c) for c in zip(*coords)], scales

    def containing(self, f: Flat) -> np.ndarray:
        """Boolean mask of hyperplanes containing the nonempty flat ``f``."""
        normals, offsets = self._int_hyperplanes
        return hyperplanes_containing(f, normals, offsets)

    def points_on(self, f: Flat) -> int:
        """Bitmask of points lying on ``f``."""
        if f.is_empty:
            return 0
        if not f.system:
            return (1 << self.n) - 1
        rows = []
        for r in f.system:
            s = lcm(*(x.denominator for x in r))
            rows.append([int(x * s) for x in r])
        cols, scales = self._int_points
        lhs = exact_matmul([r[:-1] for r in rows], cols)
        rhs = exact_matmul([[r[-1]] for r in rows], [scales])
        ok = np.all(lhs == rhs, axis=0)
        return indices_to_mask(np.flatnonzero(ok).tolist())


@dataclass(frozen=True)
class IncidenceStats:
    incidences: int
    density: Fraction


@dataclass(frozen=True)
class Rectangle:
    """Row and column index sets of a submatrix (sorted tuples)."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(sorted(set(self.rows))))
        object.__setattr__(self, "cols", tuple(sorted(set(self.cols))))

    @property
    def size(self) -> int:
        return len(self.rows) * len(self.cols)

    def is_monochromatic(self, m: RationalMatrix) -> bool:
        return len({m[i, j] for i in self.rows for j in self.cols}) <= 1

    def is_1listable(self, m: RationalMatrix) -> bool:
        return all(len({m[i, j] for i in self.rows}) <= 1 for j in self.cols)


@dataclass(frozen=True)
class ParallelPartition:
    """Blocks of hyperplane indices; ``labels`` optionally names each block
    (``con_of`` uses it for the originating matrix column)."""

    blocks: tuple[tuple[int, ...], ...]
    k: int
    labels: tuple[int, ...] | None = None

    def block_of(self) -> dict[int, int]:
        return {h: b for b, block in enumerate(self.blocks) for h in block}


def incidence_stats(c: Configuration) -> IncidenceStats:
    total = int(c.incidence.sum())
    return IncidenceStats(total, Fraction(total, c.n * c.m))


def validate_parallel_partition(c: Configuration, pp: ParallelPartition) -> None:
    """Raise :class:`InvalidPartition` unless ``pp`` is a parallel k-partition of ``c``."""
    flat = [h for b in pp.blocks for h in b]
    if sorted(flat) != list(range(c.m)):
        raise InvalidPartition("blocks must be disjoint and cover every hyperplane")
    inc = c.incidence
    for bi, block in enumerate(pp.blocks):
        if not block or len(block) > pp.k:
            raise InvalidPartition(f"block {bi} has size {len(block)}, bound is {pp.k}")
        first = c.hyperplanes[block[0]]
        if any(not c.hyperplanes[h].parallel_to(first) for h in block[1:]):
            raise InvalidPartition(f"block {bi} mixes normal directions")
        hits = inc[list(block)].sum(axis=0)
        bad = np.flatnonzero(hits != 1)
        if bad.size:
            raise InvalidPartition(
                f"point {int(bad[0])} meets block {bi} {int(hits[bad[0]])} times (must be exactly once)"
            )


def is_parallel_partition(c: Configuration, pp: ParallelPartition) -> bool:
    try:
        validate_parallel_partition(c, pp)
    except InvalidPartition:
        return False
    return True


def is_k_partition(c: Configuration, blocks: Sequence[Sequence[int]], k: int) -> bool:
    """Validator for not-necessarily-parallel partitions: every block covers every point."""
    flat = [h for b in blocks for h in b]
    if sorted(flat) != list(range(c.m)):
        return False
    inc = c.incidence
    return all(0 < len(b) <= k and bool(inc[list(b)].any(axis=0).all()) for b in blocks)


def find_parallel_partition(c: Configuration, k: int) -> ParallelPartition | None:
    """Group hyperplanes by direction, then layer each group by offset.

    Heuristic: may miss a partition on adversarial inputs with repeated
    hyperplanes, but any partition it returns is validated.
    """
    if k < 1:
        raise ValueError("k must be positive")
    groups: dict[tuple, list[int]] = {}
    for idx, h in enumerate(c.hyperplanes):
        groups.setdefault(h.canonical().normal, []).append(idx)
    blocks = []
    for members in groups.values():
        layers: list[list[int]] = []
        offsets: list[set] = []
        for idx in members:
            off = c.hyperplanes[idx].key[1]
            for layer, used in zip(layers, offsets):
                if off not in used:
                    layer.append(idx)
                    used.add(off)
                    break
            else:
                layers.append([idx])
                offsets.append({off})
        blocks.extend(tuple(layer) for layer in layers)
    blocks.sort(key=lambda b: b[0])
    pp = ParallelPartition(tuple(blocks), k)
    return pp if is_parallel_partition(c, pp) else None


def listability(m) -> int:
    """Least k such that every column has at most k distinct entries."""
    m = as_matrix(m)
    return max((len(set(m.col(j))) for j in range(m.cols)), default=0)


def arity(m) -> int:
    return len(as_matrix(m).values())


def mat_of(c: Configuration, pp: ParallelPartition) -> RationalMatrix:
    """Entry ``(i, j)`` is ``<p_i, a_j>`` with ``a_j`` the normal of block ``j``
    (taken from its first hyperplane, as written)."""
    validate_parallel_partition(c, pp)
    normals = [c.hyperplanes[b[0]].normal for b in pp.blocks]
    return RationalMatrix.from_rows(
        [[sum((x * y for x, y in zip(p, a)), Fraction(0)) for a in normals] for p in c.points],
        cols=len(normals),
    )


def con_of(m) -> tuple[Configuration, ParallelPartition]:
    """Configuration of a matrix via its canonical factorization ``M = P Q``.

    Points are the rows of ``P``; column ``j`` contributes one hyperplane
    ``<x, q_j> = b`` per distinct value ``b`` of that column, and those
    hyperplanes form block ``j``. An all-zero column has ``q_j = 0`` and thus no
    hyperplane; it is skipped and absent from ``labels``.
    """
    m = as_matrix(m)
    if m.rows == 0 or m.cols == 0:
        raise ValueError("Con(M) needs a nonempty matrix")
    fac = factorize(m)
    if fac.inner_dim == 0:
        raise ValueError("Con(M) is undefined for the zero matrix (rank 0)")
    points = [fac.left.row(i) for i in range(m.rows)]
    hyperplanes: list[Hyperplane] = []
    blocks, labels = [], []
    for j in range(m.cols):
        q = fac.right.col(j)
        if all(x == 0 for x in q):
            continue
        block = []
        for b in sorted(set(m.col(j))):
            block.append(len(hyperplanes))
            hyperplanes.append(Hyperplane(q, b))
        blocks.append(tuple(block))
        labels.append(j)
    if len(labels) < m.cols:
        log.info("con_of: skipped %d all-zero columns", m.cols - len(labels))
    conf = Configuration(tuple(points), tuple(hyperplanes))
    pp = ParallelPartition(tuple(blocks), max(1, listability(m)), tuple(labels))
    return conf, pp


def offset_set(c: Configuration) -> set[Fraction]:
    return {h.offset for h in c.hyperplanes}


def rectangle_from_biclique(c: Configuration, pp: ParallelPartition, bic, *, monochromatic: bool = True) -> Rectangle:
    """Rectangle of ``mat_of(c, pp)`` induced by a biclique.

    Rows are the biclique's points and columns the blocks it touches; that
    submatrix is 1-listable. With ``monochromatic`` (default) the columns are
    cut down to the largest value class, losing at most a factor equal to the
    number of distinct values. Column indices are mapped through ``pp.labels``
    when present.
    """
    from .search import validate_biclique

    if not bic.point_indices or not bic.hyperplane_indices:
        raise InvalidBiclique("biclique has an empty side")
    validate_biclique(c, bic)
    owner = pp.block_of()
    blocks = sorted({owner[h] for h in bic.hyperplane_indices})
    mat = mat_of(c, pp)
    rows = bic.point_indices
    values = {}
    for b in blocks:
        col = {mat[i, b] for i in rows}
        if len(col) != 1:
            raise InvalidBiclique(f"block {b} is not constant on the biclique rows")
        values.setdefault(col.pop(), []).append(b)
    if monochromatic:
        blocks = max(values.items(), key=lambda kv: (len(kv[1]), -kv[0]))[1]
    if pp.labels is not None:
        blocks = [pp.labels[b] for b in blocks]
    return Rectangle(tuple(rows), tuple(blocks))
