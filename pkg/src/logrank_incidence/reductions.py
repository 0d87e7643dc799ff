"""Listability reductions and the rectangle-oracle-to-protocol builder."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .configurations import Rectangle, listability
from .linalg import RationalMatrix, SupportPolynomial, as_matrix, entrywise_poly, rank
from .search import max_1listable_submatrix, max_monochromatic_rectangle

log = logging.getLogger(__name__)

MAX_DEPTH = 64

Oracle = Callable[[RationalMatrix], Rectangle]


class ReductionError(AssertionError):
    """An invariant of the reduction pipeline failed on a concrete input."""


class InvalidRectangle(ValueError):
    def __init__(self, msg: str, rectangle: Rectangle | None = None):
        super().__init__(msg)
        self.rectangle = rectangle


@dataclass(frozen=True)
class NormalizationRecord:
    """Per original column: ``a_values[j]`` and ``scale_values[j] = 1/(b_j - a_j)``
    (``None`` for dropped constant columns)."""

    a_values: tuple[Fraction | None, ...]
    scale_values: tuple[Fraction | None, ...]
    dropped_constant_columns: tuple[int, ...]
    kept_columns: tuple[int, ...]

    def invert(self, n: RationalMatrix) -> RationalMatrix:
        """Undo the normalization, recovering the kept columns of the original."""
        cols = []
        for jj, j in enumerate(self.kept_columns):
            a, s = self.a_values[j], self.scale_values[j]
            cols.append([x / s + a for x in n.col(jj)])
        return RationalMatrix.from_rows(list(zip(*cols)) if cols else [[] for _ in range(n.rows)], cols=len(cols))


def normalize_columns(m) -> tuple[RationalMatrix, NormalizationRecord]:
    """Drop constant columns and map the rest by ``x -> (x - a_j)/(b_j - a_j)``
    where ``a_j < b_j`` are the two smallest values of the column."""
    m = as_matrix(m)
    a_vals, scales, dropped, kept = [], [], [], []
    for j in range(m.cols):
        vals = sorted(set(m.col(j)))
        if len(vals) <= 1:
            a_vals.append(None)
            scales.append(None)
            dropped.append(j)
            continue
        a_vals.append(vals[0])
        scales.append(1 / (vals[1] - vals[0]))
        kept.append(j)
    rows = [[(m[i, j] - a_vals[j]) * scales[j] for j in kept] for i in range(m.rows)]
    n = RationalMatrix.from_rows(rows, cols=len(kept))
    if kept and rank(n) > rank(m) + 1:
        raise ReductionError("normalization raised the rank by more than one")
    return n, NormalizationRecord(tuple(a_vals), tuple(scales), tuple(dropped), tuple(kept))


STEP_POLY = SupportPolynomial({1: -1, 2: 1})  # z(z - 1)


def listability_step(m) -> RationalMatrix:
    """Entrywise ``z(z-1)``: merges the 0 and 1 of every column, so listability
    drops by at least one while rank grows to at most ``d^2 + d``."""
    m = as_matrix(m)
    zero, one = Fraction(0), Fraction(1)
    for j in range(m.cols):
        col = set(m.col(j))
        if zero not in col or one not in col:
            raise ValueError(f"column {j} must contain both 0 and 1")
    out = entrywise_poly(m, STEP_POLY)
    if m.cols and listability(out) > listability(m) - 1:
        raise ReductionError("listability did not decrease")
    d = rank(m)
    if rank(out) > d * d + d:
        raise ReductionError(f"rank bound d^2+d violated for d={d}")
    return out


def _exhaustive_oracle(m: RationalMatrix) -> Rectangle:
    return max_1listable_submatrix(m)


def find_1listable_recursive(m, oracle: Oracle | None = None, *, max_depth: int = MAX_DEPTH) -> Rectangle:
    """Induction on listability: normalize, take the constant-column branch if it
    covers at least half the columns, otherwise square down with
    :func:`listability_step`, recurse, and finish with ``oracle`` on the
    2-listable restriction. The result is validated 1-listable in ``m``."""
    m = as_matrix(m)
    oracle = oracle or _exhaustive_oracle
    rect = _find(m, oracle, 0, max_depth)
    if not rect.rows or not rect.cols or not rect.is_1listable(m):
        raise ReductionError(f"result {rect} is not a nonempty 1-listable rectangle")
    return rect


def _call_oracle(oracle: Oracle, m: RationalMatrix) -> Rectangle:
    r = oracle(m)
    if not r.rows or not r.cols or not r.is_1listable(m):
        raise InvalidRectangle("oracle returned an invalid 1-listable rectangle", r)
    return r


def _find(m: RationalMatrix, oracle: Oracle, depth: int, max_depth: int) -> Rectangle:
    if depth > max_depth:
        raise ReductionError(f"recursion depth exceeded {max_depth}")
    all_rows = tuple(range(m.rows))
    if listability(m) <= 1:
        return Rectangle(all_rows, tuple(range(m.cols)))
    n, rec = normalize_columns(m)
    log.debug("level %d: %dx%d, listability %d, rank %d, constant columns %d",
              depth, m.rows, m.cols, listability(m), rank(m), len(rec.dropped_constant_columns))
    if 2 * len(rec.dropped_constant_columns) >= m.cols:
        return Rectangle(all_rows, rec.dropped_constant_columns)
    kept = rec.kept_columns
    if listability(n) <= 2:
        r = _call_oracle(oracle, n)
        return Rectangle(r.rows, tuple(kept[j] for j in r.cols))
    squared = listability_step(n)
    s = _find(squared, oracle, depth + 1, max_depth)
    sub = n.submatrix(s.rows, s.cols)
    if listability(sub) > 2:
        raise ReductionError("restriction of the previous level is not 2-listable")
    r = _call_oracle(oracle, sub)
    return Rectangle(tuple(s.rows[i] for i in r.rows), tuple(kept[s.cols[j]] for j in r.cols))


def binarize_two_valued(m) -> RationalMatrix:
    """Affine map of a two-valued matrix onto {0, 1} (smaller value to 0)."""
    m = as_matrix(m)
    vals = sorted(m.values())
    if len(vals) != 2:
        raise ValueError(f"matrix has {len(vals)} distinct values, expected 2")
    a, b = vals
    out = m.map(lambda x: (x - a) / (b - a))
    if rank(out) > rank(m) + 1:
        raise ReductionError("binarization raised the rank by more than one")
    return out


# --------------------------------------------------------------------------
# protocols


@dataclass
class ProtocolNode:
    id: int
    parent: int | None
    speaker: str | None = None  # "row" | "col" for internal nodes
    subset: tuple[int, ...] = ()  # indices answering 1
    one: int | None = None
    zero: int | None = None
    rectangle: Rectangle | None = None
    value: Fraction | None = None

    @property
    def is_leaf(self) -> bool:
        return self.rectangle is not None


@dataclass
class ProtocolTree:
    """Binary protocol; leaf rectangles partition rows x cols."""

    rows: int
    cols: int
    nodes: list[ProtocolNode] = field(default_factory=list)
    root: int = 0

    def _add(self, **kw) -> ProtocolNode:
        node = ProtocolNode(id=len(self.nodes), **kw)
        self.nodes.append(node)
        return node

    def leaves(self) -> list[ProtocolNode]:
        return [n for n in self.nodes if n.is_leaf]

    @property
    def depth(self) -> int:
        def rec(i: int) -> int:
            n = self.nodes[i]
            return 0 if n.is_leaf else 1 + max(rec(n.one), rec(n.zero))

        return rec(self.root)

    def evaluate(self, x: int, y: int) -> Fraction:
        n = self.nodes[self.root]
        while not n.is_leaf:
            probe = x if n.speaker == "row" else y
            n = self.nodes[n.one if probe in n.subset else n.zero]
        return n.value

    def validate(self, m) -> None:
        """Raise unless leaves partition the grid into monochromatic rectangles
        and the tree agrees with ``m`` everywhere."""
        m = as_matrix(m)
        covered = [[0] * m.cols for _ in range(m.rows)]
        for leaf in self.leaves():
            r = leaf.rectangle
            if not r.is_monochromatic(m) or (r.size and m[r.rows[0], r.cols[0]] != leaf.value):
                raise ReductionError(f"leaf {leaf.id} is not monochromatic with its value")
            for i in r.rows:
                for j in r.cols:
                    covered[i][j] += 1
        if any(c != 1 for row in covered for c in row):
            raise ReductionError("leaf rectangles do not partition the grid")
        for i in range(m.rows):
            for j in range(m.cols):
                if self.evaluate(i, j) != m[i, j]:
                    raise ReductionError(f"protocol output wrong at ({i}, {j})")

    def to_json(self) -> dict:
        from .serialization import fraction_str

        nodes = []
        for n in self.nodes:
            item = {"id": n.id, "parent": n.parent}
            if n.is_leaf:
                item.update(rows=list(n.rectangle.rows), cols=list(n.rectangle.cols), value=fraction_str(n.value))
            else:
                item.update(speaker=n.speaker, subset=list(n.subset), one=n.one, zero=n.zero)
            nodes.append(item)
        return {"rows": self.rows, "cols": self.cols, "root": self.root, "depth": self.depth, "nodes": nodes}

    def to_dot(self) -> str:
        lines = ["digraph protocol {"]
        for n in self.nodes:
            if n.is_leaf:
                label = f"{list(n.rectangle.rows)} x {list(n.rectangle.cols)} = {n.value}"
                lines.append(f'  n{n.id} [shape=box, label="{label}"];')
            else:
                who = "Alice (row)" if n.speaker == "row" else "Bob (col)"
                lines.append(f'  n{n.id} [label="{who}: in {list(n.subset)}?"];')
                lines.append(f'  n{n.id} -> n{n.one} [label="1"];')
                lines.append(f'  n{n.id} -> n{n.zero} [label="0"];')
        lines.append("}")
        return "\n".join(lines)


def _default_finder(m: RationalMatrix) -> Rectangle:
    return max_monochromatic_rectangle(m)[0]


def build_protocol(m, rectangle_finder: Callable[[RationalMatrix], Rectangle] | None = None,
                   *, max_depth: int = 4 * MAX_DEPTH) -> ProtocolTree:
    """Recursive quadrant protocol.

    On a nonconstant submatrix, find a monochromatic rectangle ``A x B``; the row
    player announces ``x in A``, the column player ``y in B``; ``A x B`` becomes a
    leaf and the other (nonempty) quadrants recurse. Announcements that would
    carry no information (``A`` or ``B`` everything) are skipped.
    """
    m = as_matrix(m)
    if m.rows == 0 or m.cols == 0:
        raise ValueError("empty matrix")
    finder = rectangle_finder or _default_finder
    tree = ProtocolTree(m.rows, m.cols)

    def leaf(parent, rows, cols) -> int:
        return tree._add(parent=parent, rectangle=Rectangle(rows, cols), value=m[rows[0], cols[0]]).id

    def split(parent, speaker, subset) -> ProtocolNode:
        return tree._add(parent=parent, speaker=speaker, subset=tuple(subset))

    def build(rows: tuple[int, ...], cols: tuple[int, ...], parent, depth: int) -> int:
        if depth > max_depth:
            raise ReductionError(f"protocol recursion exceeded depth {max_depth}")
        sub = m.submatrix(rows, cols)
        if len(sub.values()) == 1:
            return leaf(parent, rows, cols)
        r = finder(sub)
        if not r.rows or not r.cols or not set(r.rows) <= set(range(len(rows))) \
                or not set(r.cols) <= set(range(len(cols))) or not r.is_monochromatic(sub):
            raise InvalidRectangle(f"finder returned an invalid rectangle {r}", r)
        a = tuple(rows[i] for i in r.rows)
        b = tuple(cols[j] for j in r.cols)
        a_out = tuple(x for x in rows if x not in set(a))
        b_out = tuple(y for y in cols if y not in set(b))

        def col_stage(part_rows, parent_id, in_a: bool) -> int:
            if not b_out:
                return leaf(parent_id, part_rows, cols) if in_a else build(part_rows, cols, parent_id, depth + 1)
            node = split(parent_id, "col", b)
            node.one = leaf(node.id, part_rows, b) if in_a else build(part_rows, b, node.id, depth + 1)
            node.zero = build(part_rows, b_out, node.id, depth + 1)
            return node.id

        if not a_out:
            return col_stage(rows, parent, True)
        node = split(parent, "row", a)
        node.one = col_stage(a, node.id, True)
        node.zero = col_stage(a_out, node.id, False)
        return node.id

    tree.root = build(tuple(range(m.rows)), tuple(range(m.cols)), None, 0)
    return tree


def log_rank_lower_bound(m) -> int:
    """``ceil(log2 rank)``: no correct deterministic protocol is shallower."""
    r = rank(m)
    return 0 if r <= 1 else (r - 1).bit_length()
