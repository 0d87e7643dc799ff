"""Large complete bipartite subgraphs of incidence graphs and large
monochromatic / 1-listable rectangles of matrices."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .configurations import (
    Configuration,
    InvalidBiclique,
    Rectangle,
    incidence_stats,
    mask_to_indices,
)
from .geometry import Flat, incident
from .linalg import RationalMatrix, as_matrix

DEFAULT_SEED = 20240601
#: Maximum number of distinct candidate flats visited by :func:`rs_exact`.
FLAT_CAP = 10**6
#: Largest "smaller side" enumerated by the exact rectangle searches.
RECTANGLE_CAP = 22


class SearchCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Biclique:
    """Witness of a complete bipartite subgraph: every listed point lies on
    ``flat`` and ``flat`` lies on every listed hyperplane."""

    flat: Flat
    point_indices: tuple[int, ...]
    hyperplane_indices: tuple[int, ...]

    @property
    def edges(self) -> int:
        return len(self.point_indices) * len(self.hyperplane_indices)


@dataclass(frozen=True)
class SearchBudget:
    trials: int = 1000
    seed: int = DEFAULT_SEED
    subset_size_cap: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


def validate_biclique(c: Configuration, bic: Biclique) -> None:
    """Raise :class:`InvalidBiclique` unless the witness is consistent with ``c``."""
    f = bic.flat
    if f.ambient_dim != c.dim:
        raise InvalidBiclique("witness flat lives in the wrong dimension")
    for i in bic.point_indices:
        if not 0 <= i < c.n:
            raise InvalidBiclique(f"point index {i} out of range")
        if not f.contains_point(c.points[i]):
            raise InvalidBiclique(f"point {i} is not on the witness flat")
    for j in bic.hyperplane_indices:
        if not 0 <= j < c.m:
            raise InvalidBiclique(f"hyperplane index {j} out of range")
        if f.is_empty or not f.contained_in(c.hyperplanes[j]):
            raise InvalidBiclique(f"witness flat is not contained in hyperplane {j}")
    for i in bic.point_indices:
        for j in bic.hyperplane_indices:
            if not incident(c.points[i], c.hyperplanes[j]):
                raise InvalidBiclique(f"pair ({i}, {j}) is not an incidence")


def _biclique(c: Configuration, f: Flat, pts: int | None = None) -> Biclique:
    if pts is None:
        pts = c.points_on(f)
    hs = tuple(np.flatnonzero(c.containing(f)).tolist())
    return Biclique(f, mask_to_indices(pts), hs)


def _better(cand: tuple, best: tuple | None) -> bool:
    # (edges, points, flat): more edges, then more points, then the smaller flat
    if best is None:
        return True
    if cand[:2] != best[:2]:
        return cand[:2] > best[:2]
    return cand[2] < best[2]


def rs_exact(c: Configuration, *, cap: int = FLAT_CAP) -> Biclique:
    """A maximum-edge complete bipartite subgraph of the incidence graph.

    Candidate witnesses are the distinct nonempty intersections of hyperplanes
    from ``c``; each is reached by a chain of strictly dimension-decreasing
    intersections, so chains never exceed ``d`` steps. Branches whose point
    count times ``m`` cannot beat the incumbent are pruned.
    """
    masks = c.point_masks
    hyps = c.hyperplanes
    best: tuple | None = None
    best_pts = 0
    seen: set[Flat] = set()
    stack: list[tuple[Flat, int]] = []
    for j in reversed(range(c.m)):
        stack.append((Flat.from_hyperplane(hyps[j]), masks[j]))
    while stack:
        f, pts = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        if len(seen) > cap:
            raise SearchCapExceeded(f"more than {cap} candidate flats")
        cont = c.containing(f)
        npts = pts.bit_count()
        cand = (npts * int(cont.sum()), npts, f)
        if _better(cand, best):
            best, best_pts = cand, pts
        if npts == 0:
            continue
        for j in reversed(np.flatnonzero(~cont).tolist()):
            sub = pts & masks[j]
            bound = sub.bit_count() * c.m
            if sub == 0 or bound < best[0]:
                continue
            g = f.intersect(hyps[j])
            if not g.is_empty and g not in seen:
                stack.append((g, sub))
    f = best[2]
    return _biclique(c, f, best_pts)


# --------------------------------------------------------------------------
# matrix rectangles


def _value_masks(m: RationalMatrix) -> list[dict[Fraction, int]]:
    out = []
    for i in range(m.rows):
        d: dict[Fraction, int] = {}
        for j, x in enumerate(m.row(i)):
            d[x] = d.get(x, 0) | (1 << j)
        out.append(d)
    return out


def _rect_better(cand: tuple, best: tuple | None) -> bool:
    # (size, nrows, rows, cols): larger, then more rows, then lexicographically first
    if best is None:
        return True
    if cand[:2] != best[:2]:
        return cand[:2] > best[:2]
    return cand[2:4] < best[2:4]


def max_monochromatic_rectangle(
    m, *, value=None, cap: int = RECTANGLE_CAP
) -> tuple[Rectangle, Fraction | None]:
    """Largest all-equal rectangle (optionally restricted to entries equal to ``value``).

    Enumerates subsets of the smaller side; the other side is forced to all
    indices agreeing on the common value. Returns an empty rectangle with
    value ``None`` when no entry qualifies.
    """
    m = as_matrix(m)
    if m.rows == 0 or m.cols == 0:
        raise ValueError("empty matrix")
    transposed = m.cols < m.rows
    work = m.T if transposed else m
    if work.rows > cap:
        raise SearchCapExceeded(f"smaller side {work.rows} exceeds cap {cap}")
    vm = _value_masks(work)
    if value is not None:
        from .linalg import to_rational

        value = to_rational(value)
        vm = [{value: r[value]} if value in r else {} for r in vm]
    best: tuple | None = None

    def consider(chosen: list[int], v: Fraction, mask: int):
        nonlocal best
        side = mask_to_indices(mask)
        rows, cols = (side, tuple(chosen)) if transposed else (tuple(chosen), side)
        cand = (len(rows) * len(cols), len(rows), rows, cols, v)
        if _rect_better(cand, best):
            best = cand

    def dfs(start: int, masks: dict[Fraction, int], chosen: list[int]):
        for i in range(start, work.rows):
            nxt = {v: mk & vm[i][v] for v, mk in masks.items() if v in vm[i] and mk & vm[i][v]}
            if not nxt:
                continue
            chosen.append(i)
            for v, mk in nxt.items():
                consider(chosen, v, mk)
            dfs(i + 1, nxt, chosen)
            chosen.pop()

    full = (1 << work.cols) - 1
    dfs(0, {v: full for r in vm for v in r}, [])
    if best is None:
        return Rectangle((), ()), None
    return Rectangle(best[2], best[3]), best[4]


def max_1listable_submatrix(m, *, cap: int = RECTANGLE_CAP) -> Rectangle:
    """Largest rectangle in which every column is constant.

    Row subsets force their column set; column subsets force the rows to a
    class of equal patterns. The smaller side is enumerated.
    """
    m = as_matrix(m)
    if m.rows == 0 or m.cols == 0:
        raise ValueError("empty matrix")
    if min(m.rows, m.cols) > cap:
        raise SearchCapExceeded(f"smaller side {min(m.rows, m.cols)} exceeds cap {cap}")
    best: tuple | None = None

    def consider(rows: Sequence[int], cols: Sequence[int]):
        nonlocal best
        cand = (len(rows) * len(cols), len(rows), tuple(rows), tuple(cols))
        if _rect_better(cand, best):
            best = cand

    if m.rows <= m.cols:
        eq = [[sum(1 << j for j in range(m.cols) if m[i, j] == m[r, j]) for i in range(m.rows)] for r in range(m.rows)]

        def dfs(r0: int, start: int, mask: int, chosen: list[int]):
            for i in range(start, m.rows):
                nxt = mask & eq[r0][i]
                if not nxt:
                    continue
                chosen.append(i)
                consider(chosen, mask_to_indices(nxt))
                dfs(r0, i + 1, nxt, chosen)
                chosen.pop()

        full = (1 << m.cols) - 1
        for r0 in range(m.rows):
            consider([r0], range(m.cols))
            dfs(r0, r0 + 1, full, [r0])
    else:
        def dfs_cols(start: int, classes: list[list[int]], chosen: list[int]):
            for j in range(start, m.cols):
                nxt: list[list[int]] = []
                for cls in classes:
                    split: dict[Fraction, list[int]] = {}
                    for i in cls:
                        split.setdefault(m[i, j], []).append(i)
                    nxt.extend(split.values())
                chosen.append(j)
                for cls in nxt:
                    consider(cls, chosen)
                dfs_cols(j + 1, nxt, chosen)
                chosen.pop()

        dfs_cols(0, [list(range(m.rows))], [])
    return Rectangle(best[2], best[3])


# --------------------------------------------------------------------------
# randomized sampler


@dataclass
class SamplerRun:
    trials: int
    successes: int
    epsilon: Fraction
    predicted_rate: Fraction
    guaranteed_edges: Fraction
    best: Biclique | None = None
    min_success_edges: int | None = None
    first_success: int | None = None


class _Sampler:
    """Caches flats and containment counts across trials of the sampling process."""

    def __init__(self, c: Configuration):
        self.c = c
        stats = incidence_stats(c)
        if stats.density == 0:
            raise ValueError("randomized sampling needs a positive incidence density")
        self.eps = stats.density
        self.d = c.dim
        self.eps_d = self.eps ** self.d
        self._flats: dict[tuple[int, ...], Flat] = {}
        self._contain: dict[Flat, int] = {}

    def flat(self, key: tuple[int, ...]) -> Flat:
        key = tuple(sorted(set(key)))
        f = self._flats.get(key)
        if f is None:
            f = Flat.whole(self.d) if not key else self.flat(key[:-1]).intersect(self.c.hyperplanes[key[-1]])
            self._flats[key] = f
        return f

    def containing_count(self, f: Flat) -> int:
        cnt = self._contain.get(f)
        if cnt is None:
            cnt = int(self.c.containing(f).sum())
            self._contain[f] = cnt
        return cnt

    def trial(self, chosen: Sequence[int]) -> Biclique | None:
        """One run of the process on the hyperplane sequence ``chosen``."""
        c, n, m = self.c, self.c.n, self.c.m
        masks = c.point_masks
        pts = (1 << n) - 1
        for j in chosen:
            pts &= masks[j]
        # need at least an eps^d/2 fraction of points on the full intersection
        if 2 * pts.bit_count() < self.eps_d * n or pts == 0:
            return None
        for j in range(1, len(chosen)):
            prefix = self.flat(tuple(chosen[:j]))
            if self.flat(tuple(chosen[: j + 1])) != prefix:
                continue
            if 3 * self.d * self.containing_count(prefix) >= self.eps_d * m:
                prefix_pts = (1 << n) - 1
                for i in chosen[:j]:
                    prefix_pts &= masks[i]
                return _biclique(c, prefix, prefix_pts)
        # the full intersection itself, when no proper prefix qualifies
        full = self.flat(tuple(chosen))
        if 3 * self.d * self.containing_count(full) >= self.eps_d * m:
            return _biclique(c, full, pts)
        return None

    def draw(self, seed: int, t: int) -> list[int]:
        rng = np.random.default_rng([seed, t])
        return rng.integers(0, self.c.m, size=self.d).tolist()


def iter_sampler_trials(c: Configuration, budget: SearchBudget) -> Iterator[Biclique | None]:
    s = _Sampler(c)
    for t in range(budget.trials):
        yield s.trial(s.draw(budget.seed, t))


def randomized_biclique(c: Configuration, budget: SearchBudget | None = None, *, keep_best: bool = False) -> Biclique | None:
    """Sample ``d`` hyperplanes with replacement and intersect them, per trial.

    A trial succeeds when the full intersection holds an ``eps^d/2`` fraction of
    the points and some prefix intersection is already contained in the next
    sampled hyperplane and in an ``eps^d/(3d)`` fraction of all hyperplanes;
    that prefix flat is returned. Failing that, the full intersection is
    accepted if it alone meets the hyperplane threshold. Per-trial randomness is derived from
    ``(seed, trial index)``.
    """
    budget = budget or SearchBudget()
    best = None
    for bic in iter_sampler_trials(c, budget):
        if bic is None:
            continue
        if not keep_best:
            return bic
        if best is None or (bic.edges, len(bic.point_indices)) > (best.edges, len(best.point_indices)):
            best = bic
    return best


def sampler_success_rate(c: Configuration, budget: SearchBudget) -> SamplerRun:
    s = _Sampler(c)
    d = s.d
    run = SamplerRun(
        trials=budget.trials,
        successes=0,
        epsilon=s.eps,
        predicted_rate=s.eps_d / 6,
        guaranteed_edges=s.eps_d**2 / (6 * d) * c.m * c.n,
    )
    for t in range(budget.trials):
        bic = s.trial(s.draw(budget.seed, t))
        if bic is None:
            continue
        run.successes += 1
        if run.first_success is None:
            run.first_success = t
        if run.min_success_edges is None or bic.edges < run.min_success_edges:
            run.min_success_edges = bic.edges
        if run.best is None or bic.edges > run.best.edges:
            run.best = bic
    return run


def greedy_biclique(c: Configuration, budget: SearchBudget | None = None) -> Biclique:
    """Baseline: start from the busiest hyperplane and keep intersecting with the
    hyperplane that maximizes (points on the new flat) x (hyperplanes containing it)."""
    budget = budget or SearchBudget()
    steps = budget.subset_size_cap or c.dim
    masks = c.point_masks
    start = max(range(c.m), key=lambda j: (masks[j].bit_count(), -j))
    f, pts = Flat.from_hyperplane(c.hyperplanes[start]), masks[start]
    best = _biclique(c, f, pts)
    for _ in range(steps):
        cont = c.containing(f)
        choice = None
        for j in np.flatnonzero(~cont).tolist():
            sub = pts & masks[j]
            if not sub:
                continue
            g = f.intersect(c.hyperplanes[j])
            if g.is_empty:
                continue
            score = sub.bit_count() * int(c.containing(g).sum())
            if choice is None or score > choice[0]:
                choice = (score, g, sub)
        if choice is None:
            break
        _, f, pts = choice
        cand = _biclique(c, f, pts)
        if (cand.edges, len(cand.point_indices)) > (best.edges, len(best.point_indices)):
            best = cand
    return best


def biclique_oracle_edges(c: Configuration) -> int:
    """rs by brute force over hyperplane subsets (graph-only, no geometry).

    Exponential in ``m``; meant as an independent check on small inputs.
    """
    masks = c.point_masks
    best = 0

    def rec(i: int, common: int, size: int):
        nonlocal best
        if size:
            best = max(best, size * common.bit_count())
        for j in range(i, c.m):
            nxt = common & masks[j]
            if nxt:
                rec(j + 1, nxt, size + 1)

    rec(0, (1 << c.n) - 1, 0)
    return best
