"""JSON round-tripping for matrices, configurations and search results.

Rationals are written as exact strings (``"3/4"``, ``"-2"``); integers may
also be given as JSON numbers on input. Floats are rejected.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from .configurations import Configuration, ParallelPartition, Rectangle
from .constructions import SetFamilyPair
from .geometry import Flat, Hyperplane
from .linalg import RationalMatrix, to_rational
from .search import Biclique


class PayloadError(ValueError):
    pass


def fraction_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_str(x, digits: int = 6) -> str:
    """Display-only rendering with ``digits`` significant digits."""
    return f"{float(Fraction(x)):.{digits}g}"


def _rat(v) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise PayloadError(f"expected an exact rational, got {v!r}")
    try:
        return to_rational(v)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise PayloadError(str(e)) from None


def matrix_to_json(m: RationalMatrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [[fraction_str(x) for x in r] for r in m.tolist()]}


def matrix_from_json(obj) -> RationalMatrix:
    if isinstance(obj, list):
        obj = {"entries": obj}
    try:
        entries = obj["entries"]
    except (KeyError, TypeError):
        raise PayloadError("matrix payload needs an 'entries' array") from None
    rows = [[_rat(x) for x in r] for r in entries]
    r = obj.get("rows", len(rows))
    c = obj.get("cols", len(rows[0]) if rows else 0)
    if len(rows) != r or any(len(row) != c for row in rows):
        raise PayloadError(f"entries do not match declared shape {r}x{c}")
    return RationalMatrix.from_rows(rows, cols=c)


def hyperplane_to_json(h: Hyperplane) -> dict:
    return {"normal": [fraction_str(x) for x in h.normal], "offset": fraction_str(h.offset)}


def configuration_to_json(c: Configuration, pp: ParallelPartition | None = None) -> dict:
    out: dict[str, Any] = {
        "dim": c.dim,
        "points": [[fraction_str(x) for x in p] for p in c.points],
        "hyperplanes": [hyperplane_to_json(h) for h in c.hyperplanes],
    }
    if pp is not None:
        out["partition"] = {"k": pp.k, "blocks": [list(b) for b in pp.blocks]}
        if pp.labels is not None:
            out["partition"]["labels"] = list(pp.labels)
    return out


def configuration_from_json(obj) -> tuple[Configuration, ParallelPartition | None]:
    try:
        pts = [tuple(_rat(x) for x in p) for p in obj["points"]]
        hs = [Hyperplane(tuple(_rat(x) for x in h["normal"]), _rat(h["offset"])) for h in obj["hyperplanes"]]
    except (KeyError, TypeError) as e:
        raise PayloadError(f"malformed configuration payload: {e}") from None
    if "dim" in obj and pts and len(pts[0]) != obj["dim"]:
        raise PayloadError("declared dim does not match the points")
    c = Configuration(tuple(pts), tuple(hs))
    pp = None
    if obj.get("partition"):
        p = obj["partition"]
        labels = p.get("labels")
        pp = ParallelPartition(tuple(tuple(b) for b in p["blocks"]), int(p["k"]),
                               tuple(labels) if labels is not None else None)
    return c, pp


def flat_to_json(f: Flat) -> dict:
    return {
        "dim": f.dim,
        "ambient_dim": f.ambient_dim,
        "equations": [[fraction_str(x) for x in r] for r in f.system],
    }


def biclique_to_json(b: Biclique) -> dict:
    return {
        "points": list(b.point_indices),
        "hyperplanes": list(b.hyperplane_indices),
        "edges": b.edges,
        "flat": flat_to_json(b.flat) if b.flat is not None else None,
    }


def rectangle_to_json(r: Rectangle, value=None) -> dict:
    out = {"rows": list(r.rows), "cols": list(r.cols), "size": r.size}
    if value is not None:
        out["value"] = fraction_str(value)
    return out


def family_to_json(fp: SetFamilyPair) -> dict:
    """Sets are 0-based sorted lists of ground elements."""
    return {
        "ground_size": fp.ground_size,
        "family_A": [sorted(s) for s in fp.family_A],
        "family_B": [sorted(s) for s in fp.family_B],
    }


def family_from_json(obj) -> SetFamilyPair:
    try:
        return SetFamilyPair(int(obj["ground_size"]), obj["family_A"], obj["family_B"])
    except (KeyError, TypeError) as e:
        raise PayloadError(f"malformed family payload: {e}") from None


def jsonable(x):
    """Recursively convert Fractions, tuples and sets into JSON-ready values."""
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    return x


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    seed: int | None = None
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return jsonable(asdict(self))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)
