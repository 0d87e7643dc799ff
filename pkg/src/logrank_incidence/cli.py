"""Command-line interface: ``logrank-incidence <command> ...``.

Every command prints a RunReport (JSON by default). Exit status is 0 on
success, 1 when a verification fails, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import acceptance
from .configurations import Configuration, arity, con_of, incidence_stats, listability
from .constructions import (
    ConstructionCapExceeded,
    GridFamilyParams,
    LatticeConstruction,
    SetFamilyPair,
    cross_disjoint_epsilon,
    frankl_rodl_check,
    grid_disjoint_closed_form,
    grid_family,
    max_zero_rectangle_density,
    verify_lattice_claims,
)
from .geometry import HypercubeCapExceeded
from .linalg import IndexSpaceExceeded, rank
from .reductions import ReductionError, build_protocol, find_1listable_recursive, log_rank_lower_bound
from .search import (
    DEFAULT_SEED,
    RECTANGLE_CAP,
    SearchBudget,
    SearchCapExceeded,
    max_1listable_submatrix,
    max_monochromatic_rectangle,
    rs_exact,
    sampler_success_rate,
    validate_biclique,
)
from .serialization import (
    PayloadError,
    RunReport,
    biclique_to_json,
    configuration_from_json,
    configuration_to_json,
    decimal_str,
    family_from_json,
    family_to_json,
    fraction_str,
    jsonable,
    matrix_from_json,
    matrix_to_json,
    rectangle_to_json,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class VerificationFailed(Exception):
    def __init__(self, report: RunReport):
        super().__init__(report.command)
        self.report = report


def _exact(x) -> dict:
    return {"exact": fraction_str(x), "decimal": decimal_str(x)}


# ----------------------------------------------------------------- input


def _read_payload(args) -> dict:
    text = open(args.input).read() if args.input and args.input != "-" else sys.stdin.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise PayloadError(f"input is not JSON: {e}") from None
    # unwrap a RunReport produced by another command
    if isinstance(obj, dict) and "command" in obj and "results" in obj:
        return obj["results"]
    return obj


def _kind(obj) -> str:
    if isinstance(obj, list) or (isinstance(obj, dict) and "entries" in obj):
        return "matrix"
    if isinstance(obj, dict):
        if "family" in obj:
            return "family"
        if "configuration" in obj:
            return "configuration"
        if "matrix" in obj:
            return "matrix"
        if "family_A" in obj:
            return "family-raw"
        if "points" in obj:
            return "configuration-raw"
    raise PayloadError("input is not a matrix, configuration or set family payload")


def _load_matrix(obj):
    k = _kind(obj)
    if k == "matrix":
        return matrix_from_json(obj["matrix"] if isinstance(obj, dict) and "matrix" in obj else obj)
    raise PayloadError(f"expected a matrix payload, got {k}")


def _load_configuration(obj) -> Configuration:
    k = _kind(obj)
    if k == "configuration":
        return configuration_from_json(obj["configuration"])[0]
    if k == "configuration-raw":
        return configuration_from_json(obj)[0]
    if k == "matrix":
        return con_of(_load_matrix(obj))[0]
    raise PayloadError(f"expected a configuration payload, got {k}")


def _load_family(obj) -> SetFamilyPair:
    k = _kind(obj)
    if k == "family":
        return family_from_json(obj["family"])
    if k == "family-raw":
        return family_from_json(obj)
    raise PayloadError(f"expected a set family payload, got {k}")


# ----------------------------------------------------------------- commands


def cmd_gen(args) -> RunReport:
    rep = RunReport(command=f"gen {args.what}", seed=args.seed)
    if args.what == "lattice":
        _need(args, "d")
        lc = LatticeConstruction(args.d)
        rep.inputs = {"d": args.d, "universe": args.universe}
        rep.results = {"d": lc.d, "m": lc.m, "n_P": lc.n_P, "n_U": lc.n_U,
                       "p_range": lc.p_range, "u_range": lc.u_range}
        rep.results["configuration"] = configuration_to_json(lc.configuration(universe=args.universe))
    else:
        _need(args, "a", "b")
        gp = GridFamilyParams(args.a, args.b)
        fp = grid_family(gp, **({"cap": args.cap} if args.cap else {}))
        rep.inputs = {"a": args.a, "b": args.b}
        rep.results = {"a": gp.a, "b": gp.b, "ground_size": gp.d, "sets": len(fp.family_A),
                       "family": family_to_json(fp)}
    return rep


def cmd_stats(args) -> RunReport:
    obj = _read_payload(args)
    k = _kind(obj)
    rep = RunReport(command="stats", inputs={"kind": k.replace("-raw", "")})
    if k.startswith("family"):
        fp = _load_family(obj)
        eps = cross_disjoint_epsilon(fp)
        rep.results = {
            "sets_A": len(fp.family_A), "sets_B": len(fp.family_B), "ground_size": fp.ground_size,
            "delta": _exact(1 - eps),
            "intersect_probability": _exact(eps),
        }
    elif k.startswith("configuration"):
        c = _load_configuration(obj)
        st = incidence_stats(c)
        rep.results = {"dim": c.dim, "n": c.n, "m": c.m, "incidences": st.incidences, "density": _exact(st.density)}
    else:
        m = _load_matrix(obj)
        rep.results = {"rows": m.rows, "cols": m.cols, "rank": rank(m),
                       "listability": listability(m), "arity": arity(m)}
    return rep


def cmd_rs_exact(args) -> RunReport:
    c = _load_configuration(_read_payload(args))
    bic = rs_exact(c, **({"cap": args.cap} if args.cap else {}))
    validate_biclique(c, bic)
    return RunReport(command="rs-exact", inputs={"n": c.n, "m": c.m, "dim": c.dim},
                     results={"rs": bic.edges}, witnesses={"biclique": biclique_to_json(bic)})


def cmd_rect_max(args) -> RunReport:
    m = _load_matrix(_read_payload(args))
    cap = args.cap or RECTANGLE_CAP
    if args.listable:
        rect, value = max_1listable_submatrix(m, cap=cap), None
        if rect.size and not rect.is_1listable(m):
            raise AssertionError("internal: rectangle is not 1-listable")
    else:
        rect, value = max_monochromatic_rectangle(m, cap=cap)
        if rect.size and not rect.is_monochromatic(m):
            raise AssertionError("internal: rectangle is not monochromatic")
    return RunReport(command="rect-max", inputs={"shape": list(m.shape), "listable": args.listable},
                     results={"size": rect.size, "density": _exact(Fraction(rect.size, m.rows * m.cols))},
                     witnesses={"rectangle": rectangle_to_json(rect, value)})


def cmd_biclique_sample(args) -> RunReport:
    c = _load_configuration(_read_payload(args))
    run = sampler_success_rate(c, SearchBudget(trials=args.trials, seed=args.seed))
    rep = RunReport(command="biclique-sample", seed=args.seed,
                    inputs={"n": c.n, "m": c.m, "dim": c.dim, "trials": args.trials})
    rep.results = {
        "epsilon": _exact(run.epsilon), "successes": run.successes,
        "rate": _exact(Fraction(run.successes, run.trials)), "predicted_rate": _exact(run.predicted_rate),
        "guaranteed_edges": _exact(run.guaranteed_edges), "first_success": run.first_success,
        "best_edges": run.best.edges if run.best else None,
    }
    if run.best is not None:
        validate_biclique(c, run.best)
        rep.witnesses = {"biclique": biclique_to_json(run.best)}
    return rep


def cmd_reduce(args) -> RunReport:
    m = _load_matrix(_read_payload(args))
    rect = find_1listable_recursive(m)
    if not rect.is_1listable(m):
        raise ReductionError("returned rectangle is not 1-listable")
    return RunReport(command="reduce", inputs={"shape": list(m.shape)},
                     results={"listability": listability(m), "rank": rank(m), "size": rect.size},
                     witnesses={"rectangle": rectangle_to_json(rect)})


def cmd_protocol(args) -> RunReport:
    m = _load_matrix(_read_payload(args))
    tree = build_protocol(m)
    tree.validate(m)
    rep = RunReport(command="protocol", inputs={"shape": list(m.shape)},
                    results={"depth": tree.depth, "leaves": len(tree.leaves()), "rank": rank(m),
                             "log_rank_lower_bound": log_rank_lower_bound(m)},
                    witnesses={"protocol": tree.to_json()})
    if args.dot:
        rep.witnesses["dot"] = tree.to_dot()
    return rep


def cmd_verify(args) -> RunReport:
    rep = RunReport(command=f"verify {args.what}", seed=args.seed)
    if args.what == "lattice":
        _need(args, "d")
        lc = LatticeConstruction(args.d)
        r = verify_lattice_claims(lc, samples=args.trials, seed=args.seed)
        rep.inputs = {"d": args.d, "samples": args.trials}
        rep.results = {
            "m": r.m, "n_P": r.n_P, "n_U": r.n_U,
            "incidences_U": r.incidences_U, "expected_U": r.expected_U, "method": r.method_U,
            "incidences_P": r.incidences_P, "dense_ratio": _exact(r.dense_ratio),
            "flats_sampled": r.flats_sampled, "rs": r.rs_U, "rs_bound": r.rs_bound,
            "p_within_u": r.p_within_u if r.containment_claimed else "not claimed for d < 5",
            "claims": r.claims,
        }
        rep.witnesses = {"counterexamples": (r.point_bound_violations + r.hyper_bound_violations
                                             + r.hypercube_mismatches)[:10]}
        ok = r.passed
    elif args.what == "grid":
        _need(args, "a", "b")
        gp = GridFamilyParams(args.a, args.b)
        fp = grid_family(gp, **({"cap": args.cap} if args.cap else {}))
        eps = cross_disjoint_epsilon(fp)
        zero = max_zero_rectangle_density(fp)
        expected_zero = Fraction(1, 4**gp.b) if gp.a % 2 == 0 else None
        ok = 1 - eps == grid_disjoint_closed_form(gp) and (expected_zero is None or zero == expected_zero)
        rep.inputs = {"a": args.a, "b": args.b}
        rep.results = {"delta": _exact(1 - eps), "closed_form": _exact(grid_disjoint_closed_form(gp)),
                       "intersect_probability": _exact(eps), "zero_rectangle_density": _exact(zero),
                       "expected_zero_density": _exact(expected_zero) if expected_zero is not None else None}
    else:
        _need(args, "d")
        fr = frankl_rodl_check(args.d, **({"cap": args.cap} if args.cap else {}))
        ok = fr.within_bound
        rep.inputs = {"d": args.d}
        rep.results = {"max_product": fr.max_product, "bound": fr.bound, "attains_bound": fr.attains_bound,
                       "per_t": fr.per_t, "families_examined": fr.families_examined}
        rep.witnesses = {"maximizers": [{"R": [sorted(x) for x in r], "S": [sorted(x) for x in s], "t": t}
                                        for r, s, t in fr.maximizers]}
    if not ok:
        raise VerificationFailed(rep)
    return rep


def cmd_reproduce(args) -> RunReport:
    results = acceptance.run_criteria(args.scope, max_d=args.max_d, seed=args.seed)
    rep = RunReport(command=f"reproduce {args.scope}", seed=args.seed,
                    inputs={"scope": args.scope, "max_d": args.max_d})
    rep.results = {
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "note": r.note,
                      "rows": r.rows} for r in results],
    }
    for r in results:
        print(r.line(), file=sys.stderr)
    if not rep.results["passed"]:
        raise VerificationFailed(rep)
    return rep


# ----------------------------------------------------------------- output


def _flat_rows(rep: RunReport) -> list[dict]:
    res = rep.results
    if "criteria" in res:
        rows = []
        for c in res["criteria"]:
            for r in c["rows"] or [{}]:
                rows.append({"criterion": c["number"], "passed": c["passed"], **r})
        return rows
    return [{"key": k, "value": v["exact"] if isinstance(v, dict) and "exact" in v else v}
            for k, v in res.items() if not isinstance(v, (dict, list)) or (isinstance(v, dict) and "exact" in v)]


def render(rep: RunReport, fmt: str) -> str:
    if fmt == "json":
        return rep.dumps()
    rows = [jsonable(r) for r in _flat_rows(rep)]
    keys: list[str] = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    cell = lambda v: "" if v is None else (json.dumps(v) if isinstance(v, (list, dict)) else str(v))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: cell(r.get(k)) for k in keys})
        return buf.getvalue().rstrip("\n")
    table = [keys] + [[cell(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(keys))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ----------------------------------------------------------------- parser


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int)
    common.add_argument("--a", type=int)
    common.add_argument("--b", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--cap", type=int, help="enumeration cap")
    common.add_argument("--input", help="payload file (default: standard input)")

    p = argparse.ArgumentParser(prog="logrank-incidence", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", parents=[common], help="generate a lattice configuration or grid family")
    g.add_argument("what", choices=("lattice", "grid"))
    g.add_argument("--universe", action="store_true", help="lattice: emit U instead of P")
    sub.add_parser("stats", parents=[common], help="incidence / family / matrix statistics")
    sub.add_parser("rs-exact", parents=[common], help="largest biclique, exactly")
    r = sub.add_parser("rect-max", parents=[common], help="largest monochromatic rectangle")
    r.add_argument("--listable", action="store_true", help="largest 1-listable submatrix instead")
    sub.add_parser("biclique-sample", parents=[common], help="randomized biclique sampler")
    sub.add_parser("reduce", parents=[common], help="recursive 1-listable rectangle search")
    pr = sub.add_parser("protocol", parents=[common], help="build and check a protocol tree")
    pr.add_argument("--dot", action="store_true", help="include a Graphviz rendering")
    v = sub.add_parser("verify", parents=[common], help="verify construction claims")
    v.add_argument("what", choices=("lattice", "grid", "frankl-rodl"))
    rp = sub.add_parser("reproduce", parents=[common], help="run acceptance checks")
    rp.add_argument("scope", choices=tuple(acceptance.SCOPES))
    rp.add_argument("--max-d", type=int, default=None)
    return p


COMMANDS = {
    "gen": cmd_gen, "stats": cmd_stats, "rs-exact": cmd_rs_exact, "rect-max": cmd_rect_max,
    "biclique-sample": cmd_biclique_sample, "reduce": cmd_reduce, "protocol": cmd_protocol,
    "verify": cmd_verify, "reproduce": cmd_reproduce,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        rep = COMMANDS[args.command](args)
        code = EXIT_OK
    except VerificationFailed as e:
        rep, code = e.report, EXIT_FAIL
    except (ReductionError, AssertionError) as e:
        rep, code = RunReport(command=args.command, results={"error": str(e)}), EXIT_FAIL
    except (UsageError, PayloadError, ConstructionCapExceeded, SearchCapExceeded, IndexSpaceExceeded,
            HypercubeCapExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    rep.wall_time = round(time.perf_counter() - t0, 6)
    print(render(rep, args.format), file=out)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
