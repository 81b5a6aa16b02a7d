"""Command-line entry point: ``t3co parse|explain|validate|solve|catalog``.

Exit codes: 0 success or feasible, 1 a negative answer (syntax error,
infeasible solution, violated ratio, unknown catalog id, unhoused symbol),
2 usage, IO, binding or unverified-property errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog
from .errors import (BindingError, CatalogError, InstanceFormatError, T3coError, T3coSyntaxError,
                     UnsupportedSemanticsError, UnverifiedPropertyError)
from .grammar import parse, render
from .instance import bind, format_number, load_native, load_tsplib
from .semantics import check_wellformed, explain, resolve
from .solvers import SolveLimits, brute_force, christofides, double_tree, nearest_neighbor, ratio_check
from .validator import Solution, format_solution, parse_solution, validate

OK, NEGATIVE, USAGE = 0, 1, 2
HEURISTICS = {"nn": nearest_neighbor, "double-tree": double_tree, "christofides": christofides}
GUARANTEES = {"double-tree": Fraction(2), "christofides": Fraction(3, 2)}


class _Usage(Exception):
    pass


def _err(msg: str) -> None:
    print(f"t3co: {msg}", file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror or exc}") from exc


def _ast_json(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for f in dataclasses.fields(obj):
            if f.name != "span":
                out[f.name] = _ast_json(getattr(obj, f.name))
        return out
    if isinstance(obj, (tuple, list)):
        return [_ast_json(x) for x in obj]
    if isinstance(obj, Fraction):
        return format_number(obj)
    return obj


def _variant(path: str):
    ast = parse(_read(path))
    return ast, resolve(ast)


def _instance(path: str, variant):
    text = _read(path)
    inst = load_tsplib(text) if path.endswith(".tsp") else load_native(text)
    return bind(inst, variant)


def _solution_json(sol: Solution | None):
    if sol is None:
        return None
    return {
        "walk": str(sol.walk),
        "shares": [{"product": i, "node": v, "amount": format_number(a)} for (i, v), a in sorted(sol.shares.items())],
    }


# ----------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    ast = parse(_read(args.file), args.notation)
    if args.emit == "ast":
        print(json.dumps(_ast_json(ast), ensure_ascii=False, indent=2))
    else:
        print(render(ast, "longhand" if args.emit == "long" else "shorthand"))
    return OK


def cmd_explain(args) -> int:
    ast, rv = _variant(args.file)
    print(explain(rv))
    code = OK
    for d in check_wellformed(rv, ast):
        _err(str(d))
        if d.severity == "error":
            code = NEGATIVE
    return code


def cmd_validate(args) -> int:
    _, rv = _variant(args.variant)
    inst = _instance(args.instance, rv)
    sol = parse_solution(_read(args.solution), inst.graph)
    report = validate(rv, inst, sol)
    if args.json:
        print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    else:
        print("feasible" if report.feasible else "infeasible")
        for c in report.checks:
            mark = "ok  " if c.passed else "FAIL"
            print(f"  {mark} {c.id}" + (f"  {c.witness}" if c.witness else ""))
        for label, value in report.objectives:
            print(f"  {label} = {format_number(value)}")
        if report.extensions_unchecked:
            print("  extension annotations were not checked")
    return OK if report.feasible else NEGATIVE


def cmd_solve(args) -> int:
    _, rv = _variant(args.variant)
    inst = _instance(args.instance, rv)
    limits = SolveLimits(max_nodes=args.max_nodes, max_walk_edges=args.max_walk_edges, time_budget=args.time_budget)
    if args.method == "brute":
        if args.check_ratio:
            raise _Usage("--check-ratio applies to the heuristic methods")
        res = brute_force(rv, inst, limits, workers=args.workers)
        out = {"method": "brute", "status": res.status, "strategy": res.strategy, "explored": res.explored,
               "value": None if res.value is None else format_number(res.value), "solution": _solution_json(res.best),
               "feasible": None, "ratio": None}
        code = {"optimal": OK, "infeasible": NEGATIVE}.get(res.status, USAGE)
    else:
        costs = [c.name for c in rv.costs if c.domain == "E"]
        if not costs:
            raise _Usage("the variant has no edge cost function")
        sol, value = HEURISTICS[args.method](inst, cost=costs[0])
        report = validate(rv, inst, sol, evaluate=False)
        ratio = None
        if args.check_ratio:
            if args.method not in GUARANTEES:
                raise _Usage(f"{args.method} has no constant guarantee to check")
            ok = ratio_check(rv, inst, sol, GUARANTEES[args.method], limits)
            ratio = "inconclusive" if ok is None else ("holds" if ok else "violated")
        out = {"method": args.method, "status": "heuristic", "strategy": args.method, "explored": None,
               "value": format_number(value), "solution": _solution_json(sol), "feasible": report.feasible,
               "ratio": ratio}
        code = NEGATIVE if ratio == "violated" or not report.feasible else OK
    if args.json:
        print(json.dumps(out, ensure_ascii=False, indent=2))
    else:
        print(f"status: {out['status']}")
        if out["value"] is not None:
            print(f"value: {out['value']}")
        if out["solution"] is not None:
            sol = res.best if args.method == "brute" else sol
            print(format_solution(sol), end="")
        if out["ratio"] is not None:
            print(f"ratio: {out['ratio']}")
    return code


def _entry_json(e):
    return {
        "id": e.id, "family": e.family, "notation": e.notation, "definition": e.definition_text,
        "bounds": [{"kind": b.kind, "expr": b.expr, "citation": b.citation, "status": b.status} for b in e.bounds],
        "references": [{"citation": r.citation, "status": r.status} for r in e.references],
        "extensions": [{"tag": t, "text": x} for t, x in e.extensions],
        "notes": list(e.notes),
    }


def cmd_catalog(args) -> int:
    if args.action == "list":
        entries = catalog.list_entries(args.family)
        if args.json:
            print(json.dumps([_entry_json(e) for e in entries], ensure_ascii=False, indent=2))
        else:
            for e in entries:
                print(f"{e.id:45} {e.family}")
        return OK
    if args.action == "show":
        if not args.id:
            raise _Usage("catalog show needs an id")
        try:
            e = catalog.get(args.id)
        except CatalogError as exc:
            _err(str(exc))
            return NEGATIVE
        if args.json:
            print(json.dumps(_entry_json(e), ensure_ascii=False, indent=2))
            return OK
        print(e.definition_text)
        print(f"family: {e.family}")
        for b in e.bounds:
            print(f"{b.kind} bound: {b.expr}  [{b.citation}, {b.status}]")
        for r in e.references:
            print(f"reference: {r.citation} ({r.status})")
        for n in e.notes:
            print(f"note: {n}")
        return OK
    diags = catalog.verify_corpus()
    for d in diags:
        _err(str(d))
    print(f"{len(catalog.list_entries())} entries, {len(diags)} problems")
    return OK if not diags else NEGATIVE


# ------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="t3co", description="Parse, check, validate and solve TSP variant definitions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", help="parse a definition and render it")
    s.add_argument("file")
    s.add_argument("--notation", choices=["auto", "longhand", "shorthand"], default="auto",
                   help="notation of the input (default: detect)")
    s.add_argument("--emit", choices=["long", "short", "ast"], default="short")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("explain", help="list every resolved attribute")
    s.add_argument("file")
    s.set_defaults(func=cmd_explain)

    s = sub.add_parser("validate", help="check a solution against a variant and instance")
    s.add_argument("--variant", required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--solution", required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="exact enumeration or a classical heuristic")
    s.add_argument("--variant", required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--method", choices=["brute", "nn", "double-tree", "christofides"], default="brute")
    s.add_argument("--max-nodes", type=int, default=SolveLimits.max_nodes)
    s.add_argument("--max-walk-edges", type=int, default=None)
    s.add_argument("--time-budget", type=float, default=None, help="seconds")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--check-ratio", action="store_true", help="compare a heuristic with the exact optimum")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("catalog", help="browse and verify the variant corpus")
    s.add_argument("action", choices=["list", "show", "verify"])
    s.add_argument("id", nargs="?")
    s.add_argument("--family")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Usage as exc:
        _err(str(exc))
        return USAGE
    except T3coSyntaxError as exc:
        _err(f"syntax error: {exc}")
        return NEGATIVE
    except (BindingError, InstanceFormatError, UnverifiedPropertyError, UnsupportedSemanticsError,
            CatalogError) as exc:
        _err(str(exc))
        return USAGE
    except T3coError as exc:
        # resolution and objective errors belong to the definition, not the invocation
        _err(str(exc))
        return NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
