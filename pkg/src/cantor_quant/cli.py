"""Command-line interface.

    cantor-quant moments
    cantor-quant vn --range 9..13 --format csv
    cantor-quant sets --n 10 --enumerate-limit 10
    cantor-quant count --range 5..82
    cantor-quant evaluate codebook.json --gap 1e-12
    cantor-quant genealogy --from 9 --to 12 --format dot
    cantor-quant oracle --n 3 --depth 12

Exit codes: 0 success, 2 input error, 3 oracle violation, 4 resource limit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import engine, oracle
from .distortion import BudgetExceeded, Codebook, evaluate_codebook
from .serialize import codebook_from_json, load_codebook, loads_exact, parse_rational, rational_str, rational_to_json
from .word_measure import moments, second_moment

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_LIMIT = 0, 2, 3, 4


class InputError(ValueError):
    pass


def parse_range(text: str) -> range:
    """``"9..13"`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise InputError(f"malformed range {text!r}; expected A..B") from None
    if lo < 1 or hi < lo:
        raise InputError(f"range {text!r} must satisfy 1 <= A <= B")
    return range(lo, hi + 1)


def _ns(args) -> range:
    if getattr(args, "n", None) is not None and getattr(args, "range", None) is not None:
        raise InputError("give either --n or --range, not both")
    if getattr(args, "range", None) is not None:
        return parse_range(args.range)
    if getattr(args, "n", None) is None:
        raise InputError("one of --n or --range is required")
    if args.n < 1:
        raise InputError("--n must be >= 1")
    return range(args.n, args.n + 1)


def _word(w: str) -> str:
    return w if w else "∅"


# -- rendering ----------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return rational_to_json(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _cell(v: Any) -> str:
    return rational_str(v) if isinstance(v, Fraction) else str(v)


def envelope(command: str, parameters: dict, results: Any, exact: bool = True) -> str:
    out = {
        "command": command,
        "parameters": parameters,
        "exact": exact,
        "results": _jsonable(results),
    }
    return json.dumps(out, indent=2, ensure_ascii=False) + "\n"


def rows_to_csv(header: Sequence[str], rows: Sequence[dict]) -> str:
    """Rationals become ``num/den`` plus an ``<name>_approx`` double column."""
    cols: list[str] = []
    for h in header:
        cols.append(h)
        if rows and isinstance(rows[0].get(h), Fraction):
            cols.append(f"{h}_approx")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        line = []
        for h in header:
            v = row[h]
            line.append(_cell(v))
            if isinstance(v, Fraction):
                line.append(repr(float(v)))
        writer.writerow(line)
    return buf.getvalue()


def rows_to_text(header: Sequence[str], rows: Sequence[dict]) -> str:
    lines = []
    for row in rows:
        parts = []
        for h in header:
            v = row[h]
            parts.append(f"{h}={_cell(v)}" + (f" (~{float(v):.9g})" if isinstance(v, Fraction) else ""))
        lines.append("  ".join(parts))
    return "\n".join(lines) + "\n"


def _tabular(args, command: str, params: dict, header: list[str], rows: list[dict], exact=True) -> str:
    if args.format == "json":
        return envelope(command, params, rows, exact)
    if args.format == "csv":
        return rows_to_csv(header, rows)
    return rows_to_text(header, rows)


# -- commands -----------------------------------------------------------------


def cmd_moments(args) -> tuple[str, int]:
    mean, var = moments()
    row = {"mean": mean, "variance": var, "second_moment": second_moment()}
    if args.format == "json":
        return envelope("moments", {}, row), EXIT_OK
    return _tabular(args, "moments", {}, list(row), [row]), EXIT_OK


def cmd_vn(args) -> tuple[str, int]:
    ns = _ns(args)
    table = engine.error_table(ns[-1])
    rows = [{"n": n, "error": table[n - 1]} for n in ns]
    params = {"n_from": ns[0], "n_to": ns[-1]}
    return _tabular(args, "vn", params, ["n", "error"], rows), EXIT_OK


def cmd_count(args) -> tuple[str, int]:
    ns = _ns(args)
    rows = [{"n": n, "count": engine.count_optimal_sets(n)} for n in ns]
    params = {"n_from": ns[0], "n_to": ns[-1]}
    return _tabular(args, "count", params, ["n", "count"], rows), EXIT_OK


def _set_payload(words: Sequence[str]) -> dict:
    book = engine.codebook_from_words(words)
    return {"words": [str(w) for w in words], "codebook": list(book.points)}


def cmd_sets(args) -> tuple[str, int]:
    if args.n is None or args.n < 1:
        raise InputError("--n >= 1 is required")
    family = engine.enumerate_optimal_sets(args.n, args.enumerate_limit)
    canonical = engine.canonical_optimal_words(args.n)
    results = {
        "n": args.n,
        "count": family.count,
        "error": family.error,
        "enumerated": family.materialized,
        "canonical": _set_payload(canonical),
        "sets": [_set_payload(s) for s in family.sets] if family.sets is not None else None,
    }
    params = {"n": args.n, "enumerate_limit": args.enumerate_limit}
    if args.format == "json":
        return envelope("sets", params, results), EXIT_OK
    listing = family.sets if family.sets is not None else [canonical]
    if args.format == "csv":
        rows = []
        for i, words in enumerate(listing, 1):
            for w, a in zip(words, engine.codebook_from_words(words).points):
                rows.append({"set": i, "word": _word(w), "point": a})
        return rows_to_csv(["set", "word", "point"], rows), EXIT_OK
    out = [
        f"n={args.n}  count={family.count}  V_n={rational_str(family.error)} (~{float(family.error):.9g})"
    ]
    if family.sets is None:
        out.append(f"count exceeds enumerate limit {args.enumerate_limit}; canonical set only")
    for i, words in enumerate(listing, 1):
        pts = engine.codebook_from_words(words).points
        out.append(f"set {i}: {{{', '.join(_word(w) for w in words)}}}")
        out.append(f"  codebook: ({', '.join(rational_str(a) for a in pts)})")
    return "\n".join(out) + "\n", EXIT_OK


def cmd_evaluate(args) -> tuple[str, int]:
    try:
        if args.codebook_file == "-":
            points = codebook_from_json(loads_exact(sys.stdin.read()))
        else:
            points = load_codebook(args.codebook_file)
        book = Codebook(sorted(points))
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    gap = parse_rational(args.gap)
    if gap <= 0:
        raise InputError("--gap must be positive")
    est = evaluate_codebook(book, gap)
    results = {
        "codebook": list(book.points),
        "lower": est.lower,
        "upper": est.upper,
        "width": est.upper - est.lower,
        "cylinders_expanded": est.cylinders_expanded,
        "exact_value": est.exact,
    }
    params = {"codebook_file": args.codebook_file, "gap": rational_to_json(gap)}
    if args.format == "json":
        return envelope("evaluate", params, results), EXIT_OK
    row = {k: results[k] for k in ("lower", "upper", "width", "cylinders_expanded", "exact_value")}
    if args.format == "csv":
        return rows_to_csv(list(row), [row]), EXIT_OK
    return rows_to_text(list(row), [row]), EXIT_OK


def _node_id(node: tuple[int, int]) -> str:
    return f"n{node[0]}_{node[1]}"


def genealogy_dot(graph: engine.GenealogyGraph) -> str:
    lines = ["digraph genealogy {", "  rankdir=LR;", "  node [shape=box];"]
    for node in graph.nodes():
        words = ",".join(_word(w) for w in graph.words(node))
        lines.append(f'  {_node_id(node)} [label="{graph.label(node)}", tooltip="{{{words}}}"];')
    for a, b in graph.edges:
        lines.append(f"  {_node_id(a)} -> {_node_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_genealogy(args) -> tuple[str, int]:
    lo, hi = args.n_from, args.n_to
    if lo is None or hi is None or not 1 <= lo < hi:
        raise InputError("need --from and --to with 1 <= from < to")
    graph = engine.genealogy(lo, hi, args.enumerate_limit)
    if args.format == "dot":
        return genealogy_dot(graph), EXIT_OK
    if args.format == "json":
        results = {
            "nodes": [
                {
                    "id": _node_id(node),
                    "label": graph.label(node),
                    "n": node[0],
                    "index": node[1],
                    "words": [str(w) for w in graph.words(node)],
                }
                for node in graph.nodes()
            ],
            "edges": [[_node_id(a), _node_id(b)] for a, b in graph.edges],
        }
        params = {"from": lo, "to": hi, "enumerate_limit": args.enumerate_limit}
        return envelope("genealogy", params, results), EXIT_OK
    rows = [{"parent": graph.label(a), "child": graph.label(b)} for a, b in graph.edges]
    if args.format == "csv":
        return rows_to_csv(["parent", "child"], rows), EXIT_OK
    return "".join(f"{r['parent']} -> {r['child']}\n" for r in rows), EXIT_OK


def cmd_oracle(args) -> tuple[str, int]:
    if args.n is None:
        raise InputError("--n is required")
    try:
        res = oracle.oracle_check(args.n, args.depth, args.mode)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    code = EXIT_OK if res.passed else EXIT_VIOLATION
    fast = res.mode == "fast"
    if fast:
        discrete: Any = {"approx": res.discrete_error}
        codebook: Any = [{"approx": c} for c in res.codebook]
    else:
        discrete, codebook = res.discrete_error, list(res.codebook)
    results = {
        "status": "PASS" if res.passed else "FAIL",
        "n": res.n,
        "depth": res.depth,
        "mode": res.mode,
        "engine_error": res.engine_error,
        "discrete_error": discrete,
        "bound": res.bound,
        "tolerance": res.tolerance,
        "codebook": codebook,
        "matched_words": [str(w) for w in res.matched_words] if res.matched_words else None,
        "inside_cylinders": res.inside_cylinders,
    }
    params = {"n": args.n, "depth": args.depth, "mode": args.mode}
    if args.format == "json":
        return envelope("oracle", params, results, exact=not fast), code
    row = {
        "status": results["status"],
        "n": res.n,
        "depth": res.depth,
        "engine_error": res.engine_error,
        "discrete_error": res.discrete_error,
        "bound": res.bound,
    }
    if args.format == "csv":
        return rows_to_csv(list(row), [row]), code
    return res.describe() + "\n", code


def cmd_recursion(args) -> tuple[str, int]:
    report = engine.verify_recursion(args.n_max)
    rows = [
        {"n": n, "error": v, "best_split": best, "argmin_j": " ".join(map(str, js))}
        for n, v, best, js in report.rows
    ]
    code = EXIT_OK if report.ok else EXIT_VIOLATION
    if args.format == "json":
        results = {"ok": report.ok, "first_violation": report.first_violation, "rows": rows}
        return envelope("recursion", {"n_max": args.n_max}, results), code
    header = ["n", "error", "best_split", "argmin_j"]
    if args.format == "csv":
        return rows_to_csv(header, rows), code
    return rows_to_text(header, rows) + ("ok\n" if report.ok else f"violation at n={report.first_violation}\n"), code


# -- parser -------------------------------------------------------------------


def _common(formats: Sequence[str] = ("text", "json", "csv")) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=list(formats), default="text")
    common.add_argument("--enumerate-limit", type=int, default=engine.DEFAULT_ENUMERATION_LIMIT)
    common.add_argument("--gap", default="1e-12", help="certified bracket width for evaluate")
    common.add_argument("--depth", type=int, default=12, help="discretization depth for oracle")
    common.add_argument("--mode", choices=["exact", "fast"], default="exact")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantor-quant",
        description="Exact optimal quantizers for the 1/4-3/4 nonhomogeneous Cantor distribution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str, formats=("text", "json", "csv")) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[_common(formats)], help=help)
        p.set_defaults(func=func)
        return p

    add("moments", cmd_moments, "mean, variance and second moment")
    for name, func, text in (
        ("vn", cmd_vn, "exact quantization errors V_n"),
        ("count", cmd_count, "number of optimal sets of n-means"),
    ):
        p = add(name, func, text)
        p.add_argument("--n", type=int)
        p.add_argument("--range", help="inclusive range A..B")
    p = add("sets", cmd_sets, "optimal sets of n-means")
    p.add_argument("--n", type=int, required=True)
    p = add("evaluate", cmd_evaluate, "certified distortion of a codebook file ('-' for stdin)")
    p.add_argument("codebook_file")

    p = add("genealogy", cmd_genealogy, "split graph between consecutive stages", ("text", "json", "csv", "dot"))
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)

    p = add("oracle", cmd_oracle, "compare V_n with an exact discrete k-means optimum")
    p.add_argument("--n", type=int, required=True)
    p = add("recursion", cmd_recursion, "check V_n = min_j V_j/64 + 3 V_(n-j)/16")
    p.add_argument("--n-max", type=int, default=20)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (engine.EnumerationLimitError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
