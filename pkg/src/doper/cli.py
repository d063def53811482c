"""Command-line front end.

Exit codes: 0 success, 1 a verified assertion came out false, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .arith import default_precision
from .fusion import is_prime

EXIT_OK, EXIT_FALSE, EXIT_BAD_INPUT = 0, 1, 2


class BadInput(ValueError):
    pass


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def _check_prime_arg(p: int) -> None:
    if p is None:
        raise BadInput("--prime is required")
    if p < 5 or not is_prime(p):
        raise BadInput(f"--prime must be a prime >= 5, got {p}")


def _parse_radii(text: str | None, marks: int, p: int) -> tuple[int, ...]:
    if not text:
        radii: tuple[int, ...] = ()
    else:
        try:
            radii = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise BadInput(f"--radii must be comma-separated integers, got {text!r}") from None
    if len(radii) != marks:
        raise BadInput(f"--radii has {len(radii)} entries but --marks is {marks}")
    top = (p - 3) // 2
    for n in radii:
        if not 0 <= n <= top:
            raise BadInput(f"radius {n} is outside 0..{top}")
    return radii


def _check_stable(g: int, r: int) -> None:
    if g < 0 or r < 0 or 2 * g - 2 + r <= 0:
        raise BadInput(f"need 2*genus - 2 + marks > 0, got genus={g}, marks={r}")


def _rows_text(header: list[str], rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(header, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands

def cmd_count(args) -> int:
    from .fusion import build_pgl2_dopers
    from .tqft import DegreeResult, contract, degree_exact, degree_float, degree_via_s_matrix, pants_decomposition

    _check_prime_arg(args.prime)
    _check_stable(args.genus, args.marks)
    radii = _parse_radii(args.radii, args.marks, args.prime)
    p, g, r = args.prime, args.genus, args.marks
    results = [DegreeResult(p, g, r, radii, degree_exact(p, g, r, radii), "trace")]
    if args.all_methods:
        A = build_pgl2_dopers(p)
        results.append(DegreeResult(p, g, r, radii, contract(A, pants_decomposition(g, r, radii), args.threads), "graph"))
        results.append(degree_float(p, g, r, radii, args.precision_bits))
        results.append(degree_via_s_matrix(p, g, r, radii, args.precision_bits))
    if args.format == "json":
        payload = results[0].to_json() if len(results) == 1 else [x.to_json() for x in results]
        text = _dump(payload)
    else:
        rows = [[x.p, x.g, x.r, " ".join(map(str, x.radii)), str(x.value), x.method] for x in results]
        text = _rows_text(["p", "g", "r", "radii", "value", "method"], rows, args.format)
    _emit(text, args.out)
    if len({x.value for x in results}) != 1:
        return EXIT_FALSE
    return EXIT_OK


def cmd_census(args) -> int:
    from .fpcount import census_report

    _check_prime_arg(args.prime)
    if args.prime > args.prime_cap:
        raise BadInput(f"--prime {args.prime} exceeds the cap {args.prime_cap} (raise it with --prime-cap)")
    rep = census_report(args.prime, args.threads)
    if args.format == "json":
        text = _dump(rep)
    else:
        rows = [[k, v] for k, v in rep["census"].items()]
        head = (f"p={rep['p']} criterion_count={rep['criterion_count']} expected={rep['expected']} "
                f"classes={rep['classes']} expected_classes={rep['expected_classes']}\n")
        text = head + _rows_text(["radii", "classes"], rows, args.format)
    _emit(text, args.out)
    ok = (rep["criterion_count"] == rep["expected"] and rep["classes"] == rep["expected_classes"]
          and rep["census_matches_fusion"])
    return EXIT_OK if ok else EXIT_FALSE


VIRASORO_NS = (-1, 0, 1, 2)
BRACKETS = ((0, -1), (1, -1), (2, -1), (1, 0), (2, 0))


def _suite_factorization(args) -> dict:
    from .tqft import factorization_suite

    reps = factorization_suite(args.prime, args.genus_max, args.marks_max)
    bad = [r for r in reps if not r["ok"]]
    return {"suite": "factorization", "checks": len(reps), "failures": bad, "ok": not bad}


def _suite_graphs(args) -> dict:
    from .tqft import graph_independence

    reps = graph_independence(args.prime)
    bad = [r for r in reps if not r["ok"]]
    return {"suite": "graphs", "checks": len(reps), "failures": bad, "ok": not bad}


def _suite_virasoro(args) -> dict:
    from .fusion import build_pgl2_dopers
    from .witten import bracket_check, build_partition, verify_virasoro

    A = build_pgl2_dopers(args.prime)
    Z = build_partition(A, args.genus_max, args.insertion_max)
    constraints = [verify_virasoro(n, A, args.genus_max, args.insertion_max, Z=Z) for n in VIRASORO_NS]
    brackets = [bracket_check(n, m, A, args.genus_max, args.insertion_max, Z=Z) for n, m in BRACKETS]
    ok = all(c["ok"] for c in constraints) and all(b["ok"] for b in brackets)
    return {"suite": "virasoro", "constraints": constraints, "brackets": brackets, "ok": ok}


def _suite_wzw(args) -> dict:
    from .witten import wzw_comparison

    rep = wzw_comparison(args.prime, args.genus_max, args.insertion_max)
    return {"suite": "wzw", **rep}


SUITES = {
    "factorization": _suite_factorization,
    "graphs": _suite_graphs,
    "virasoro": _suite_virasoro,
    "wzw": _suite_wzw,
}


def cmd_verify(args) -> int:
    _check_prime_arg(args.prime)
    if args.genus_max < 0 or args.insertion_max < 0:
        raise BadInput("bounds must be nonnegative")
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [SUITES[name](args) for name in names]
    ok = all(r["ok"] for r in reports)
    _emit(_dump({"prime": args.prime, "ok": ok, "reports": reports}), args.out)
    return EXIT_OK if ok else EXIT_FALSE


def cmd_table(args) -> int:
    from .tqft import degree_table

    _check_prime_arg(args.prime)
    _check_stable(args.genus, args.marks)
    rows = degree_table(args.prime, args.genus, args.marks, args.threads)
    if args.format == "json":
        text = _dump([{"p": args.prime, "g": args.genus, "r": args.marks, "radii": list(rad),
                       "value": v, "method": "trace"} for rad, v in rows])
    else:
        text = _rows_text(["radii", "value"], [[" ".join(map(str, rad)) or "-", str(v)] for rad, v in rows],
                          args.format)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int)
    common.add_argument("--precision-bits", type=int, default=None,
                        help="mantissa bits for float cross-checks (default $DOPER_PRECISION_BITS or 256)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="doper", description="Degrees of dormant PGL2-oper moduli.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="degree for one (p, g, r, radii)")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--marks", type=int, default=0)
    p.add_argument("--radii", default="")
    p.add_argument("--all-methods", action="store_true", help="also run graph, float and S-matrix paths")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("census", parents=[common], help="finite-field count and radius census")
    p.add_argument("--prime-cap", type=int, default=101)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=("factorization", "virasoro", "graphs", "wzw", "all"))
    p.add_argument("--genus-max", type=int, default=2)
    p.add_argument("--insertion-max", type=int, default=4)
    p.add_argument("--marks-max", type=int, default=3)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", parents=[common], help="degrees for every radii tuple")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--marks", type=int, default=0)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision_bits is None:
        args.precision_bits = default_precision()
    if args.threads < 1:
        print("doper: --threads must be >= 1", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        return args.func(args)
    except BadInput as exc:
        print(f"doper: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
