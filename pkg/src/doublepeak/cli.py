"""Command-line front end.

Exit codes: 0 success / no violation found, 1 violation found (``verify-*``),
2 usage or input error, 3 coalition search budget exceeded.

Instance files look like::

    # comment
    params 1 1          # b c   (or: params b_left b_right c)
    agents 0 3.1
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .core import (
    CostParams,
    Instance,
    Objective,
    as_rational,
    format_rational,
    normalize,
    objective_value,
)
from .errors import DoublePeakError, EmptyInstance, ParseError, SearchBudgetExceeded
from .experiments import FAMILIES, ratio, ratio_rows_to_csv, sweep
from .mechanisms import MECHANISM_NAMES, get_mechanism
from .optimal import optimal
from .verification import (
    CSV_COLUMNS,
    DEFAULT_COALITION_BUDGET,
    ViolationReport,
    check_anonymity,
    check_position_invariance,
    find_gsp_violation,
    search_sp,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

DEFAULT_SHIFTS = ("1", "-7/3", "10")


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------


def _parse_number(token: str, line: int, column: int) -> Fraction:
    try:
        return as_rational(token)
    except ValueError:
        raise ParseError(f"not a rational number: {token!r}", line, column) from None


def _tokens(text: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based start columns."""
    out = []
    col = 0
    for piece in text.split(" "):
        for sub in piece.split("\t"):
            if sub:
                out.append((sub, col + 1))
            col += len(sub) + 1
    return out


def parse_instance(text: str) -> Instance:
    params_line: tuple[int, list[tuple[str, int]]] | None = None
    agents_line: tuple[int, list[tuple[str, int]]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = _tokens(body.rstrip())
        if not tokens:
            continue
        keyword, col = tokens[0]
        if keyword == "params":
            if params_line is not None:
                raise ParseError("duplicate params line", lineno, col)
            params_line = (lineno, tokens[1:])
        elif keyword == "agents":
            if agents_line is not None:
                raise ParseError("duplicate agents line", lineno, col)
            agents_line = (lineno, tokens[1:])
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno, col)
    if params_line is None:
        raise ParseError("missing params line", 1, 1)
    if agents_line is None:
        raise ParseError("missing agents line", 1, 1)

    lineno, tokens = params_line
    values = [_parse_number(tok, lineno, col) for tok, col in tokens]
    if len(values) == 2:
        params = CostParams.symmetric(*values)
    elif len(values) == 3:
        params = CostParams(*values)
    else:
        raise ParseError(f"params takes 2 or 3 numbers, got {len(values)}", lineno, 1)

    lineno, tokens = agents_line
    if not tokens:
        raise EmptyInstance(f"line {lineno}: no agents")
    return normalize([_parse_number(tok, lineno, col) for tok, col in tokens], params)


def format_instance(instance: Instance, comment: str = "") -> str:
    p = instance.params
    head = [f"# {comment}"] if comment else []
    if p.is_symmetric:
        params = f"params {format_rational(p.b_left)} {format_rational(p.c)}"
    else:
        params = f"params {format_rational(p.b_left)} {format_rational(p.b_right)} {format_rational(p.c)}"
    agents = "agents " + " ".join(format_rational(x) for x in instance.raw_locations())
    return "\n".join(head + [params, agents]) + "\n"


def load_instance(path: str) -> Instance:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_instance(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _violation_csv(reports: Sequence[ViolationReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(report.csv_row())
    return buf.getvalue()


def cmd_eval(args) -> int:
    instance = load_instance(args.file)
    y = as_rational(args.at)
    value = objective_value(instance, y, Objective.parse(args.objective))
    print(f"y={format_rational(y)} value={format_rational(value, args.decimal)}")
    return EXIT_OK


def cmd_opt(args) -> int:
    instance = load_instance(args.file)
    result = optimal(instance, Objective.parse(args.objective))
    line = f"y={format_rational(result.location, args.decimal)} value={format_rational(result.value, args.decimal)}"
    if not result.attained:
        line += f" infimum={format_rational(result.infimum, args.decimal)} (not attained)"
    print(line)
    return EXIT_OK


def cmd_mech(args) -> int:
    instance = load_instance(args.file)
    lottery = get_mechanism(args.mech)(instance)
    for point, prob in lottery.atoms:
        print(f"{format_rational(point, args.decimal)} {format_rational(prob)}")
    return EXIT_OK


def cmd_ratio(args) -> int:
    instance = load_instance(args.file)
    report = ratio(get_mechanism(args.mech), instance, Objective.parse(args.objective))
    print(format_rational(report.ratio, args.decimal))
    if args.verbose:
        print(f"mech_value={format_rational(report.mech_value, args.decimal)}")
        print(f"opt_value={format_rational(report.opt_value, args.decimal)}")
    if args.csv:
        _write(args.csv, ratio_rows_to_csv([report]))
    return EXIT_OK


def cmd_verify_sp(args) -> int:
    instance = load_instance(args.file)
    result = search_sp(get_mechanism(args.mech), instance)
    print(result.describe(args.decimal))
    if args.csv:
        _write(args.csv, _violation_csv([result.violation] if result.found else []))
    return EXIT_VIOLATION if result.found else EXIT_OK


def cmd_verify_gsp(args) -> int:
    instance = load_instance(args.file)
    report = find_gsp_violation(get_mechanism(args.mech), instance, args.max_coalition, budget=args.budget)
    if report is None:
        print(f"no coalition violation within candidate set (coalitions up to size {args.max_coalition}); "
              "this is not a proof")
    else:
        print(report.describe(args.decimal))
    if args.csv:
        _write(args.csv, _violation_csv([report] if report else []))
    return EXIT_OK if report is None else EXIT_VIOLATION


def cmd_verify_axioms(args) -> int:
    instance = load_instance(args.file)
    mech = get_mechanism(args.mech)
    shifts = args.shifts.split(",") if args.shifts else list(DEFAULT_SHIFTS)
    found = []
    anon = check_anonymity(mech, instance.raw_locations(), instance.params)
    print("anonymity: " + ("VIOLATED" if anon else "ok"))
    if anon:
        print(anon.describe(args.decimal))
        found.append(anon)
    shift = check_position_invariance(mech, instance, shifts)
    print("position invariance: " + ("VIOLATED" if shift else "ok"))
    if shift:
        print(shift.describe(args.decimal))
        found.append(shift)
    if args.csv:
        _write(args.csv, _violation_csv(found))
    return EXIT_VIOLATION if found else EXIT_OK


_GEN_ARGS = ("n", "eps", "d", "spread")


def cmd_gen(args) -> int:
    family = FAMILIES[args.family]
    if args.b_left is not None or args.b_right is not None:
        params = CostParams(args.b_left or args.b, args.b_right or args.b, args.c)
    else:
        params = CostParams.symmetric(args.b, args.c)
    kwargs = {k: getattr(args, k) for k in _GEN_ARGS if getattr(args, k) is not None}
    instance = family(params, **kwargs)
    detail = " ".join(f"{k}={v}" for k, v in kwargs.items())
    _write(args.output, format_instance(instance, f"family {args.family} {detail}".rstrip()))
    return EXIT_OK


def cmd_sweep(args) -> int:
    reports = sweep(get_mechanism(args.mech), Objective.parse(args.objective), args.family, args.grid)
    _write(args.csv, ratio_rows_to_csv(reports))
    if args.csv not in (None, "-"):
        for r in reports:
            print(f"{r.params}: {format_rational(r.ratio, args.decimal)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--decimal", type=int, metavar="DIGITS",
                        help="render numbers as rounded decimals (marked with ~)")

    parser = argparse.ArgumentParser(
        prog="doublepeak",
        description="Exact facility location on a line with double-peaked preferences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    mech_help = "mechanism: " + ", ".join(MECHANISM_NAMES)

    p = sub.add_parser("eval", parents=[common], help="objective value at a point")
    p.add_argument("file")
    p.add_argument("--at", required=True)
    p.add_argument("--objective", choices=["sc", "mc"], default="sc")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("opt", parents=[common], help="optimal facility location")
    p.add_argument("file")
    p.add_argument("--objective", choices=["sc", "mc"], default="sc")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("mech", parents=[common], help="run a mechanism; prints 'point probability' lines")
    p.add_argument("file")
    p.add_argument("--mech", required=True, help=mech_help)
    p.set_defaults(func=cmd_mech)

    p = sub.add_parser("ratio", parents=[common], help="mechanism value over optimal value")
    p.add_argument("file")
    p.add_argument("--mech", required=True, help=mech_help)
    p.add_argument("--objective", choices=["sc", "mc"], default="sc")
    p.add_argument("--csv")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("verify-sp", parents=[common], help="search unilateral misreports")
    p.add_argument("file")
    p.add_argument("--mech", required=True, help=mech_help)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_verify_sp)

    p = sub.add_parser("verify-gsp", parents=[common], help="search coalition misreports")
    p.add_argument("file")
    p.add_argument("--mech", required=True, help=mech_help)
    p.add_argument("--max-coalition", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_COALITION_BUDGET)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_verify_gsp)

    p = sub.add_parser("verify-axioms", parents=[common], help="anonymity and position invariance")
    p.add_argument("file")
    p.add_argument("--mech", required=True, help=mech_help)
    p.add_argument("--shifts", help="comma-separated shifts (default: 1,-7/3,10)")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_verify_axioms)

    p = sub.add_parser("gen", parents=[common], help="write an instance from a named family")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--n", type=int)
    p.add_argument("--eps")
    p.add_argument("--d")
    p.add_argument("--spread")
    p.add_argument("--b", default="1")
    p.add_argument("--b-left")
    p.add_argument("--b-right")
    p.add_argument("--c", default="1")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sweep", parents=[common], help="ratios along an instance family, as CSV")
    p.add_argument("--mech", required=True, help=mech_help)
    p.add_argument("--objective", choices=["sc", "mc"], required=True)
    p.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p.add_argument("--grid", required=True, help='e.g. "n=4,10,100;b=1;c=1"')
    p.add_argument("--csv", default="-")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except SearchBudgetExceeded as exc:
        print(f"search budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DoublePeakError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
