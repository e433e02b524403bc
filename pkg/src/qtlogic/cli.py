"""Command-line front end: ``qtl eval|decide|table|team|classify|bell``.

Reports are ``key: value`` lines followed by tab-separated tables; with
``--json`` the same report is printed as one JSON document.  Every number
is an exact rational written ``p/q``.

Exit codes
    eval       0 satisfied, 1 not satisfied, 2 input error, 3 support error
    decide     0 valid, 1 satisfiable but not valid, 2 unsatisfiable,
               3 input error, 4 resource cap exceeded
    table, team, classify, bell
               0 success, 2 input or cover error, 4 resource cap exceeded
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import contextuality, decide
from .errors import (
    AmbiguityError,
    CoverError,
    NotContradictoryError,
    ParseError,
    QtlError,
    ResourceError,
    SupportError,
    TableError,
)
from .logic import component_values, parse, parse_formula_list, satisfies, to_qtl_text
from .prop import format_symbols, symbol_name, to_text
from .team import (
    associated_table,
    format_table,
    format_team,
    parse_cover,
    parse_table,
    parse_team,
    team_from_table,
)

log = logging.getLogger("qtlogic")


class Report:
    """An ordered set of fields plus named tables, printable as text or JSON."""

    def __init__(self):
        self.fields = {}
        self.tables = {}
        self.blocks = {}

    def add(self, key, value):
        self.fields[key] = value

    def table(self, name, header, rows):
        self.tables[name] = (list(header), [list(r) for r in rows])

    def block(self, name, text):
        self.blocks[name] = text

    def text(self) -> str:
        out = [f"{k}: {_plain(v)}" for k, v in self.fields.items()]
        for name, (header, rows) in self.tables.items():
            out.append("")
            out.append(f"[{name}]")
            out.append("\t".join(header))
            out.extend("\t".join(_plain(c) for c in r) for r in rows)
        for name, body in self.blocks.items():
            out.append("")
            out.append(f"[{name}]")
            out.append(body.rstrip("\n"))
        return "\n".join(out) + "\n"

    def json(self) -> str:
        doc = {k: _plain(v) for k, v in self.fields.items()}
        for name, (header, rows) in self.tables.items():
            doc[name] = [dict(zip(header, map(_plain, r))) for r in rows]
        doc.update(self.blocks)
        return json.dumps(doc, indent=2) + "\n"


def _plain(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str):
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise ParseError(f"cannot write {path}: {e.strerror}") from None


def _emit(args, report: Report):
    sys.stdout.write(report.json() if args.json else report.text())


def _fail(args, message: str, code: int) -> int:
    if args.json:
        sys.stdout.write(json.dumps({"error": message}) + "\n")
    print(f"qtl: {message}", file=sys.stderr)
    return code


def _components_table(report, team, alpha):
    values = component_values(team, alpha)
    rows = [(to_text(c.formula), format_symbols(c.support), v) for c, v in values.items()]
    report.table("components", ["formula", "support", "value"], rows)


# -- commands -------------------------------------------------------------------


def cmd_eval(args) -> int:
    try:
        team = parse_team(_read(args.team))
        alpha = parse(_read(args.formula))
    except (ParseError, ValueError) as e:
        return _fail(args, str(e), 2)
    try:
        ok = satisfies(team, alpha)
    except SupportError as e:
        return _fail(args, str(e), 3)
    report = Report()
    report.add("formula", to_qtl_text(alpha))
    report.add("satisfied", ok)
    _components_table(report, team, alpha)
    _emit(args, report)
    return 0 if ok else 1


def _caps(args) -> decide.Caps:
    return decide.Caps(
        max_atoms=args.max_atoms,
        max_variables=args.max_variables,
        max_supports=args.max_supports,
    )


def cmd_decide(args) -> int:
    try:
        alpha = parse(_read(args.formula))
    except (ParseError, ValueError) as e:
        return _fail(args, str(e), 3)
    start = time.perf_counter()
    try:
        result = decide.decide(alpha, args.logic, _caps(args))
    except ResourceError as e:
        return _fail(args, str(e), 4)
    except SupportError as e:
        return _fail(args, str(e), 3)
    elapsed = time.perf_counter() - start
    report = Report()
    report.add("formula", to_qtl_text(alpha))
    report.add("logic", args.logic)
    report.add("verdict", result.verdict)
    report.add("assignments_tried", result.stats.assignments_tried)
    report.add("fm_eliminations", result.stats.lp.eliminations)
    report.add("fm_substitutions", result.stats.lp.substitutions)
    report.add("seconds", f"{elapsed:.3f}")
    if result.witness is not None:
        report.add("witness_rows", len(result.witness))
        _components_table(report, result.witness, alpha)
        report.block("witness", format_team(result.witness))
        if args.witness:
            _write(args.witness, format_team(result.witness))
    if result.countermodel is not None:
        report.add("countermodel_rows", len(result.countermodel))
        report.block("countermodel", format_team(result.countermodel))
        if args.countermodel:
            _write(args.countermodel, format_team(result.countermodel))
    _emit(args, report)
    return {decide.VALID: 0, decide.SATISFIABLE: 1, decide.UNSATISFIABLE: 2}[result.verdict]


def _output(args, text: str):
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)


def cmd_table(args) -> int:
    try:
        team = parse_team(_read(args.team))
        cover_text = _read(args.cover[1:]) if args.cover.startswith("@") else args.cover
        table = associated_table(team, parse_cover(cover_text))
    except (ParseError, CoverError, TableError, ValueError) as e:
        return _fail(args, str(e), 2)
    _output(args, format_table(table))
    return 0


def cmd_team(args) -> int:
    try:
        table = parse_table(_read(args.table))
    except (ParseError, CoverError, TableError, ValueError) as e:
        return _fail(args, str(e), 2)
    _output(args, format_team(team_from_table(table)))
    return 0


def _bell_fields(report, phis, names, table):
    report.add("inequality", contextuality.bell_text(phis, names))
    report.add("violation", contextuality.violation(table, phis))


def _formula_list(path):
    entries = parse_formula_list(_read(path))
    names = [n for n, _ in entries]
    phis = [phi for _, phi in entries]
    return phis, names if all(names) else None


def cmd_classify(args) -> int:
    try:
        table = parse_table(_read(args.table))
        phis = names = None
        if args.formulas:
            phis, names = _formula_list(args.formulas)
        report = Report()
        report.add("classification", contextuality.classify(table))
        section = contextuality.global_section(table)
        report.add("global_section", section is not None)
        report.add("strongly_contextual", contextuality.is_strongly_contextual(table))
        if phis:
            _bell_fields(report, phis, names, table)
        if section is not None:
            order = sorted(table.base)
            rows = [(s.bits(order), p) for s, p in section.items() if p]
            report.table("section", [" ".join(symbol_name(v) for v in order), "p"], rows)
    except ResourceError as e:
        return _fail(args, str(e), 4)
    except (ParseError, CoverError, TableError, NotContradictoryError, AmbiguityError, ValueError) as e:
        return _fail(args, str(e), 2)
    _emit(args, report)
    return 0


def cmd_bell(args) -> int:
    try:
        phis, names = _formula_list(args.formulas)
        table = parse_table(_read(args.table))
        report = Report()
        _bell_fields(report, phis, names, table)
        rows = [
            (n if names else to_text(phi), contextuality.table_expectation(table, phi))
            for n, phi in zip(names or phis, phis)
        ]
        report.table("expectations", ["formula", "value"], rows)
    except (ParseError, CoverError, TableError, NotContradictoryError, AmbiguityError, ValueError) as e:
        return _fail(args, str(e), 2)
    _emit(args, report)
    return 0


# -- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="qtl",
        description="Quantum and probabilistic team logic: evaluation, decision, contextuality.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula on a team")
    p.add_argument("team")
    p.add_argument("formula")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("decide", parents=[common], help="decide validity and satisfiability")
    p.add_argument("formula")
    p.add_argument("--logic", choices=["qtl", "ptl"], default="qtl")
    p.add_argument("--witness", metavar="FILE", help="write a satisfying team here")
    p.add_argument("--countermodel", metavar="FILE", help="write a falsifying team here")
    p.add_argument("--max-atoms", type=int, default=decide.DEFAULT_CAPS.max_atoms)
    p.add_argument("--max-variables", type=int, default=decide.DEFAULT_CAPS.max_variables)
    p.add_argument("--max-supports", type=int, default=decide.DEFAULT_CAPS.max_supports)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("table", parents=[common], help="probability table of a team")
    p.add_argument("team")
    p.add_argument("cover", help="cover such as '{p0,p1};{p0,p3}', or @FILE")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("team", parents=[common], help="quantum team realising a table")
    p.add_argument("table")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_team)

    p = sub.add_parser("classify", parents=[common], help="contextuality class of a table")
    p.add_argument("table")
    p.add_argument("--formulas", metavar="FILE", help="also report the Bell violation")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bell", parents=[common], help="logical Bell inequality and its violation")
    p.add_argument("formulas")
    p.add_argument("table")
    p.set_defaults(func=cmd_bell)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except QtlError as e:
        return _fail(args, str(e), 2)


if __name__ == "__main__":
    sys.exit(main())
