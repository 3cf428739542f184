"""Command-line front end.

    qtails verify --id NAME [--order N]
    qtails verify --all [--order N] [--report PATH] [--jobs J]
    qtails eval "EXPR" --order N
    qtails hunt (--id NAME | --expr EXPR) --order N --max-factors K --max-b B --eta-min E0 --eta-max E1
    qtails list [--knots]
    qtails check FILE.qid [--order N]

Exit status is 0 when every requested verification succeeds, 1 on any
failed verification and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import catalog
from .dsl import DSLSyntaxError, DuplicateName, eval_expr, parse_expression, parse_identity_file
from .verify import VERIFIED, default_order, reports_to_json, verify_all, verify_identity

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtails", description="Exact q-series identity checker.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify catalog identities")
    which = v.add_mutually_exclusive_group(required=True)
    which.add_argument("--id", help="identity name, e.g. S_8_7")
    which.add_argument("--all", action="store_true", help="verify the whole catalog")
    v.add_argument("--order", type=int, help="truncation order (default: 20 for 8+ variables, else 30)")
    v.add_argument("--report", type=Path, help="write the JSON report here")
    v.add_argument("--jobs", type=int, default=1, help="worker processes for --all")

    e = sub.add_parser("eval", help="evaluate an expression")
    e.add_argument("expr")
    e.add_argument("--order", type=int, required=True)

    h = sub.add_parser("hunt", help="search for a product form")
    target = h.add_mutually_exclusive_group(required=True)
    target.add_argument("--id", help="knot with a known multisum, or an identity (its left side)")
    target.add_argument("--expr", help="expression to match")
    h.add_argument("--order", type=int, required=True)
    h.add_argument("--max-factors", type=int, default=3)
    h.add_argument("--max-b", type=int, default=10)
    h.add_argument("--eta-min", type=int, default=-3)
    h.add_argument("--eta-max", type=int, default=3)

    ls = sub.add_parser("list", help="list catalog identities")
    ls.add_argument("--knots", action="store_true", help="list the knot tables instead")

    c = sub.add_parser("check", help="verify every identity in a .qid file")
    c.add_argument("file", type=Path)
    c.add_argument("--order", type=int)
    c.add_argument("--report", type=Path)
    return p


def _finish(reports, report_path: Optional[Path]) -> int:
    for r in reports:
        print(r.summary())
    if report_path is not None:
        report_path.write_text(reports_to_json(reports), encoding="utf-8")
    return EXIT_OK if all(r.status == VERIFIED for r in reports) else EXIT_MISMATCH


def _cmd_verify(args) -> int:
    if args.all:
        reports = verify_all(catalog.builtin_identities(), args.order, jobs=args.jobs)
    else:
        reports = [verify_identity(catalog.get_identity(args.id), args.order)]
    return _finish(reports, args.report)


def _cmd_eval(args) -> int:
    print(eval_expr(parse_expression(args.expr), args.order))
    return EXIT_OK


def _hunt_target(args):
    if args.expr is not None:
        return parse_expression(args.expr)
    try:
        return catalog.tail_expression(args.id)
    except catalog.UnknownKnot:
        return catalog.get_identity(args.id).lhs


def _cmd_hunt(args) -> int:
    target = eval_expr(_hunt_target(args), args.order)
    matches = catalog.hunt(target, args.max_factors, args.max_b, (args.eta_min, args.eta_max), args.order)
    if not matches:
        print("no product match")
    for m in matches:
        print(m)
    return EXIT_OK


def _fmt_product(p) -> str:
    if p is None:
        return "?"
    return " ".join(f"h{b}" for b in p)


def _cmd_list(args) -> int:
    if args.knots:
        for row in catalog.TABLE_ROWS:
            entry = catalog.get_entry(row.knot)
            mirror = catalog.get_entry(row.mirror().knot)
            tags = [e.identity for e in (entry, mirror) if e.identity]
            print(f"{row.knot:<6} {_fmt_product(row.tail_product):<14} {_fmt_product(row.mirror_tail_product):<14} {' '.join(tags)}")
        return EXIT_OK
    for ident in catalog.builtin_identities():
        flag = "  [corrected]" if ident.corrected else ""
        print(f"{ident.name:<22} order={default_order(ident):<3} {ident.source}{flag}")
    return EXIT_OK


def _cmd_check(args) -> int:
    idents = parse_identity_file(args.file.read_text(encoding="utf-8"))
    return _finish([verify_identity(i, args.order) for i in idents], args.report)


_COMMANDS = {
    "verify": _cmd_verify,
    "eval": _cmd_eval,
    "hunt": _cmd_hunt,
    "list": _cmd_list,
    "check": _cmd_check,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (DSLSyntaxError, DuplicateName, catalog.UnknownKnot, catalog.UnknownIdentity, OSError, ValueError) as exc:
        print(f"qtails: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
