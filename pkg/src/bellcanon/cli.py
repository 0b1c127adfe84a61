"""Command-line interface: ``bellcanon <command> ...``.

Expressions are read from interchange documents (a path, or ``-`` for stdin)
or given inline with ``--scenario`` and ``--coefficients``. Exit status is 0
on success, 1 for user errors and 2 when an internal consistency check fails.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import canonical, compendium
from .compendium import DocumentError, InterchangeDocument, Store, StoreError
from .expr import OrientedExpression
from .scenario import Scenario, ScenarioError
from .symmgroup import ChainError, chain_for, orbit_size, unrank


class UserError(Exception):
    pass


def _read_document(args) -> InterchangeDocument:
    if getattr(args, "coefficients", None) is not None:
        if not args.scenario:
            raise UserError("--coefficients needs --scenario")
        data = {"scenario": args.scenario, "notation": args.notation or "probabilities",
                "coefficients": [c for c in args.coefficients.replace(",", " ").split()]}
        if getattr(args, "bound", None) is not None:
            data["bounds"] = {"local": args.bound}
        return compendium.from_mapping(data)
    if not getattr(args, "file", None):
        raise UserError("give a document path (or -) or --scenario with --coefficients")
    text = sys.stdin.read() if args.file == "-" else _read_text(args.file)
    doc = compendium.parse(text)
    if args.notation and args.notation != doc.notation:
        raise UserError(f"document notation is {doc.notation}, not {args.notation}")
    return doc


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from None


def _store(args) -> Store:
    if not args.db:
        raise UserError("--db is required for this command")
    return Store(args.db)


def _emit(args, text: str, data) -> None:
    if args.format == "structured":
        print(json.dumps(data, indent=2, default=str))
    else:
        print(text)


def _coeffs(e) -> str:
    return " ".join(compendium.format_rational(c) for c in e.coefficients)


def cmd_canon(args):
    oe = _read_document(args).oriented()
    tree = canonical.decompose(oe)
    if not isinstance(tree, canonical.Leaf):
        raise UserError("expression is composite; use `decompose`")
    c = tree.canonical
    bounds = {k: compendium.format_rational(b.value) for k, b in c.bounds.items()}
    w = [int(v) + 1 for v in tree.witness]
    text = "\n".join([f"scenario: {c.scenario}", f"coefficients: {_coeffs(c.expression)}",
                      *(f"bound {k}: {v}" for k, v in bounds.items()),
                      f"key: {tree.key}", f"rank: {tree.rank}",
                      f"witness: {' '.join(map(str, w))}"])
    _emit(args, text, tree.to_dict() | {"key": tree.key})


def cmd_decompose(args):
    tree = canonical.decompose(_read_document(args).oriented())
    _emit(args, tree.describe(), tree.to_dict())


def cmd_rank(args):
    tree = canonical.decompose(_read_document(args).oriented())
    if not isinstance(tree, canonical.Leaf):
        raise UserError("expression is composite; ranks are defined for non-composite expressions")
    size = orbit_size(tree.expression)
    _emit(args, f"rank {tree.rank} of {size}", {"rank": tree.rank, "orbit_size": size})


def cmd_unrank(args):
    e = _read_document(args).expression()
    chain = chain_for(e.scenario)
    size = orbit_size(e, chain)
    if not 1 <= args.rank <= size:
        raise UserError(f"rank must lie in 1..{size}")
    out = unrank(e, args.rank, chain)
    _emit(args, _coeffs(out), {"scenario": str(e.scenario),
                                "coefficients": [str(c) for c in out.coefficients]})


def cmd_local_bound(args):
    e = _read_document(args).expression()
    b = canonical.local_bound(e, args.strategy_cap)
    _emit(args, compendium.format_rational(b), {"local": str(b)})


def cmd_facet_check(args):
    doc = _read_document(args)
    beta = args.bound if args.bound is not None else doc.oriented().bound("local")
    if beta is None:
        raise UserError("no local bound given (document bound or --bound)")
    ok = canonical.facet_check(doc.expression(), compendium.parse_rational(beta, "bound"),
                               args.strategy_cap)
    _emit(args, "facet" if ok else "not a facet", {"facet": ok})


def cmd_match(args):
    db = _store(args)
    rep = compendium.match(_read_document(args).oriented(), db)
    _emit(args, rep.text(), rep.to_dict())


def cmd_import(args):
    db = _store(args)
    keys = []
    for path in args.files:
        doc = compendium.parse(sys.stdin.read() if path == "-" else _read_text(path))
        prov = {k: p for k, (_, p) in doc.bounds.items() if p is not None}
        rec = compendium.canonical_record(doc.oriented(), names=doc.names, provenance=prov,
                                          references=doc.references, notes=doc.notes)
        keys.append(db.store(rec, merge=args.merge))
    _emit(args, "\n".join(keys), {"keys": keys})


def cmd_export(args):
    db = _store(args)
    rec = db.lookup(args.key)
    if rec is None:
        matches = [k for k in db.index if k.startswith(args.key)]
        if len(matches) != 1:
            raise UserError(f"no unique record for key {args.key}")
        rec = db.lookup(matches[0])
    doc = rec.document()
    if args.notation == "collins-gisin":
        doc = InterchangeDocument(doc.scenario, tuple(compendium.to_collins_gisin(doc.expression())),
                                  "collins-gisin", doc.bounds, doc.names, doc.references, doc.notes)
    print(compendium.serialize(doc), end="")


def cmd_rebuild_index(args):
    n = _store(args).rebuild_index()
    _emit(args, f"{n} records indexed", {"records": n})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--db", help="store directory")
    common.add_argument("--strategy-cap", type=int, default=canonical.DEFAULT_STRATEGY_CAP,
                        help="maximum number of deterministic strategies to enumerate")

    inp = argparse.ArgumentParser(add_help=False)
    inp.add_argument("file", nargs="?", help="interchange document, or - for stdin")
    inp.add_argument("--scenario", help='e.g. "(2,2,2)" or "[(3 2) (2 2 2)]"')
    inp.add_argument("--coefficients", help="whitespace or comma separated rationals")
    inp.add_argument("--notation", choices=compendium.NOTATIONS)

    p = argparse.ArgumentParser(prog="bellcanon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("canon", parents=[common, inp], help="canonical form, witness and rank")
    sp.add_argument("--bound")
    sp.set_defaults(func=cmd_canon)
    sp = sub.add_parser("decompose", parents=[common, inp], help="decomposition tree")
    sp.add_argument("--bound")
    sp.set_defaults(func=cmd_decompose)
    sub.add_parser("rank", parents=[common, inp], help="orbit rank").set_defaults(func=cmd_rank)
    sp = sub.add_parser("unrank", parents=[common, inp], help="r-th element of an orbit")
    sp.add_argument("--rank", type=int, required=True)
    sp.set_defaults(func=cmd_unrank)
    sub.add_parser("local-bound", parents=[common, inp],
                   help="maximum over deterministic strategies").set_defaults(func=cmd_local_bound)
    sp = sub.add_parser("facet-check", parents=[common, inp], help="facet certificate")
    sp.add_argument("--bound")
    sp.set_defaults(func=cmd_facet_check)
    sp = sub.add_parser("match", parents=[common, inp], help="decompose and look up leaves")
    sp.add_argument("--bound")
    sp.set_defaults(func=cmd_match)
    sp = sub.add_parser("import", parents=[common], help="canonicalize and store documents")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--merge", action="store_true", help="combine with an existing record")
    sp.set_defaults(func=cmd_import)
    sp = sub.add_parser("export", parents=[common], help="print a stored record")
    sp.add_argument("key")
    sp.add_argument("--notation", choices=compendium.NOTATIONS, default="probabilities")
    sp.set_defaults(func=cmd_export)
    db = sub.add_parser("db", help="store maintenance")
    dbsub = db.add_subparsers(dest="db_command", required=True)
    dbsub.add_parser("rebuild-index", parents=[common]).set_defaults(func=cmd_rebuild_index)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (UserError, DocumentError, StoreError, ScenarioError,
            canonical.TrivialExpressionError, canonical.StrategyCapError,
            canonical.NotInheritableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AssertionError, ChainError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
