"""Command-line front end.

Exit codes: 0 pass, 1 verdict fail (inverted by ``--expect-fail``),
2 usage or parse error, 3 fuel or search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .gsbasis import check_gs, check_thm41, ideal_truncation_rank, irr_monomials
from .opi import catalog, catalog_names, load_opi_file
from .orders import parse_order
from .poly import parse_poly
from .reproduce import TARGETS, reproduce
from .rewrite import DEFAULT_BUDGET, FuelExhausted, OrientationError, RewriteSystem
from .terms import ParseError, to_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EXHAUSTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _positive(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("bounds must be non-negative")
    return n


def _letters(text: str) -> list[str]:
    out = [x.strip() for x in text.split(",") if x.strip()]
    if not out:
        raise argparse.ArgumentTypeError("at least one letter is required")
    return out


def _add_system_args(p: argparse.ArgumentParser, letters="z1,z2"):
    p.add_argument("--opi", "--system", dest="opi", help=f"catalog name: {', '.join(catalog_names())}")
    p.add_argument("--opi-file", help="JSON file with one OPI or a list of them")
    p.add_argument("--lambda", dest="lam", type=_fraction, help="weight, e.g. 1 or -1/2")
    p.add_argument("--mu", type=_fraction, help="modified-rb: weight is -mu^2")
    p.add_argument("--orientation", help="averaging case1..case4")
    p.add_argument("--letters", type=_letters, default=_letters(letters))
    p.add_argument("--order", help="opdeglex:a<b, difflex or none (default: the catalog's)")
    p.add_argument("--fuel", type=_positive)
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="joinability search nodes")
    p.add_argument("--json", action="store_true")
    p.add_argument("--expect-fail", action="store_true", help="a failing verdict is the expected outcome")


def _rules_and_order(args):
    """(rules, order) from the catalog or a file; empty system if neither."""
    if args.opi and args.opi_file:
        raise UsageError("give either --opi or --opi-file")
    family = None
    if args.opi_file:
        rules, family = load_opi_file(args.opi_file)
    elif args.opi:
        params = {}
        if args.lam is not None:
            params["lambda"] = args.lam
        if args.mu is not None:
            params["mu"] = args.mu
        if args.orientation:
            params["orientation"] = args.orientation
        try:
            entry = catalog(args.opi, **params)
        except ValueError as e:
            raise UsageError(str(e))
        rules, family = list(entry.rules), entry.order_family
    else:
        rules = []
    spec = args.order if args.order is not None else family
    if spec and spec.lower() != "none" and ":" not in spec:
        spec = f"{spec}:{'<'.join(args.letters)}"
    try:
        order = parse_order(spec, args.letters)
    except ValueError as e:
        raise UsageError(str(e))
    return rules, order


def _system(args) -> RewriteSystem:
    rules, order = _rules_and_order(args)
    return RewriteSystem(rules, args.letters, order, fuel=args.fuel, node_budget=args.budget)


def _verdict_code(passed: bool, args) -> int:
    if getattr(args, "expect_fail", False):
        passed = not passed
    return EXIT_OK if passed else EXIT_FAIL


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_nf(args) -> int:
    sys_ = _system(args)
    f = parse_poly(args.poly, None, {"lambda": args.lam} if args.lam is not None else None)
    try:
        res = sys_.normal_form(f, trace=args.trace or args.json)
    except FuelExhausted as e:
        _emit(args, {"input": str(f), "status": "fuel-exhausted", "steps": e.steps, "last": str(e.last)},
              f"fuel exhausted after {e.steps} steps; last: {e.last}")
        return EXIT_EXHAUSTED
    payload = {"input": str(f), "nf": str(res.nf), "steps": sys_.trace_json(res.trace)["steps"]}
    lines = [str(res.nf)]
    if args.trace:
        for st in res.trace:
            lines.append(f"  {to_text(st.monomial)} by {sys_.rules[st.redex.rule].name} "
                         f"at {st.redex.context}: {st.after}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_confluence(args) -> int:
    sys_ = _system(args)
    v = sys_.check_confluence(args.max_size, args.budget)
    text = [f"{v.status}: {v.words} words, {v.forks} forks up to size {args.max_size}"]
    for c in v.counterexamples[:5]:
        text.append(f"  {to_text(c.fork.word)}: {c.verdict.left_nf}  vs  {c.verdict.right_nf}")
    _emit(args, v.to_json(sys_.rules), "\n".join(text))
    if v.status == "unknown":
        return EXIT_EXHAUSTED
    return _verdict_code(v.ok, args)


def cmd_gs(args) -> int:
    rules, order = _rules_and_order(args)
    if order is None:
        raise UsageError("gs needs a monomial order")
    v = check_gs(rules, order, args.letters, args.max_inst, args.fuel, max_word_size=args.max_size,
                 node_budget=args.budget)
    text = [f"{v.status}: {v.compositions} compositions"]
    for c in v.counterexamples[:5]:
        text.append(f"  {c.kind} at {to_text(c.w)}: {c.value}")
    _emit(args, v.to_json(rules), "\n".join(text))
    if v.status == "unknown":
        return EXIT_EXHAUSTED
    return _verdict_code(v.ok, args)


def cmd_thm41(args) -> int:
    rules, order = _rules_and_order(args)
    if len(rules) != 1:
        raise UsageError("thm41 checks exactly one OPI")
    if order is None:
        raise UsageError("thm41 needs a monomial order")
    r = check_thm41(rules[0], order, args.letters, args.max_inst, args.fuel, args.budget)
    text = (f"multilinear={r.multilinear} phi-normal={r.phi_normal} "
            f"cond1={r.cond1} ({r.cond1_checked} overlaps) cond2={r.cond2} ({r.cond2_checked} inclusions)")
    for fail in (r.cond1_failures + r.cond2_failures)[:5]:
        text += "\n  " + json.dumps(fail)
    _emit(args, r.to_json(), text)
    return _verdict_code(r.ok, args)


def cmd_basis(args) -> int:
    rules, order = _rules_and_order(args)
    irr = irr_monomials(rules, args.letters, args.max_size)
    rows = []
    ok = True
    if order is not None:
        for n in range(args.max_size + 1):
            t = ideal_truncation_rank(rules, order, args.letters, n, prime=args.prime)
            rows.append(t.to_json())
            ok = ok and t.ok
    lines = [f"Irr up to size {args.max_size}: {len(irr)} words"]
    if args.list:
        lines += ["  " + to_text(w) for w in irr]
    if rows:
        lines.append("n,total,irr,rank,verdict")
        lines += [f"{r['n']},{r['total']},{r['irr']},{r['rank']},{r['verdict']}" for r in rows]
    _emit(args, {"irr": [to_text(w) for w in irr], "truncation": rows}, "\n".join(lines))
    return _verdict_code(ok, args)


def cmd_reproduce(args) -> int:
    opts = {}
    if args.lam is not None:
        opts["lam"] = args.lam
    if args.max_inst is not None:
        opts["max_inst"] = args.max_inst
    if args.max_size is not None:
        opts["max_size"] = args.max_size
    rep = reproduce(args.target, **opts)
    text = "\n".join(rep.lines)
    if rep.mismatches:
        text += "\nMISMATCH:\n" + "\n".join("  " + m for m in rep.mismatches)
    _emit(args, rep.to_json(), text)
    return _verdict_code(rep.ok, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opal", description="Rewriting and Groebner-Shirshov checks for OPIs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf", help="normal form of a polynomial")
    _add_system_args(p)
    p.add_argument("poly", help="polynomial, e.g. \"[z1][z2]\"")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("confluence", help="joinability of all local forks up to a size")
    _add_system_args(p)
    p.add_argument("--max-size", type=_positive, default=6)
    p.set_defaults(func=cmd_confluence)

    p = sub.add_parser("gs", help="bounded Groebner-Shirshov check")
    _add_system_args(p)
    p.add_argument("--max-inst", type=_positive, default=3)
    p.add_argument("--max-size", type=_positive, default=None, help="cap on composition word size")
    p.set_defaults(func=cmd_gs)

    p = sub.add_parser("thm41", help="overlap and inclusion conditions for one OPI")
    _add_system_args(p)
    p.add_argument("--max-inst", type=_positive, default=3)
    p.set_defaults(func=cmd_thm41)

    p = sub.add_parser("basis", help="irreducible words and truncated-ideal ranks")
    _add_system_args(p)
    p.add_argument("--max-size", type=_positive, default=4)
    p.add_argument("--list", action="store_true", help="print every irreducible word")
    p.add_argument("--prime", type=int, default=None, help="also compute the rank modulo this prime")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("reproduce", help="re-derive a named result against its golden file")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--lambda", dest="lam", type=_fraction)
    p.add_argument("--max-inst", type=_positive)
    p.add_argument("--max-size", type=_positive)
    p.add_argument("--json", action="store_true")
    p.add_argument("--expect-fail", action="store_true")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ParseError, OrientationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FuelExhausted as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
