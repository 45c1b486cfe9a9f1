"""Command line front end: suite replay, script proving, concrete comparison.

Exit codes: 0 success, 1 falsified/invalid, 2 input error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

from .certificates import ProofCertificate, builtin_suite, check_certificate, verify_paper
from .dsl import load_script
from .errors import ParseError
from .reports import render_report, search_dict
from .rules import RULES
from .search import prove as search_prove
from .weyl.compare import dwork_compare
from .weyl.poly import default_names, parse_poly

_MODES = {"strict": "strict-smooth", "allow-singular": "allow-singular"}


def _common_flags(p):
    p.add_argument("--mode", choices=sorted(_MODES),
                   help="smoothness policy override")
    p.add_argument("--strata", type=int, default=None,
                   help="highest rule stratum allowed")
    p.add_argument("--output", choices=("text", "machine"), default="text")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="dworklab",
        description="replay, prove, and numerically check integral-transform "
                    "identities for algebraic D-modules")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-paper", help="replay the built-in certificates")
    _common_flags(p)

    p = sub.add_parser("prove", help="check or search a goal script")
    p.add_argument("script", help="path to a .dwk script")
    p.add_argument("--search", type=int, default=None, metavar="DEPTH",
                   help="search for a proof when the script has no steps")
    _common_flags(p)

    p = sub.add_parser("dwork-check",
                       help="compare twisted and supported de Rham tables")
    p.add_argument("--f", action="append", default=[], metavar="EXPR",
                   help="defining polynomial (repeatable)")
    p.add_argument("--n", type=int, default=None,
                   help="number of base variables")
    p.add_argument("--d-max", type=int, default=None,
                   help="largest twisted window cutoff")
    p.add_argument("--pole-max", type=int, default=10,
                   help="largest pole order on the complement side")
    p.add_argument("--window", type=int, default=None,
                   help="first twisted window cutoff")
    p.add_argument("--output", choices=("text", "machine"), default="text")
    return ap


def _line_col(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _fail_input(msg):
    print(f"error: {msg}", file=sys.stderr)
    return 2


def cmd_verify_paper(args):
    mode = _MODES[args.mode] if args.mode else None
    rep = verify_paper(mode=mode, allowed_strata=args.strata)
    extra = {}
    if args.strata is not None:
        needs = {}
        for _, cert in builtin_suite()[1]:
            over = sorted({s.rule for s in cert.steps
                           if s.rule in RULES and RULES[s.rule][0] > args.strata})
            if over:
                needs[cert.name] = over
        extra["stratum_needs"] = needs
    out = render_report(rep, args.output, extra=extra or None)
    sys.stdout.write(out)
    if args.output == "text" and extra.get("stratum_needs"):
        for name, over in sorted(extra["stratum_needs"].items()):
            print(f"{name} needs stratum rules above the bound: "
                  f"{', '.join(over)}")
    return 0 if rep.ok else 1


def cmd_prove(args):
    try:
        with open(args.script, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        return _fail_input(str(e))
    try:
        bound = load_script(text, name=os.path.basename(args.script))
    except ParseError as e:
        if e.span is not None:
            line, col = _line_col(text, e.span[0])
            return _fail_input(f"{args.script}:{line}:{col}: {e.message}")
        return _fail_input(f"{args.script}: {e.message}")
    cert = bound.certificate
    if cert is None:
        return _fail_input(f"{args.script}: script declares no goal")
    mode = _MODES[args.mode] if args.mode else None
    if cert.steps:
        rep = check_certificate(bound.ctx, cert, mode=mode,
                                allowed_strata=args.strata)
        sys.stdout.write(render_report(rep, args.output))
        return 0 if rep.ok else 1
    if args.search is None:
        if args.output == "machine":
            sys.stdout.write('{"kind":"prove","schema_version":1,'
                             '"status":"inconclusive"}\n')
        else:
            print("goal has no proof script; pass --search DEPTH to look "
                  "for one")
        return 3
    res = search_prove(bound.ctx, cert.goal_lhs, cert.goal_rhs,
                       max_depth=args.search,
                       mode=mode or cert.mode,
                       allowed_strata=(args.strata if args.strata is not None
                                       else cert.allowed_strata),
                       excluded=cert.excluded_rules)
    if not res.found:
        sys.stdout.write(render_report(res, args.output))
        return 3
    found = ProofCertificate(
        name=cert.name, title=cert.title, goal_lhs=cert.goal_lhs,
        goal_rhs=cert.goal_rhs, steps=tuple(res.steps),
        mode=mode or cert.mode,
        allowed_strata=(args.strata if args.strata is not None
                        else cert.allowed_strata),
        closure=res.closure, lemmas=cert.lemmas,
        excluded_rules=cert.excluded_rules)
    rep = check_certificate(bound.ctx, found)
    if args.output == "machine":
        sys.stdout.write(render_report(rep, "machine",
                                       extra={"search": search_dict(res)}))
    else:
        sys.stdout.write(render_report(res, "text"))
        sys.stdout.write(render_report(rep, "text"))
    return 0 if rep.ok else 1


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _infer_names(texts, n):
    used = set()
    for t in texts:
        used.update(_NAME_RE.findall(t))
    if n is None:
        if used <= {"x", "y", "z"}:
            n = 3 if "z" in used else 2 if "y" in used else 1
        elif all(re.fullmatch(r"x\d+", u) for u in used) and used:
            n = max(int(u[1:]) for u in used)
        else:
            raise ValueError(
                "cannot infer the variable count; pass --n explicitly")
    for names in (default_names(n), tuple(f"x{i+1}" for i in range(n))):
        if used <= set(names):
            return n, names
    raise ValueError(f"variables {sorted(used)} do not fit {n} base "
                     f"variables; expected {default_names(n)}")


def cmd_dwork_check(args):
    if not args.f:
        return _fail_input("pass at least one --f polynomial")
    try:
        n, names = _infer_names(args.f, args.n)
        fs = [parse_poly(t, names) for t in args.f]
    except (ValueError, ParseError) as e:
        return _fail_input(str(e))
    for t, f in zip(args.f, fs):
        if f.degree() <= 0:
            return _fail_input(f"constant polynomial {t!r} cuts out nothing")
    d_max = args.d_max
    if d_max is None:
        env = os.environ.get("DWORK_DMAX")
        if env is not None:
            try:
                d_max = int(env)
            except ValueError:
                return _fail_input(f"DWORK_DMAX={env!r} is not an integer")
        else:
            d_max = 30 if n + len(fs) <= 3 else 16
    cmp = dwork_compare(fs, d0=args.window, d_max=d_max,
                        t_max=max(args.pole_max - 1, 0))
    extra = {"f": list(args.f), "n": n}
    sys.stdout.write(render_report(cmp, args.output, extra=extra))
    if cmp.inconclusive:
        return 3
    return 0 if cmp.match else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify-paper":
        return cmd_verify_paper(args)
    if args.command == "prove":
        return cmd_prove(args)
    return cmd_dwork_check(args)


if __name__ == "__main__":
    raise SystemExit(main())
