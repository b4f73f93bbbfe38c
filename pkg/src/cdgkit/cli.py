"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure or unequal comparison,
2 usage or parse error, 3 unsupported case.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import __version__
from .catalog import curved_point_module
from .cdgcore import CdgError, curvature_shift, validate
from .cdgmod import Module, diagonal_bimodule, validate_module
from .complexes import bar_bicomplex, cobar_bicomplex, hochschild_bicomplex
from .engines import (EngineError, HomologyReport, Unsupported, check_resolution,
                      compare_hh_B_vs_C, curvature_shift_check, delta_acyclicity_probe,
                      ext_first_kind, ext_second_kind, hh_first_kind, hh_second_kind,
                      projective_resolution, pushforward_compat_check, tor_first_kind,
                      tor_second_kind)
from .exactla import Field
from .grading import GradingGroup
from .io import LoadError, Workspace, fixture_names, is_module_data, read_json

OK, FAILED, USAGE, UNSUPPORTED = 0, 1, 2, 3
DEFAULT_SEED = 0


class _Usage(Exception):
    pass


def _write_json(path: Optional[str], data: dict):
    if path:
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=False)
            fh.write("\n")


def _load(fn, *args):
    """Run a loader; any failure is a parse error."""
    try:
        return fn(*args)
    except (LoadError, CdgError, ValueError, KeyError, TypeError, OSError) as e:
        raise _Usage(str(e)) from None


def _show_report(title: str, rep: HomologyReport) -> None:
    print(title)
    print("\n".join(rep.lines()))


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    ws = Workspace(args.field)
    status = OK
    for ref in args.paths:
        data = _load(read_json, ref)
        if is_module_data(data):
            M = _load(ws.module, ref)
            rep = validate_module(M, qdg=args.qdg)
        else:
            B = _load(ws.category, ref)
            rep = validate(B)
        print(str(rep))
        if not rep.ok:
            status = FAILED
    return status


def cmd_hh(args) -> int:
    ws = Workspace(args.field)
    B = _load(ws.category, args.category)
    M = _load(ws.module, args.coefficients) if args.coefficients else None
    if args.kind == "second":
        rep = hh_second_kind(B, M, args.variant, args.max_depth)
    else:
        rep = hh_first_kind(B, M, args.truncate, args.variant)
    _show_report(f"HH {args.variant} ({args.kind} kind) of {B.name} over {B.F.name}", rep)
    _write_json(args.json, rep.to_dict())
    return OK


def cmd_tor(args) -> int:
    ws = Workspace(args.field)
    N = _load(ws.module, args.right)
    M = _load(ws.module, args.left)
    if args.kind == "second":
        rep = tor_second_kind(N, M, args.max_depth, resolve=args.resolve)
    else:
        rep = tor_first_kind(N, M, args.truncate)
    _show_report(f"Tor ({args.kind} kind) of {N.name}, {M.name} over {M.F.name}", rep)
    _write_json(args.json, rep.to_dict())
    return OK


def cmd_ext(args) -> int:
    ws = Workspace(args.field)
    L = _load(ws.module, args.source)
    M = _load(ws.module, args.target)
    if args.kind == "second":
        rep = ext_second_kind(L, M, args.max_depth)
    else:
        rep = ext_first_kind(L, M, args.truncate)
    _show_report(f"Ext ({args.kind} kind) from {L.name} to {M.name} over {M.F.name}", rep)
    _write_json(args.json, rep.to_dict())
    return OK


def cmd_resolve(args) -> int:
    ws = Workspace(args.field)
    M = _load(ws.module, args.module)
    res = projective_resolution(M, args.max_depth)
    problems = check_resolution(res)
    print(f"resolution of {M.name}: {res.status()}")
    for j, P in enumerate(res.terms):
        print(f"  P_{j}: dim {P.dim}")
    for n in res.notes:
        print(f"  note: {n}")
    for p in problems:
        print(f"  FAIL {p}")
    _write_json(args.json, {"module": M.name, "status": res.status(), "complete": res.complete,
                            "dims": [P.dim for P in res.terms], "notes": res.notes,
                            "problems": problems})
    return FAILED if problems else OK


def cmd_dump(args) -> int:
    ws = Workspace(args.field)
    if args.which == "bar":
        if len(args.refs) != 2:
            raise _Usage("dump bar needs a right module and a left module")
        N, M = (_load(ws.module, r) for r in args.refs)
        bc = bar_bicomplex(N, M.base, M, args.truncate, args.reduced)
    elif args.which == "cobar":
        if len(args.refs) != 2:
            raise _Usage("dump cobar needs two left modules")
        L, M = (_load(ws.module, r) for r in args.refs)
        bc = cobar_bicomplex(L, M.base, M, args.truncate, args.reduced)
    else:
        if len(args.refs) not in (1, 2):
            raise _Usage("dump hochschild needs a category and optionally coefficients")
        B = _load(ws.category, args.refs[0])
        if len(args.refs) == 2:
            M = _load(ws.module, args.refs[1])
        else:
            M = diagonal_bimodule(B, None, "left")
        bc = hochschild_bicomplex(B, M, args.variant, args.truncate, args.reduced)
    bc.dump(args.out)
    bad = {k: v for k, v in bc.check_identities().items() if v}
    print(f"wrote {bc.kind} bicomplex (T={bc.T}) to {args.out}")
    for i in bc.levels():
        print(f"  level {i}: dim {bc.dim(i)}")
    if bad:
        print(f"  FAIL identities: {bad}")
        return FAILED
    return OK


def cmd_check(args) -> int:
    from .suites import SUITES
    kwargs = {"seed": args.seed, "cases": args.cases}
    if args.truncate is not None:
        kwargs["T"] = args.truncate
    if args.field:
        kwargs["F"] = _load(Field.parse, args.field)
    res = SUITES[args.suite](**kwargs)
    print(res.summary())
    for f in res.failures:
        print(f"  {f}")
    _write_json(args.json, {"suite": res.name, "cases": res.cases, "ok": res.ok,
                            "failures": res.failures, "seed": args.seed})
    return OK if res.ok else FAILED


def cmd_compare(args) -> int:
    ws = Workspace(args.field)
    B = _load(ws.category, args.category)
    if args.what == "BvsC":
        if not args.objects:
            raise _Usage("compare BvsC needs --objects")
        objs = [_load(ws.module, r) for r in args.objects]
        cmp = compare_hh_B_vs_C(B, objs, [o.name for o in objs], args.variant, args.max_depth)
        print(cmp.verdict())
        _write_json(args.json, cmp.to_dict())
        return OK if cmp.equal else FAILED
    if args.what == "curvature-shift":
        cs = args.c or ["1"]
        out, ok = [], True
        for c in cs:
            cmp = curvature_shift_check(B, B.F.parse_scalar(c), args.variant, args.max_depth)
            print(f"c = {c}: {cmp.verdict()} (tensor identity {'holds' if cmp.extra['tensor_identity'] else 'fails'})")
            out.append(cmp.to_dict())
            ok = ok and cmp.equal
        _write_json(args.json, {"comparison": "curvature-shift", "results": out})
        return OK if ok else FAILED
    if args.what == "grading-pushforward":
        target = _load(GradingGroup.parse, args.to)
        res = pushforward_compat_check(B, target, args.truncate or 3)
        for k, v in res.items():
            print(f"  {k}: {v}")
        _write_json(args.json, res)
        if res["tables_equal"] is None and all(res[f"bicomplex_{v}"] for v in ("homology", "cohomology")):
            print("EQUAL on bicomplexes; tables not computed")
            return OK
        print("EQUAL" if res["ok"] else "UNEQUAL")
        return OK if res["ok"] else FAILED
    if args.what == "delta-probe":
        for c in args.c or []:
            B = curvature_shift(B, B.F.parse_scalar(c))
        if args.objects:
            if len(args.objects) != 2:
                raise _Usage("compare delta-probe needs --objects RIGHT LEFT")
            N, M = (_load(ws.module, r) for r in args.objects)
        else:
            N, M = _point_modules(B)
        res = delta_acyclicity_probe(B, N, M, args.truncate or 6)
        print(f"delta columns over {B.F.name} exact in window {res['window']}: {res['ok']}")
        _write_json(args.json, res)
        return OK if res["ok"] else FAILED
    raise _Usage(f"unknown comparison {args.what}")


def _point_modules(B):
    """The two-dimensional modules over a curved point ``(k, 0, c)``."""
    if len(B.objects) != 1 or B.dim != 1:
        raise _Usage("default probe modules need a one-dimensional category; pass --objects")
    X = B.objects[0]
    c = B.h(X).get(0, 0)
    mods = []
    for side in ("right", "left"):
        K = curved_point_module(c, B.F, side, B.grading)
        mods.append(Module(B, side, [(n, X, g) for n, _, g in K.basis], K.action, K.diff, f"K_{side}"))
    return mods


def cmd_show(args) -> int:
    data = _load(read_json, args.report)
    try:
        rep = HomologyReport.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise _Usage(f"{args.report}: not a homology report ({e})") from None
    print("\n".join(rep.lines()))
    return OK


def cmd_fixtures(args) -> int:
    for n in fixture_names():
        print(n)
    return OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdgkit", description="Exact computations with curved DG-categories.")
    p.add_argument("--version", action="version", version=f"cdgkit {__version__}")
    p.add_argument("--field", help="Q or Fp:<prime>; overrides the field of loaded files")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--field", default=argparse.SUPPRESS,
                        help="Q or Fp:<prime>; overrides the field of loaded files")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, **kw):
        return sub.add_parser(name, parents=[shared], **kw)

    def common(sp):
        sp.add_argument("--json", metavar="OUT", help="also write the result as JSON")

    sp = command("validate", help="check category or module axioms")
    sp.add_argument("paths", nargs="+")
    sp.add_argument("--qdg", action="store_true", help="validate modules as QDG-modules")
    sp.set_defaults(func=cmd_validate)

    sp = command("hh", help="Hochschild (co)homology")
    sp.add_argument("category")
    sp.add_argument("--kind", choices=["first", "second"], default="second")
    sp.add_argument("--variant", choices=["homology", "cohomology"], default="homology")
    sp.add_argument("--truncate", type=int, default=6, metavar="T")
    sp.add_argument("--coefficients", metavar="MODULE", help="left module over CATEGORY^env")
    sp.add_argument("--max-depth", type=int, default=20)
    common(sp)
    sp.set_defaults(func=cmd_hh)

    sp = command("tor", help="Tor between a right and a left module")
    sp.add_argument("right")
    sp.add_argument("left")
    sp.add_argument("--kind", choices=["first", "second"], default="second")
    sp.add_argument("--truncate", type=int, default=6, metavar="T")
    sp.add_argument("--max-depth", type=int, default=20)
    sp.add_argument("--resolve", choices=["left", "right"], default="right",
                    help="which argument to resolve (second kind)")
    common(sp)
    sp.set_defaults(func=cmd_tor)

    sp = command("ext", help="Ext between two left modules")
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("--kind", choices=["first", "second"], default="second")
    sp.add_argument("--truncate", type=int, default=6, metavar="T")
    sp.add_argument("--max-depth", type=int, default=20)
    common(sp)
    sp.set_defaults(func=cmd_ext)

    sp = command("resolve", help="projective resolution by free CDG-modules")
    sp.add_argument("module")
    sp.add_argument("--max-depth", type=int, default=20)
    common(sp)
    sp.set_defaults(func=cmd_resolve)

    sp = command("dump", help="write a bicomplex as matrix triplet files")
    sp.add_argument("which", choices=["bar", "cobar", "hochschild"])
    sp.add_argument("refs", nargs="+")
    sp.add_argument("--truncate", type=int, default=4, metavar="T")
    sp.add_argument("--variant", choices=["homology", "cohomology"], default="homology")
    sp.add_argument("--reduced", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_dump)

    sp = command("check", help="run a seeded property suite")
    sp.add_argument("suite", choices=["bicomplex-identities", "functoriality"])
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--cases", type=int, default=None)
    sp.add_argument("--truncate", type=int, default=None, metavar="T")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = command("compare", help="invariance and comparison checks")
    sp.add_argument("what", choices=["BvsC", "curvature-shift", "grading-pushforward", "delta-probe"])
    sp.add_argument("category")
    sp.add_argument("--objects", nargs="+", metavar="MODULE")
    sp.add_argument("--c", action="append", help="curvature shift (repeatable)")
    sp.add_argument("--to", default="Z/2", help="target grading group")
    sp.add_argument("--variant", choices=["homology", "cohomology"], default="homology")
    sp.add_argument("--truncate", type=int, default=None, metavar="T")
    sp.add_argument("--max-depth", type=int, default=20)
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = command("show", help="print a homology report saved with --json")
    sp.add_argument("report")
    sp.set_defaults(func=cmd_show)

    sp = command("fixtures", help="list bundled fixtures")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    if getattr(args, "cases", 0) is None:
        args.cases = 50 if args.suite == "bicomplex-identities" else 20
    try:
        return args.func(args)
    except _Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except Unsupported as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return UNSUPPORTED
    except (EngineError, CdgError) as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
