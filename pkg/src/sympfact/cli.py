"""``sympfact`` command line: JSON matrices in, verified factorizations out.

Exit codes: 0 success, 1 verification failure or no verified factorization,
2 usage, parse or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ParseError, SympFactError
from .expfact import ExpFactorization, exp_from_json, exp_to_json, group_exponentials
from .matrix import is_symplectic, matrix_from_json
from .obstruction import degree_obstruction_check, loops_csv
from .ring import QI, PolyRing, ring_from_descriptor
from .sl2fact import (DivisibilityFailure, UnitriFactorization, sl2_4factor_field,
                      sl2_4factor_poly_try, sl2_euclid_factor, unitri_from_json, unitri_to_json)
from .spfact import unitriangular_factor_sl, unitriangular_factor_sp
from .sympgen import (eval_word, expand_type_i_to_elementary, expand_type_ii_to_elementary,
                      make_factor, type_i, type_ii, word_to_json)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(SympFactError):
    pass


# --------------------------------------------------------------------------
# input
# --------------------------------------------------------------------------


def read_json(source):
    """Parse JSON from a path, ``-`` or an open file; errors carry line and column."""
    if source is None or source == "-":
        text, name = sys.stdin.read(), "<stdin>"
    elif hasattr(source, "read"):
        text, name = source.read(), getattr(source, "name", "<input>")
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {source}: {exc.strerror}") from None
        name = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{name}: line {exc.lineno} column {exc.colno} "
                         f"(char {exc.pos}): {exc.msg}") from None


def _cli_ring(args):
    """Ring forced by ``--ring``/``--vars``, or None to use the input's own descriptor."""
    kind = getattr(args, "ring", None)
    vars = getattr(args, "vars", None)
    if kind is None and vars is None:
        return None
    if kind is None:
        kind = "poly"
    if kind == "gaussian":
        if vars:
            raise UsageError("--vars only applies to --ring poly")
        return QI
    return ring_from_descriptor({"kind": "poly", "vars": vars or "z"})


def load_matrix(obj, args):
    if isinstance(obj, dict) and "matrix" in obj and "entries" not in obj:
        obj = obj["matrix"]
    return matrix_from_json(obj, _cli_ring(args))


def dump(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _count_check(args, count):
    t = getattr(args, "count_check", None)
    return t is None or count <= t


# --------------------------------------------------------------------------
# subcommands; each returns (json object, exit code)
# --------------------------------------------------------------------------


def cmd_factor_sl2(args):
    M = load_matrix(read_json(args.input), args)
    g3 = M.ring.parse(args.g3) if args.g3 is not None else None
    if isinstance(M.ring, PolyRing):
        # without --g3, also try g3 = c, which solves M = U(b) L(c) style inputs
        c = M[1, 0]
        tries = [g3] if g3 is not None else [M.ring.one] + ([c] if not c.is_zero() else [])
        for choice in tries:
            f = sl2_4factor_poly_try(M, choice)
            if not isinstance(f, DivisibilityFailure):
                break
        method = "four-factor"
        if isinstance(f, DivisibilityFailure):
            if len(M.ring.vars) != 1:
                out = {"verified": False, "method": "four-factor", "failure": f.to_json()}
                return out, EXIT_FAIL
            f, method = sl2_euclid_factor(M), "euclid"
    else:
        f, method = sl2_4factor_field(M, g3), "four-factor"
    return _factor_result(f, args, method)


def _factor_result(f: UnitriFactorization, args, method=None):
    checks = f.checks()
    ok = f.verify()
    out = unitri_to_json(f, verified=ok)
    out["count"] = f.count
    if method:
        out["method"] = method
    out["verification"] = checks
    if not _count_check(args, f.count):
        out["count_check"] = {"limit": args.count_check, "ok": False}
        ok = False
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_factor_sp(args):
    M = load_matrix(read_json(args.input), args)
    return _factor_result(unitriangular_factor_sp(M), args)


def cmd_exp_factor(args):
    M = load_matrix(read_json(args.input), args)
    symp = M.rows % 2 == 0 and is_symplectic(M)
    fact = unitriangular_factor_sp(M) if symp else unitriangular_factor_sl(M)
    e = group_exponentials(fact, trim=args.trim)
    return _exp_result(e, args, symp)


def _exp_result(e: ExpFactorization, args, symplectic=None):
    checks = e.checks(symplectic)
    ok = all(checks.values())
    out = exp_to_json(e, verified=ok)
    out["verification"] = checks
    if not _count_check(args, e.count):
        out["count_check"] = {"limit": args.count_check, "ok": False}
        ok = False
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_expand(args):
    obj = read_json(args.input)
    kind = args.type
    if isinstance(obj, dict) and "type" in obj:
        kind = obj["type"]
    if kind not in ("i", "ii"):
        raise UsageError(f"factor type must be 'i' or 'ii', got {kind!r}")
    B = load_matrix(obj, args)
    if kind == "i":
        w, factor = expand_type_i_to_elementary(B), type_i(B)
    else:
        w, factor = expand_type_ii_to_elementary(B), type_ii(B)
    ok = eval_word(w, B.ring) == make_factor(factor)
    out = word_to_json(w, B.ring)
    out["type"] = kind
    out["count"] = len(w)
    out["verified"] = ok
    if not _count_check(args, len(w)):
        out["count_check"] = {"limit": args.count_check, "ok": False}
        ok = False
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_obstruction(args):
    report = degree_obstruction_check(args.radius, args.samples)
    out = report.to_json()
    if args.csv:
        out["csv_rows"] = loops_csv(args.csv, args.radius, args.samples)
        out["csv"] = args.csv
    return out, EXIT_OK


def cmd_verify(args):
    obj = read_json(args.input)
    if not isinstance(obj, dict):
        raise ParseError("verify expects a factorization object")
    if "factors" in obj:
        f = unitri_from_json(obj)
        checks = f.checks()
        ok = f.verify()
        kind = "unitriangular"
    elif "exponents" in obj:
        e = exp_from_json(obj)
        checks = e.checks()
        ok = all(checks.values())
        kind = "exponential"
    else:
        raise ParseError("verify expects a 'factors' or 'exponents' field")
    claimed = obj.get("verified")
    out = {"kind": kind, "verified": ok, "checks": checks}
    if claimed is not None and claimed != ok:
        out["claimed"] = claimed
    return out, EXIT_OK if ok else EXIT_FAIL


def cmd_selftest(args):
    from .selftest import run_selftest

    only = set(args.only.split(",")) if args.only else None
    res = run_selftest(args.seed, args.parallel, only)
    return res, EXIT_OK if res["ok"] else EXIT_FAIL


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sympfact", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def with_input(sp, ring=True):
        sp.add_argument("input", nargs="?", default="-", help="JSON file (default: stdin)")
        if ring:
            sp.add_argument("--ring", choices=("gaussian", "poly"))
            sp.add_argument("--vars", help="comma separated polynomial variables, e.g. z,w")
        return sp

    def with_count(sp):
        sp.add_argument("--count-check", type=_positive_int, metavar="T",
                        help="fail unless the factor count is at most T")
        return sp

    sp = with_count(with_input(sub.add_parser("factor-sl2", help="four unitriangular factors of an SL2 matrix")))
    sp.add_argument("--g3", help="nonzero choice of the free parameter g3 (default 1)")
    sp.set_defaults(func=cmd_factor_sl2)

    sp = with_count(with_input(sub.add_parser("factor-sp", help="four unitriangular factors of a symplectic matrix")))
    sp.set_defaults(func=cmd_factor_sp)

    sp = with_count(with_input(sub.add_parser("exp-factor", help="product of exponentials of nilpotents")))
    sp.add_argument("--trim", action="store_true", help="drop zero exponents")
    sp.set_defaults(func=cmd_exp_factor)

    sp = with_count(with_input(sub.add_parser("expand-elementary",
                                              help="elementary word of a type i/ii symplectic factor")))
    sp.add_argument("--type", choices=("i", "ii"), default="i")
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("obstruction-demo", help="degree obstruction for the SL2 example")
    sp.add_argument("--radius", type=_positive_float, default=1.0)
    sp.add_argument("--samples", type=_positive_int, default=1024)
    sp.add_argument("--csv", metavar="PATH", help="also write the sampled loops as CSV")
    sp.set_defaults(func=cmd_obstruction)

    sp = with_input(sub.add_parser("verify", help="re-check a factorization JSON"), ring=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("selftest", help="randomized property checks over every module")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--parallel", action="store_true")
    sp.add_argument("--only", help="comma separated check names")
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        out, code = args.func(args)
    except SympFactError as exc:
        print(f"sympfact {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"sympfact {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    dump(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
