"""Command-line front end.

Every subcommand prints plain text by default and a deterministic JSON
document with ``--json``.  Exit codes: 0 success, 2 input error, 3 numeric
ambiguity (flagged points or classification diagnostics).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from pathlib import Path

from .classify import classify_skew, converse_fiber_test, multiplier_rationality_report
from .dickson import dickson, dickson_specialize, identity_suite
from .numerics import ToleranceContext, format_scalar
from .parser import ParseError, ast_to_json, parse_ast, parse_map, parse_poly, parse_scalar
from .poly import to_text
from .ritt import decompose_special_chain, solve_affine_chain
from .roots import RootFindingError
from .skewdyn import (
    DegreeCapExceeded,
    SkewProduct,
    base_periodic_points,
    fiber_iterate,
    fiber_periodic_points,
    verify_semiconjugacy,
)

PRECISION_ENV = "SKEWSPECIAL_PRECISION"
EXIT_OK, EXIT_INPUT, EXIT_AMBIGUOUS = 0, 2, 3


class InputError(ValueError):
    pass


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV, "256")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--precision", type=int, default=None, help=f"bits (default ${PRECISION_ENV} or 256)")
    p.add_argument("--eps-eq", type=float, default=None)
    p.add_argument("--eps-root", type=float, default=None)
    p.add_argument("--degree-cap", type=int, default=1024)
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")
    p.add_argument("--echo-ast", action="store_true", help="include the parsed input AST")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="skewspecial", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dickson", parents=[common], help="print D_d(x, a)")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--a", "--at", dest="a", default=None, help="specialize the parameter, e.g. --at a=1")
    s.add_argument("--check-identities", action="store_true", help="also run the identity suite up to this degree")

    s = sub.add_parser("decompose", parents=[common], help="shift/parameter data of a special chain")
    s.add_argument("--factors", required=True, help="file with one factor per line, or ';'-separated factors; innermost first")
    s.add_argument("--against", default=None, help="second chain: solve for the linking affine maps")

    s = sub.add_parser("iterate", parents=[common], help="fiber iterate Q_z^n")
    s.add_argument("--map", required=True)
    s.add_argument("--z", required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("periodic", parents=[common], help="base periodic points")
    s.add_argument("--map", required=True)
    s.add_argument("--max-period", type=int, required=True)
    s.add_argument("--fibers", action="store_true", help="also list fiber periodic points")

    s = sub.add_parser("multipliers", parents=[common], help="multiplier pairs of periodic points")
    s.add_argument("--map", required=True)
    s.add_argument("--max-period", type=int, required=True)

    s = sub.add_parser("classify", parents=[common], help="decide specialness")
    s.add_argument("--map", required=True)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--converse-check", type=int, default=0, metavar="N")
    s.add_argument("--rationality", type=int, default=0, metavar="N")
    s.add_argument("--denominator-bound", type=int, default=10**4)

    s = sub.add_parser("verify-identities", parents=[common], help="exact Dickson identity suite")
    s.add_argument("--max-degree", type=int, default=12)

    s = sub.add_parser("semiconjugacy", parents=[common], help="check f^N o Pi = Pi o g^N")
    s.add_argument("--map", required=True)
    s.add_argument("--pi", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--n", type=int, default=1)
    return parser


def _context(args) -> ToleranceContext:
    bits = args.precision if args.precision is not None else _default_precision()
    try:
        return ToleranceContext(args.mode, bits, args.eps_eq, args.eps_root, args.degree_cap)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _config(ctx: ToleranceContext) -> dict:
    return {
        "mode": ctx.mode,
        "precision_bits": ctx.precision_bits,
        "eps_eq": ctx.eps_eq,
        "eps_root": ctx.eps_root,
        "degree_cap": ctx.degree_cap,
    }


def _read_map_text(arg: str) -> str:
    path = Path(arg)
    if not arg.lstrip().startswith("(") and path.is_file():
        return path.read_text().strip()
    return arg


def _skew(arg: str, ctx: ToleranceContext) -> tuple[SkewProduct, str]:
    text = _read_map_text(arg)
    return SkewProduct.from_map(parse_map(text, ctx)), text


# handlers -----------------------------------------------------------------


def _cmd_dickson(args, ctx):
    if args.degree < 0:
        raise InputError("degree must be nonnegative")
    if args.a is None:
        a = None
        text = to_text(dickson(args.degree))
    else:
        raw = args.a.split("=", 1)[1] if args.a.strip().startswith("a=") else args.a
        a = parse_scalar(raw, ctx)
        text = to_text(dickson_specialize(args.degree, a, "x"))
    doc = {"degree": args.degree, "a": None if a is None else format_scalar(a), "polynomial": text}
    if args.check_identities:
        checks = identity_suite(max(args.degree, 1), max_product=args.degree**2, laurent_max=args.degree)
        failures = [c for c in checks if not c.ok]
        doc["identities"] = {"checked": len(checks), "failures": len(failures)}
        text += f"\n{len(checks)} identities checked, {len(failures)} failures"
    return doc, text, EXIT_OK


def _split_factors(raw: str, ctx):
    path = Path(raw)
    if ";" not in raw and path.is_file():
        parts = path.read_text().splitlines()
    else:
        parts = raw.split(";")
    return [parse_poly(part, ctx, ("x",)) for part in parts if part.strip()]


def _cmd_decompose(args, ctx):
    F = _split_factors(args.factors, ctx)
    if args.against:
        G = _split_factors(args.against, ctx)
        maps = solve_affine_chain(F, G, ctx)
        doc = {
            "linked": maps is not None,
            "maps": None if maps is None else [
                {"slope": format_scalar(A.slope), "intercept": format_scalar(A.intercept)} for A in maps
            ],
        }
        text = "no linking maps" if maps is None else "\n".join(
            f"A_{j + 1}(x) = {to_text(A.as_poly('x'))}" for j, A in enumerate(maps)
        )
        return doc, text, EXIT_OK
    data = decompose_special_chain(F, ctx)
    if data is None:
        doc = {"special": False, "verified": False, "case": None, "c": None, "l": None, "residual": None}
        return doc, "not a special chain", EXIT_OK
    doc = {
        "special": True,
        "verified": True,
        "case": data.case,
        "c": [format_scalar(v) for v in data.c],
        "l": [format_scalar(v) for v in data.l],
        "residual": data.residual,
    }
    text = f"{data.case}: c = {doc['c']}, l = {doc['l']}"
    return doc, text, EXIT_OK


def _cmd_iterate(args, ctx):
    f, _ = _skew(args.map, ctx)
    z0 = parse_scalar(args.z, ctx)
    if args.n < 1:
        raise InputError("--n must be at least 1")
    Q = fiber_iterate(f, z0, args.n, ctx)
    text = to_text(Q)
    return {"z0": format_scalar(z0), "n": args.n, "fiber_iterate": text}, text, EXIT_OK


def _point_doc(pt, ctx) -> dict:
    loc = pt.location
    return {
        "point": [format_scalar(v) for v in loc] if isinstance(loc, tuple) else [format_scalar(loc)],
        "period": pt.period,
        "multipliers": [format_scalar(m) for m in pt.multipliers],
        "residual": pt.residual,
        "multiplicity": pt.multiplicity,
        "ambiguous": pt.ambiguous,
        "precision_bits": ctx.as_float().precision_bits,
    }


def _periodic_points(f, N, ctx, fibers: bool):
    out = []
    for n in range(1, N + 1):
        for pt in base_periodic_points(f, n, ctx):
            if fibers:
                out.extend(fiber_periodic_points(f, pt, ctx))
            else:
                out.append(pt)
    return out


def _points_result(points, ctx):
    docs = [_point_doc(p, ctx) for p in points]
    text = "\n".join(
        f"period {d['period']}: {', '.join(d['point'])}  multipliers {', '.join(d['multipliers'])}"
        + ("  [ambiguous]" if d["ambiguous"] else "")
        for d in docs
    )
    code = EXIT_AMBIGUOUS if any(p.ambiguous for p in points) else EXIT_OK
    return docs, text, code


def _cmd_periodic(args, ctx):
    f, _ = _skew(args.map, ctx)
    return _points_result(_periodic_points(f, args.max_period, ctx, args.fibers), ctx)


def _cmd_multipliers(args, ctx):
    f, _ = _skew(args.map, ctx)
    return _points_result(_periodic_points(f, args.max_period, ctx, True), ctx)


def _cmd_classify(args, ctx):
    f, _ = _skew(args.map, ctx)
    c = classify_skew(f, ctx, exhaustive=args.exhaustive)
    doc = c.to_dict()
    doc["config"] = _config(ctx)
    lines = [f"regular: {c.regular}", f"kind: {c.kind}"]
    if c.base_form:
        lines.append(f"base: {c.base_form}")
    if c.fiber_form:
        lines.append(f"fiber: {c.fiber_form}")
    if c.kind == "dagger2":
        lines.append(f"zeta = {format_scalar(c.zeta)}, m = {c.m}")
    if c.phi is not None:
        lines.append(f"phi = {to_text(c.phi)}")
    if c.failing_step:
        lines.append(f"failed at: {c.failing_step}")
    if c.normal_form is not None:
        lines.append(f"normal form: {c.normal_form}")
    if args.converse_check:
        if c.special:
            r = converse_fiber_test(f, args.converse_check, ctx, c)
            doc["converse"] = {"passed": r.passed, "max_residual": r.max_residual, "points": r.points}
            lines.append(f"converse check (N={args.converse_check}): {'pass' if r.passed else 'FAIL'}")
        else:
            doc["converse"] = None
    if args.rationality:
        r = multiplier_rationality_report(f, args.rationality, ctx, args.denominator_bound)
        doc["rationality"] = {
            "heuristic": True,
            "all_rational": r.all_rational,
            "denominator_bound": r.denominator_bound,
            "entries": r.entries,
        }
        lines.append(f"multiplier rationality (HEURISTIC, N={args.rationality}): all_rational={r.all_rational}")
    return doc, "\n".join(lines), EXIT_AMBIGUOUS if c.ambiguous else EXIT_OK


def _cmd_verify_identities(args, ctx):
    checks = identity_suite(args.max_degree, max_product=3 * args.max_degree, laurent_max=min(10, args.max_degree))
    failures = [c for c in checks if not c.ok]
    doc = {
        "checked": len(checks),
        "failures": [{"name": c.name, "params": list(c.params)} for c in failures],
    }
    text = f"{len(checks)} identities checked, {len(failures)} failures"
    return doc, text, EXIT_OK


def _cmd_semiconjugacy(args, ctx):
    f = parse_map(_read_map_text(args.map), ctx)
    Pi = parse_map(_read_map_text(args.pi), ctx, ("u", "v"))
    g = parse_map(_read_map_text(args.g), ctx, ("u", "v"))
    r = verify_semiconjugacy(f, Pi, g, args.n, ctx)
    doc = {"holds": r.holds, "residual": r.residual, "difference": str(r.difference)}
    return doc, f"holds: {r.holds}\ndifference: {r.difference}", EXIT_OK


HANDLERS = {
    "dickson": _cmd_dickson,
    "decompose": _cmd_decompose,
    "iterate": _cmd_iterate,
    "periodic": _cmd_periodic,
    "multipliers": _cmd_multipliers,
    "classify": _cmd_classify,
    "verify-identities": _cmd_verify_identities,
    "semiconjugacy": _cmd_semiconjugacy,
}


def _inputs_ast(args) -> dict:
    out = {}
    for name in ("map", "pi", "g"):
        raw = getattr(args, name, None)
        if raw is not None:
            out[name] = ast_to_json(parse_ast(_read_map_text(raw)))
    return out


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        ctx = _context(args)
        doc, text, code = HANDLERS[args.command](args, ctx)
        if args.echo_ast:
            ast = _inputs_ast(args)
            if isinstance(doc, dict):
                doc["ast"] = ast
            else:
                doc = {"points": doc, "ast": ast}
            text = json.dumps(ast, sort_keys=True) + "\n" + text
    except (ParseError, InputError, DegreeCapExceeded, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except RootFindingError as exc:
        print(f"numeric error: {exc}", file=stderr)
        return EXIT_AMBIGUOUS
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps(doc, sort_keys=True, indent=2), file=stdout)
    else:
        print(text, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
