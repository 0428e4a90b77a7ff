"""Command-line interface: ``triangle-cf expand | constants | render``."""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .engine import (
    DEFAULT_MAX_DIGITS,
    NUMERIC_STREAM,
    PERIODIC,
    ExpansionResult,
    NotReduced,
    QuadraticInput,
    expand,
    from_quadratic,
    render_cf,
)
from .expr import ParseError, parse
from .geometry import INFINITY, BudgetExhausted, OrientedGeodesic, mobius
from .group import DIGITS, GroupElement, Word, constants, verify_constants
from .numerics import NumericReal, PrecisionExhausted, format_enclosure, precision_limit
from .tower import FElem, LElem, QuadRealElem

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_PRECISION = 4
EXIT_INPUT = 5

CONVERGENT_BITS = 80


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def _q(x: Fraction) -> str:
    return str(x)


def coeff_array(x) -> list[str]:
    return [_q(c) for c in x.coeffs]


def _point_text(p) -> str:
    if p is INFINITY:
        return "oo"
    return format_enclosure(p.enclose(CONVERGENT_BITS))


def result_document(res: ExpansionResult, n_convergents: int = 64) -> dict:
    doc = {
        "b0_word": str(res.b0.word),
        "digits": list(res.digits),
        "status": res.status,
        "preperiod": res.preperiod,
        "period": res.period,
        "unit": None,
    }
    if res.periodic:
        g = res.gamma0
        u = res.unit()
        doc["unit"] = {
            "matrix_z": coeff_array(g.z),
            "matrix_w": coeff_array(g.w),
            "word": str(g.word),
            "rho_alpha": {"a": coeff_array(u.a), "b": coeff_array(u.b), "D": coeff_array(u.D)},
        }
    n = min(len(res.digits), n_convergents)
    doc["convergents"] = [_point_text(convergent_from_B(B)) for B in res.iter_B(n)]
    return doc


def convergent_from_B(B: GroupElement):
    return mobius(B, LElem.coerce(0))


def _pretty(doc: dict) -> str:
    lines = [
        f"B0        : {doc['b0_word']}",
        f"status    : {doc['status']}",
        f"digits    : {' '.join(str(d) for d in doc['digits'])}",
    ]
    if doc["status"] == PERIODIC:
        lines.append(f"preperiod : {doc['preperiod']}")
        lines.append(f"period    : {doc['period']}")
    if doc.get("unit"):
        rho = doc["unit"]["rho_alpha"]
        a = FElem([Fraction(c) for c in rho["a"]])
        b = FElem([Fraction(c) for c in rho["b"]])
        D = FElem([Fraction(c) for c in rho["D"]])
        lines.append(f"unit      : {a} + ({b})*sqrt({D})")
        lines.append(f"gamma0    : {doc['unit']['word']}")
    if doc["convergents"]:
        k = len(doc["convergents"]) - 1
        label = f"x_reg[{k}]"
        lines.append(f"{label:<10}: {doc['convergents'][-1]}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def _build_geodesic(args) -> tuple[OrientedGeodesic, FElem | None]:
    if args.z is not None or args.w is not None:
        if args.alpha is not None:
            raise InputError("give either --alpha or --z/--w, not both")
        if args.z is None or args.w is None:
            raise InputError("--z and --w go together")
        z, w = parse(args.z), parse(args.w)
        if not isinstance(z, LElem) or not isinstance(w, LElem):
            raise InputError("--z and --w must be elements of Q(theta)")
        sign = -1 if args.sign == "-" else 1
        try:
            return from_quadratic(QuadraticInput(z, w, sign))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if args.alpha is None:
        raise InputError("need --alpha or --z/--w")
    alpha = parse(args.alpha, numeric=True)
    if args.beta is not None:
        beta = parse(args.beta, numeric=True)
    elif isinstance(alpha, QuadRealElem):
        beta = alpha.conj()
    elif isinstance(alpha, LElem) and not alpha.in_F():
        beta = alpha.conj()
    else:
        raise InputError("alpha is not quadratic over Q(eta); give --beta")
    D = alpha.D if isinstance(alpha, QuadRealElem) else None
    try:
        return OrientedGeodesic(beta, alpha), D
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def run_expand(args) -> tuple[int, dict | None, str]:
    """Returns (exit code, document or None, error message)."""
    try:
        geo, D = _build_geodesic(args)
    except ParseError as exc:
        return EXIT_PARSE, None, f"parse error: {exc}"
    except InputError as exc:
        return EXIT_INPUT, None, f"invalid input: {exc}"
    b0 = None
    if args.b0 is not None:
        try:
            b0 = Word.parse(args.b0)
        except ValueError as exc:
            return EXIT_PARSE, None, f"parse error in --b0: {exc}"
    try:
        with precision_limit(args.precision):
            res = expand(geo, max_digits=args.max_digits, b0=b0, discriminant=D)
            doc = result_document(res, args.convergents)
    except NotReduced as exc:
        return EXIT_INPUT, None, f"invalid input: {exc}"
    except BudgetExhausted as exc:
        return EXIT_BUDGET, None, f"budget exhausted: {exc}"
    except PrecisionExhausted as exc:
        partial = getattr(exc, "partial", None)
        doc = result_document(partial, args.convergents) if partial is not None else None
        if doc is not None:
            doc["status"] = "PrecisionExhausted"
        return EXIT_PRECISION, doc, f"precision exhausted: {exc}"
    if res.status in (PERIODIC, NUMERIC_STREAM):
        return EXIT_OK, doc, ""
    return EXIT_BUDGET, doc, f"no period found within {args.max_digits} digits"


def _emit(doc: dict | None, pretty: bool, out) -> None:
    if doc is None:
        return
    if pretty:
        out.write(_pretty(doc) + "\n")
    else:
        out.write(json.dumps(doc, ensure_ascii=False) + "\n")


def _batch_line(line: str) -> tuple[int, dict | None, str]:
    parser = build_parser()
    try:
        args = parser.parse_args(["expand", *shlex.split(line)])
    except SystemExit:
        return EXIT_PARSE, None, f"cannot parse batch line: {line!r}"
    return run_expand(args)


def cmd_expand(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if args.batch:
        with open(args.batch, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_batch_line, lines))
        code = EXIT_OK
        for (c, doc, msg), line in zip(results, lines):
            if msg:
                err.write(f"{line}: {msg}\n")
            _emit(doc if doc is not None else {"error": msg, "input": line}, args.pretty and doc is not None, out)
            code = max(code, c)
        return code
    code, doc, msg = run_expand(args)
    _emit(doc, args.pretty, out)
    if msg:
        err.write(msg + "\n")
    if args.render_cf and doc is not None and doc["digits"]:
        out.write(render_cf(_cf_digits(doc), latex=args.render_cf == "latex") + "\n")
    return code


def _cf_digits(doc: dict, periods: int = 3) -> list[int]:
    """Digits shown by --render-cf: the preperiod then a few periods."""
    digits = doc["digits"]
    if doc["status"] != PERIODIC:
        return digits
    k0, l0 = doc["preperiod"], doc["period"]
    return digits[:k0] + digits[k0 : k0 + l0] * periods


def constants_document() -> dict:
    K = constants()
    rows = {}
    for i in DIGITS:
        a, b, c = K[i]
        rows[str(i)] = {"a": str(a), "b": str(b), "c": str(c)}
    return {"constants": rows, "checks": verify_constants()}


def cmd_constants(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    doc = constants_document()
    if args.pretty:
        for i, row in doc["constants"].items():
            out.write(f"i={i:>2}  a={row['a']}\n      b={row['b']}\n      c={row['c']}\n")
        for name, ok in doc["checks"].items():
            out.write(f"{name}: {'pass' if ok else 'FAIL'}\n")
    else:
        out.write(json.dumps(doc) + "\n")
    return EXIT_OK if all(doc["checks"].values()) else 1


def cmd_render(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    from .render import render_svg

    try:
        geo, D = _build_geodesic(args)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except InputError as exc:
        err.write(f"invalid input: {exc}\n")
        return EXIT_INPUT
    b0 = args.b0
    try:
        with precision_limit(args.precision):
            budget = args.tiles if isinstance(geo.alpha, NumericReal) else args.max_digits
            res = expand(geo, max_digits=budget, b0=b0, discriminant=D)
            svg = render_svg(res, args.tiles)
    except (BudgetExhausted, PrecisionExhausted, NotReduced, IndexError) as exc:
        err.write(f"cannot render: {exc}\n")
        return EXIT_BUDGET if isinstance(exc, (BudgetExhausted, IndexError)) else EXIT_PRECISION
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(svg)
        except OSError as exc:
            err.write(f"cannot write {args.out}: {exc}\n")
            return EXIT_INPUT
    else:
        out.write(svg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", help="attracting endpoint (exact, or numeric with e, pi, decimals)")
    p.add_argument("--beta", help="repelling endpoint (default: Galois conjugate of alpha)")
    p.add_argument("--z", help="z of the quadratic input (element of Q(theta))")
    p.add_argument("--w", help="w of the quadratic input (element of Q(theta))")
    p.add_argument("--sign", choices=["+", "-"], default="+", help="root of the quadratic input taken as alpha")
    p.add_argument("--max-digits", type=int, default=DEFAULT_MAX_DIGITS)
    p.add_argument("--precision", type=int, default=None, help="precision ceiling in bits for sign decisions")
    p.add_argument("--b0", default=None, help='starting element as a word, e.g. "g7^2 g2 g7^-2"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triangle-cf", description="Geodesic continued fractions for the (2,3,7) triangle group.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="expand a geodesic")
    _add_input_flags(p)
    p.add_argument("--pretty", action="store_true", help="human-readable output")
    p.add_argument("--batch", help="file with one set of expand flags per line")
    p.add_argument("--convergents", type=int, default=64, help="number of regularized convergents to print")
    p.add_argument("--render-cf", choices=["text", "latex"], help="also print the continued fraction")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("constants", help="the digit constants a_i, b_i, c_i")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("render", help="SVG picture of the expansion")
    _add_input_flags(p)
    p.add_argument("--tiles", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
