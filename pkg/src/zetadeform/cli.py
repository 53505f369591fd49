"""Command-line front end.

Exit codes: 0 success or all checks passed, 1 a verification check did not
pass, 2 usage error (bad arguments or values outside a domain).

Enclosures are printed as outward-rounded decimals with a "±width" suffix;
``--format json`` gives the endpoints as "num/den" strings (outward rounded
to dyadics of 256 significant bits).  Curve CSV columns: ``x`` ("num/den"),
``lo``, ``hi`` (decimals, rounded down and up).
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import sys
from fractions import Fraction
from typing import Callable

from . import deform_map as dm
from . import fractal
from .cache import NullCache, ResultCache
from .compositions import Composition, Tail, TailSpec
from .enclosure import Enclosure
from .exact_deform import tn_exact
from .numerics import fmt_rational, parse_rational, round_down, round_up
from .series import DEFAULT_ORDER
from .verify import SUITES, Status

OUTPUT_BITS = 256


class UsageError(Exception):
    pass


def outward(enc: Enclosure, bits: int = OUTPUT_BITS) -> Enclosure:
    if enc.lo == enc.hi and enc.lo.denominator.bit_length() <= bits:
        return enc
    return Enclosure(round_down(enc.lo, bits), round_up(enc.hi, bits))


def _enc_text(enc: Enclosure) -> str:
    return json.dumps(enc.to_json(), sort_keys=True)


def _enc_parse(text: str) -> Enclosure:
    return Enclosure.from_json(json.loads(text))


def _cached(cache, key: str, compute: Callable[[], Enclosure]) -> Enclosure:
    return _enc_parse(cache.get_or_compute(key, lambda: _enc_text(outward(compute()))))


def _composition(text: str | None) -> Composition:
    try:
        return Composition.parse(text or "")
    except ValueError as exc:
        raise UsageError(f"bad composition {text!r}: {exc}") from exc


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}") from exc


def _emit_value(args, label: str, enc: Enclosure, exact: Fraction | None = None) -> None:
    if args.format == "json":
        record = {"quantity": label, **enc.to_json()}
        if exact is not None:
            record["exact"] = fmt_rational(exact)
        print(json.dumps(record, sort_keys=True))
        return
    if exact is not None:
        print(fmt_rational(exact))
    print(f"{label} in {enc.describe(args.digits)}")


def cmd_tn(args, cache) -> int:
    comp = _composition(args.k)
    if not comp.parts:
        raise UsageError("tn needs a non-empty composition (-k)")
    key = f"tn|n={args.n}|k={comp.text()}"
    value = Fraction(cache.get_or_compute(key, lambda: fmt_rational(tn_exact(args.n, comp))))
    _emit_value(args, f"T_{args.n}({comp.text()})", Enclosure.point(value), value)
    return 0


def cmd_eta(args, cache) -> int:
    spec = TailSpec(_composition(args.k), Tail.ONES if args.tail == "ones" else Tail.TWOS)
    key = f"eta|n={args.n}|t={spec.text()}|M={args.order}"
    enc = _cached(cache, key, lambda: dm.eta_tail(args.n, spec, args.order))
    _emit_value(args, f"eta_{args.n}({spec.text()})", enc)
    return 0


def cmd_fn(args, cache) -> int:
    x = _rational(args.x)
    key = f"fn|n={args.n}|x={fmt_rational(x)}|depth={args.depth}|M={args.order}"
    enc = _cached(cache, key, lambda: dm.fn_enclosure(args.n, x, args.depth, args.order))
    _emit_value(args, f"F_{args.n}({fmt_rational(x)})", enc)
    return 0


def cmd_hn(args, cache) -> int:
    if args.site is not None:
        site = dm.JumpSite.of(_composition(args.site))
    elif args.x is not None:
        site = dm.JumpSite.at(_rational(args.x))
    else:
        raise UsageError("hn needs --site or -x")
    key = f"hn|n={args.n}|site={site.composition.text()}|M={args.order}"
    enc = _cached(cache, key, lambda: dm.hn_value(args.n, site, args.order))
    _emit_value(args, f"h_{args.n}({fmt_rational(site.point)})", enc)
    return 0


def _cutoff(args) -> int:
    return args.weight_cutoff if args.weight_cutoff is not None else dm.default_weight_cutoff(args.n)


def cmd_hsum(args, cache) -> int:
    x = _rational(args.x)
    W = _cutoff(args)
    key = f"Hn|n={args.n}|x={fmt_rational(x)}|W={W}|M={args.order}"
    enc = _cached(cache, key, lambda: dm.Hn_value(args.n, x, W, args.order))
    _emit_value(args, f"H_{args.n}({fmt_rational(x)})", enc)
    return 0


def cmd_gn(args, cache) -> int:
    x = _rational(args.x)
    W = _cutoff(args)
    key = f"Gn|n={args.n}|x={fmt_rational(x)}|depth={args.depth}|W={W}|M={args.order}"
    enc = _cached(cache, key, lambda: dm.Gn_value(args.n, x, args.depth, W, args.order))
    _emit_value(args, f"G_{args.n}({fmt_rational(x)})", enc)
    return 0


def cmd_preimage(args, cache) -> int:
    y0 = _rational(args.y)
    tol = _rational(args.tol)
    res = dm.fn_preimage(args.n, y0, tol, args.order)
    if args.format == "json":
        print(json.dumps({"x": res.interval.to_json(), "reached_tol": res.reached_tol,
                          "f_left": outward(res.f_left).to_json(), "f_right": outward(res.f_right).to_json()},
                         sort_keys=True))
    else:
        print(f"x in [{fmt_rational(res.interval.lo)}, {fmt_rational(res.interval.hi)}]")
        print(f"x in {res.interval.describe(args.digits)}")
        print(f"F_{args.n}(left) in {res.f_left.describe(args.digits)}")
        print(f"F_{args.n}(right) in {res.f_right.describe(args.digits)}")
        if not res.reached_tol:
            print("tolerance not reached within the step budget")
    return 0


def _grid(args) -> list[Fraction]:
    if args.grid == "dyadic":
        if not 1 <= args.bits <= 16:
            raise UsageError("--bits must lie in 1..16")
        size = 1 << args.bits
        return [Fraction(j, size) for j in range(1, size + 1)]
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    return dm.sample_points(args.points)


def cmd_curve(args, cache) -> int:
    xs = _grid(args)
    W = _cutoff(args)
    evaluators = {
        "fn": lambda x: dm.fn_enclosure(args.n, x, args.depth, args.order),
        "hn": lambda x: dm.Hn_value(args.n, x, W, args.order),
        "gn": lambda x: dm.Gn_value(args.n, x, args.depth, W, args.order),
    }
    budget = {"fn": f"depth={args.depth}", "hn": f"W={W}", "gn": f"depth={args.depth}|W={W}"}[args.function]
    rows = []
    for x in sorted(xs):
        key = f"{args.function}-curve|n={args.n}|x={fmt_rational(x)}|{budget}|M={args.order}"
        rows.append((x, _cached(cache, key, lambda x=x: evaluators[args.function](x))))
    if args.format == "json":
        text = json.dumps([{"x": fmt_rational(x), **enc.to_json()} for x, enc in rows], sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "lo", "hi"])
        for x, enc in rows:
            lo, hi = enc.decimal(args.digits)
            writer.writerow([fmt_rational(x), lo, hi])
        text = buf.getvalue()
    _write(args.out, text)
    return 0


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def cmd_points(args, cache) -> int:
    if args.set == "cantor":
        points = fractal.cantor_points(args.m, args.depth)
    else:
        points = fractal.e2_points(args.depth)
    _write(args.out, "".join(fmt_rational(p) + "\n" for p in points))
    return 0


def cmd_dim(args, cache) -> int:
    family = fractal.E2_FAMILY if args.set == "e2" else fractal.cantor_family(args.m)
    enc = fractal.moran_solve(family, _rational(args.tol))
    if args.box:
        if args.set == "e2":
            points = fractal.e2_points(args.depth)
            eps = [Fraction(1, 2**k) for k in range(6, min(args.depth, 15))]
        else:
            points = fractal.cantor_points(args.m, args.depth)
            eps = [Fraction(1, args.m**k) for k in range(4, args.depth - 1)]
        estimate = fractal.box_count_dim(points, eps)
    if args.format == "json":
        record = {"moran": enc.to_json()}
        if args.box:
            record["box"] = json.loads(estimate.to_json())
        print(json.dumps(record, sort_keys=True))
    else:
        print(f"similarity dimension in {enc.describe(args.digits)}")
        if args.box:
            print(f"box-counting estimate {estimate.value:.6f} (stderr {estimate.stderr:.2e})")
    return 0


def _suite_kwargs(func, args) -> dict:
    params = inspect.signature(func).parameters
    kwargs = {}
    if args.n is not None:
        if "levels" in params:
            kwargs["levels"] = (args.n,)
        elif "n" in params:
            kwargs["n"] = args.n
    if args.weight is not None:
        for name in ("max_weight", "W"):
            if name in params:
                kwargs[name] = args.weight
                break
    if args.order is not None and "M" in params:
        kwargs["M"] = args.order
    return kwargs


def cmd_verify(args, cache) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        func = SUITES[name]
        reports += func(**_suite_kwargs(func, args))
    if args.format == "json":
        print(json.dumps([r.to_json() for r in reports], sort_keys=True))
    else:
        for r in reports:
            print(r.line())
    return 0 if all(r.status is Status.PASS for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zetadeform", description="Rational deformations of multiple zeta-star values.")
    parser.add_argument("--no-cache", action="store_true", help="skip the result store")
    parser.add_argument("--cache-dir", help="result store directory (default: $ZETADEFORM_CACHE_DIR or ~/.cache/zetadeform)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, level=True, order=True, fmt=("text", "json")):
        if level:
            p.add_argument("-n", type=int, default=1, help="deformation level n >= 1")
        if order:
            p.add_argument("--order", type=int, default=DEFAULT_ORDER, help="series truncation order M")
        p.add_argument("--format", choices=fmt, default=fmt[0])
        p.add_argument("--digits", type=int, default=15, help="decimal digits in previews")

    p = sub.add_parser("tn", help="exact T_n(k)")
    common(p, order=False)
    p.add_argument("-k", required=True, help="composition, e.g. 2,1,3")
    p.set_defaults(func=cmd_tn)

    p = sub.add_parser("eta", help="eta_n of prefix followed by all ones or all twos")
    common(p)
    p.add_argument("-k", default="", help="prefix composition (default empty)")
    p.add_argument("--tail", choices=("ones", "twos"), default="ones")
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("fn", help="F_n(x)")
    common(p)
    p.add_argument("-x", required=True, help="point in (0,1], e.g. 1/3")
    p.add_argument("--depth", type=int, default=dm.DEFAULT_DEPTH)
    p.set_defaults(func=cmd_fn)

    p = sub.add_parser("hn", help="jump h_n at a dyadic site")
    common(p)
    p.add_argument("--site", help="site composition k_1,...,k_r (point sum of 2^-K_j)")
    p.add_argument("-x", help="the site as a dyadic rational in (0,1)")
    p.set_defaults(func=cmd_hn)

    for name, func, help_text, depth in (("hsum", cmd_hsum, "jump part H_n(x)", False),
                                          ("gn", cmd_gn, "continuous part G_n(x)", True)):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("-x", required=True)
        p.add_argument("--weight-cutoff", type=int, help="largest site weight summed exactly")
        if depth:
            p.add_argument("--depth", type=int, default=dm.DEFAULT_DEPTH)
        p.set_defaults(func=func)

    p = sub.add_parser("preimage", help="x with F_n(x) = y")
    common(p)
    p.add_argument("-y", required=True)
    p.add_argument("--tol", default="1/1073741824")
    p.set_defaults(func=cmd_preimage)

    p = sub.add_parser("curve", help="plot data for F_n, H_n or G_n")
    common(p, fmt=("csv", "json"))
    p.add_argument("function", choices=("fn", "hn", "gn"))
    p.add_argument("--grid", choices=("sample", "dyadic"), default="sample")
    p.add_argument("--points", type=int, default=100, help="sample grid size")
    p.add_argument("--bits", type=int, default=6, help="dyadic grid j/2^bits")
    p.add_argument("--depth", type=int, default=dm.DEFAULT_DEPTH)
    p.add_argument("--weight-cutoff", type=int)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("points", help="finite truncations of a Cantor set or E_2")
    p.add_argument("set", choices=("cantor", "e2"))
    p.add_argument("-m", type=int, default=3)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("dim", help="similarity dimension, optionally with a box count")
    common(p, level=False, order=False)
    p.add_argument("set", choices=("cantor", "e2"))
    p.add_argument("-m", type=int, default=3)
    p.add_argument("--tol", default="1/1000000000000000")
    p.add_argument("--box", action="store_true")
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["all", *SUITES])
    p.add_argument("-n", type=int)
    p.add_argument("-W", "--weight", type=int, dest="weight")
    p.add_argument("--order", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is not None and args.n < 1:
        parser.error("-n must be >= 1")
    if getattr(args, "order", None) is not None and args.order < 2:
        parser.error("--order must be >= 2")
    cache = NullCache() if args.no_cache else ResultCache(args.cache_dir)
    try:
        return args.func(args, cache)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
