"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure, 4 infrastructure failure during ``verify``.

Complex numbers are written ``a+bi``, ``-2.5i``, ``i*5`` or plain reals;
point grids as ``re0:re1:n,im0:im1:m``.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import constants, dirichlet, theorems
from .contour import Rectangle, locate_zeros
from .errors import XiZerosError
from .numerics import EPS, PrecisionBudget
from .profiles import CoefficientSequence, delta_coefficients, delta_sequence
from .xi import C_F, C_F_prime, EvalContext, W_F, h, xi_F
from .zerocount import (CountReport, count_report, zeros_from_csv,
                        zeros_to_csv)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC, EXIT_INFRA = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


_COMPLEX = re.compile(r"^\s*([-+]?)i\*\s*([-+]?[\d.eE+-]+)\s*$")


def parse_complex(text):
    """Parse ``a+bi``, ``bi``, ``i*b`` or ``a``."""
    m = _COMPLEX.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        try:
            return complex(0.0, sign * float(m.group(2)))
        except ValueError:
            raise UsageError(f"cannot parse complex number {text!r}") \
                from None
    t = text.strip().replace(" ", "").replace("i", "j")
    if t.endswith("j") and (t == "j" or t[-2] in "+-"):
        t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def _axis(spec):
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"bad grid axis {spec!r}; expected lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid axis {spec!r}") from None
    if n < 1:
        raise UsageError("grid axis needs n >= 1")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def parse_points(text):
    """A ``;``-separated list of complex numbers, or a grid spec."""
    if ":" in text:
        axes = text.split(",")
        if len(axes) != 2:
            raise UsageError("grid spec needs two axes: re0:re1:n,im0:im1:m")
        res, ims = _axis(axes[0]), _axis(axes[1])
        return [complex(x, y) for x in res for y in ims]
    return [parse_complex(p) for p in text.split(";") if p.strip()]


def parse_rect(text):
    try:
        vals = [float(v) for v in text.split(",")]
        if len(vals) != 4:
            raise ValueError
        return Rectangle(*vals)
    except ValueError:
        raise UsageError(f"bad rectangle {text!r}; expected s0,s1,T1,T2") \
            from None


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def resolve_F(args, config):
    """Exactly one of ``--F``, ``--F-delta``, ``--F-file`` (command line
    first, then the config file)."""
    given = [(k, getattr(args, k)) for k in ("F", "F_delta", "F_file")
             if getattr(args, k, None) is not None]
    if not given:
        given = [(k, config[k]) for k in ("F", "F_delta", "F_file")
                 if k in config]
    if len(given) != 1:
        raise UsageError("give exactly one of --F, --F-delta, --F-file")
    kind, value = given[0]
    try:
        if kind == "F":
            coeffs = json.loads(value) if isinstance(value, str) else value
            if not isinstance(coeffs, list):
                raise ValueError("--F must be a JSON array")
            return CoefficientSequence(coeffs)
        if kind == "F_delta":
            return delta_sequence(int(value))
        with open(value) as fh:
            return CoefficientSequence.from_json(fh.read())
    except (ValueError, TypeError, OSError, json.JSONDecodeError,
            OverflowError) as exc:
        raise UsageError(f"bad coefficient sequence: {exc}") from None


def resolve_budget(args, config):
    fields = dict(config.get("budget", {}))
    for name in ("abs_tol", "rel_tol", "max_evals", "t_cutoff"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    try:
        return PrecisionBudget(**fields)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad precision budget: {exc}") from None


def _context(args, config):
    return EvalContext(resolve_F(args, config), resolve_budget(args, config))


def _psi_result(F, s):
    value = complex(dirichlet.psi_F(F, s))
    noise = 8.0 * EPS * (1.0 + abs(s)) * float(dirichlet.psi_term_scale(F, s))
    return value, float(noise)


def cmd_eval(args, config, out):
    ctx = _context(args, config)
    points = parse_points(args.points)
    if not points:
        raise UsageError("no points given")
    funcs = {"xi_F": xi_F, "C_F": C_F, "W_F": W_F, "h": h}
    out.write("re_s,im_s,re_f,im_f,err_estimate\n")
    for s in points:
        if args.function == "psi_F":
            value, err = _psi_result(ctx.F, s)
        else:
            r = funcs[args.function](ctx, s)
            value, err = r.value, r.err_estimate
        out.write(f"{s.real!r},{s.imag!r},{value.real!r},{value.imag!r},"
                  f"{err!r}\n")
    return EXIT_OK


def _emit_zeros(zeros, fmt, out):
    if fmt == "json":
        rows = [{"re": z.position.real, "im": z.position.imag,
                 "multiplicity": z.multiplicity, "on_line": z.on_line,
                 "method": z.method, "residual": z.residual,
                 "trusted": z.trusted} for z in zeros]
        out.write(json.dumps({"schema": constants.SCHEMA, "zeros": rows},
                             indent=2, sort_keys=True) + "\n")
    else:
        out.write(zeros_to_csv(zeros))


def cmd_zeros(args, config, out):
    ctx = _context(args, config)
    fmt = args.output or config.get("output", "csv")
    if args.target == "psi_F_k":
        if args.rect:
            rect = parse_rect(args.rect)
        elif args.T:
            c0 = dirichlet.zero_free_strip_bound(ctx.F).c0
            rect = Rectangle(-c0, c0, -args.T, args.T)
        else:
            raise UsageError("psi_F_k needs --rect or --T")
        zeros = dirichlet.dirichlet_zeros_in_rect(ctx.F, rect, ctx.budget)
    elif args.rect:
        zeros = locate_zeros(lambda s: C_F(ctx, s), parse_rect(args.rect),
                             ctx.budget, df=lambda s: C_F_prime(ctx, s))
    else:
        if args.T is None or args.T < 2:
            raise UsageError("C_F needs --T >= 2 or --rect")
        zeros = count_report(ctx, args.T, args.beta).zeros
    _emit_zeros(zeros, fmt, out)
    return EXIT_OK


def cmd_count(args, config, out):
    if args.T < 2:
        raise UsageError("--T must be at least 2")
    if args.beta <= 0:
        raise UsageError("--beta must be positive")
    ctx = _context(args, config)
    out.write(count_report(ctx, args.T, args.beta).to_json() + "\n")
    return EXIT_OK


def _zeros_file_report(path, T, beta, F):
    try:
        with open(path) as fh:
            zeros = zeros_from_csv(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read zeros file {path}: {exc}") from None
    return CountReport.from_zeros(zeros, T, beta, F.coeffs)


def cmd_verify(args, config, out):
    ctx = _context(args, config)
    report = None
    if args.zeros_file:
        report = _zeros_file_report(args.zeros_file, args.T, args.beta, ctx.F)
    try:
        reports = theorems.run_suite(
            ctx, args.suite, T=args.T, beta=args.beta, delta=args.delta,
            Dstar=args.dstar, Dstarstar=args.dstarstar, sigma0=args.sigma0,
            report=report)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except Exception as exc:  # noqa: BLE001 - any failure is infrastructure
        sys.stderr.write(f"verify: {type(exc).__name__}: {exc}\n")
        return EXIT_INFRA
    doc = theorems.verification_document([(ctx.F.coeffs, reports)])
    out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    failed = [r for r in reports if r.applicable and not r.passed]
    return EXIT_FAIL if failed else EXIT_OK


def cmd_coeffs(args, config, out):
    if args.N < 0:
        raise UsageError("--N must be non-negative")
    out.write(json.dumps(delta_coefficients(args.N)) + "\n")
    return EXIT_OK


def _add_F(p):
    g = p.add_argument_group("coefficient sequence (exactly one)")
    g.add_argument("--F", help='JSON array, e.g. "[1,-1]" or "[[1,0],[0,2]]"')
    g.add_argument("--F-delta", dest="F_delta", type=int, metavar="N",
                   help="truncated product F^(N)")
    g.add_argument("--F-file", dest="F_file", metavar="PATH",
                   help='JSON file {"coeffs": [[re, im], ...]}')
    b = p.add_argument_group("precision budget")
    b.add_argument("--abs-tol", dest="abs_tol", type=float)
    b.add_argument("--rel-tol", dest="rel_tol", type=float)
    b.add_argument("--max-evals", dest="max_evals", type=int)
    b.add_argument("--t-cutoff", dest="t_cutoff", type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="xizeros",
        description="Zeros of approximations to the Ramanujan Xi function.")
    parser.add_argument("--print-defaults", action="store_true",
                        help="print every default constant as JSON and exit")
    parser.add_argument("--config", metavar="PATH",
                        help="JSON run configuration")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("eval", help="evaluate a function at points")
    _add_F(p)
    p.add_argument("--function", default="C_F",
                   choices=["xi_F", "C_F", "W_F", "h", "psi_F"])
    p.add_argument("--points", required=True,
                   help='"a+bi;c+di" or "re0:re1:n,im0:im1:m"')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("zeros", help="list zeros as CSV")
    _add_F(p)
    p.add_argument("--target", default="C_F", choices=["C_F", "psi_F_k"])
    p.add_argument("--T", type=float)
    p.add_argument("--rect", help="s0,s1,T1,T2")
    p.add_argument("--beta", type=float, default=constants.BETA)
    p.add_argument("--output", choices=["csv", "json"])
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("count", help="counting report as JSON")
    _add_F(p)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--beta", type=float, default=constants.BETA)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="run theorem checks")
    _add_F(p)
    p.add_argument("--suite", default="all", choices=theorems.SUITES)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=constants.BETA)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--dstar", type=float, default=0.9)
    p.add_argument("--dstarstar", type=float, default=3.0)
    p.add_argument("--sigma0", type=float, default=3.0)
    p.add_argument("--zeros-file", dest="zeros_file", metavar="PATH",
                   help="CSV from `zeros`, used instead of a fresh count")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("coeffs", help="coefficients of F^(N) as JSON")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_coeffs)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.print_defaults:
        out.write(json.dumps(constants.as_dict(), indent=2, sort_keys=True)
                  + "\n")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        config = _load_config(args.config)
        return args.func(args, config, out)
    except UsageError as exc:
        sys.stderr.write(f"xizeros: error: {exc}\n")
        return EXIT_USAGE
    except (XiZerosError, ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"xizeros: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
