"""Command-line front end: ``heatsharp <subcommand> [flags]``.

Exit status is 0 when every verdict passes or is informational, 1 on a
failed verdict or a data error, and 2 on malformed flags.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import experiments as ex
from . import gridfn
from .constants import extremal_beta, sharp_constants
from .errors import HeatSharpError
from .exponents import Exponent
from .serialize import dumps


class UsageError(Exception):
    pass


def _exponent(text: str) -> Exponent:
    try:
        return Exponent.parse(text)
    except HeatSharpError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _float_list(text: str) -> list:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _range(args, prefix: str, default_log: bool = True) -> np.ndarray:
    lo, hi, count = (getattr(args, f"{prefix}_{k}") for k in ("min", "max", "count"))
    if not lo < hi:
        raise UsageError(f"--{prefix}-min must be < --{prefix}-max (got {lo}, {hi})")
    if count < 2:
        raise UsageError(f"--{prefix}-count must be >= 2 (got {count})")
    if getattr(args, f"{prefix}_linear", False) or not default_log:
        return np.linspace(lo, hi, count)
    return np.geomspace(lo, hi, count)


def _add_range(sp, prefix: str, lo: float, hi: float, count: int, what: str):
    sp.add_argument(f"--{prefix}-min", type=_positive, default=lo, help=f"smallest {what} (default {lo:g})")
    sp.add_argument(f"--{prefix}-max", type=_positive, default=hi, help=f"largest {what} (default {hi:g})")
    sp.add_argument(f"--{prefix}-count", type=int, default=count, help=f"number of {what} values (default {count})")
    sp.add_argument(f"--{prefix}-linear", action="store_true", help=f"space {what} values linearly, not logarithmically")


def _load_spec(text: Optional[str]):
    if text is None:
        return None
    path = Path(text)
    raw = path.read_text() if not text.lstrip().startswith("{") and path.exists() else text
    try:
        return gridfn.spec_from_json(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--spec is neither a JSON object nor a readable file: {exc}") from None


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_record(args, rec: ex.ExperimentRecord):
    _emit(args, rec.to_csv() if args.format == "csv" else rec.to_json())
    return 0 if rec.ok else 1


# -- subcommands ------------------------------------------------------------


def cmd_constants(args):
    _emit(args, dumps(sharp_constants(args.p, args.q).to_dict()))
    return 0


def cmd_verify_equality(args):
    beta = extremal_beta(args.p, args.q)
    if not isinstance(beta, float) or beta in (0.0, math.inf):
        spec = ex.extremal_family(args.p, args.q)
        sys.stderr.write(f"extremal beta is {beta}; using the stand-in power {spec.beta:g}\n")
    else:
        spec = gridfn.GaussianPowerSpec(1.0, beta)
    rec = ex.verify_sharpness_ratio(
        args.p, args.q, spec, _float_list(args.t), matched=True, method=args.method,
    )
    return _emit_record(args, rec)


def cmd_evolve(args):
    spec = _load_spec(args.spec)
    f = gridfn.sample(spec, args.x_lo, args.x_hi, args.n)
    u = gridfn.heat_evolve(f, args.t, method=args.method)
    buf = io.StringIO()
    u.to_csv(buf)
    _emit(args, buf.getvalue())
    return 0


def cmd_sharpness(args):
    spec = _load_spec(args.spec)
    rec = ex.verify_sharpness_ratio(
        args.p, args.q, spec, _range(args, "t"), matched=args.matched, method=args.method,
        tolerance=args.tolerance,
    )
    return _emit_record(args, rec)


def cmd_decay_fit(args):
    spec = _load_spec(args.spec) or ex.extremal_family(args.p, args.q)
    rec = ex.decay_slope(
        args.p, args.q, spec, args.t_min, args.t_max, args.t_count, method=args.method,
        **({"tolerance": args.tolerance} if args.tolerance is not None else {}),
    )
    return _emit_record(args, rec)


def cmd_blowup(args):
    if args.gamma < 0:
        raise UsageError("--gamma must be >= 0")
    rec = ex.blowup_ratio(args.p, args.q, ex.DecayModulus(args.gamma), _range(args, "t"))
    return _emit_record(args, rec)


def cmd_counterexample(args):
    if args.mode == "norms":
        if args.s is None:
            raise UsageError("--s is required with --mode norms")
        rec = ex.counterexample_norms(args.p, args.s, _range(args, "l"))
    else:
        xs = _range(args, "x", default_log=False) if args.x is None else _float_list(args.x)
        rec = ex.counterexample_lower_bound_check(args.p, args.t, xs, h=args.h)
    return _emit_record(args, rec)


def cmd_initial_condition(args):
    spec = _load_spec(args.spec)
    ts = sorted(_float_list(args.t), reverse=True)
    rec = ex.initial_convergence(spec, args.p, ts)
    return _emit_record(args, rec)


def cmd_pde_residual(args):
    spec = _load_spec(args.spec)
    res = gridfn.pde_residual(spec, args.t, (args.x_lo, args.x_hi), args.h, args.delta)
    ok = args.tolerance is None or res <= args.tolerance
    _emit(args, dumps({"spec": spec.to_dict(), "t": args.t, "h": args.h, "delta": args.delta,
                       "residual": res, "tolerance": args.tolerance,
                       "verdict": "pass" if ok else "fail"}))
    return 0 if ok else 1


def cmd_selftest(args):
    from .selftest import run_all

    results = run_all(out=lambda line: print(line, flush=True))
    return 0 if all(r.passed for r in results) else 1


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatsharp",
        description="Sharp L^p estimates for the one-dimensional heat equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.set_defaults(func=func)
        return sp

    def exps(sp, q_default=None):
        sp.add_argument("--p", type=_exponent, required=True, help='input exponent, e.g. "4/3" or "inf"')
        sp.add_argument("--q", type=_exponent, required=q_default is None, default=q_default,
                        help="kernel exponent; r solves 1/p + 1/q = 1 + 1/r")

    def out(sp, fmt=True):
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    def method(sp):
        sp.add_argument("--method", choices=("auto", "closed", "grid"), default="auto",
                        help="closed-form Gaussian calculus or grid quadrature")

    sp = add("constants", cmd_constants,
             "Sharp constants c_p, alpha_q, C, K, the extremal power beta and the decay exponent.")
    exps(sp)
    out(sp, fmt=False)

    sp = add("verify-equality", cmd_verify_equality,
             "Ratio rho(t) for the extremal heat-kernel power at matched time; equals 1.")
    exps(sp)
    sp.add_argument("--t", default="0.1,1,10", help="comma-separated times (default 0.1,1,10)")
    method(sp)
    out(sp)

    sp = add("evolve", cmd_evolve, "Sample a function spec and evolve it under the heat flow; CSV x,value.")
    sp.add_argument("--spec", required=True, help="FunctionSpec JSON, inline or a file path")
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--x-lo", type=float, required=True)
    sp.add_argument("--x-hi", type=float, required=True)
    sp.add_argument("--n", type=int, required=True, help="number of grid points")
    sp.add_argument("--method", choices=("direct", "fft"), default="direct")
    sp.add_argument("--output", "-o")

    sp = add("sharpness", cmd_sharpness, "Check ||f*heat_t||_r <= K ||f||_p t^(-decay) over a range of t.")
    exps(sp)
    sp.add_argument("--spec", required=True, help="FunctionSpec JSON, inline or a file path")
    sp.add_argument("--matched", action="store_true", help="re-time a gaussian_power input to each t")
    sp.add_argument("--tolerance", type=float, default=None)
    _add_range(sp, "t", 0.1, 10.0, 3, "time")
    method(sp)
    out(sp)

    sp = add("decay-fit", cmd_decay_fit, "Fit the power of t in ||f*heat_t||_r / ||f||_p.")
    exps(sp)
    sp.add_argument("--spec", help="FunctionSpec JSON (default: the extremal heat-kernel power)")
    sp.add_argument("--tolerance", type=float, default=None)
    _add_range(sp, "t", 1.0, 100.0, 9, "time")
    method(sp)
    out(sp)

    sp = add("blowup", cmd_blowup, "Operator ratio against psi(t) = t^-gamma; unbounded for faster decay.")
    exps(sp)
    sp.add_argument("--gamma", type=float, required=True)
    _add_range(sp, "t", 1e-6, 1.0, 13, "time")
    out(sp)

    sp = add("counterexample", cmd_counterexample,
             "The input x^(-1/p)/log(x)^2: divergence of lower norms, or the erf lower bound.")
    sp.add_argument("--p", type=_exponent, required=True)
    sp.add_argument("--mode", choices=("norms", "lower-bound"), default="norms")
    sp.add_argument("--s", type=_exponent, help="lower exponent s < p (norms mode)")
    _add_range(sp, "l", 1e6, 1e12, 25, "upper limit L")
    sp.add_argument("--t", type=_positive, default=1.0, help="time (lower-bound mode)")
    sp.add_argument("--x", help="comma-separated points > e (lower-bound mode)")
    _add_range(sp, "x", 50.0, 1000.0, 20, "point x")
    sp.add_argument("--h", type=_positive, default=0.01, help="grid spacing (lower-bound mode)")
    out(sp)

    sp = add("initial-condition", cmd_initial_condition, "||u_t - f||_p as t decreases to 0.")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--p", type=_exponent, required=True)
    sp.add_argument("--t", default="1e-1,1e-2,1e-3,1e-4", help="comma-separated times")
    out(sp)

    sp = add("pde-residual", cmd_pde_residual, "max |u_xx - u_t| of the evolved spec by central differences.")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--t", type=_positive, default=1.0)
    sp.add_argument("--x-lo", type=float, default=-10.0)
    sp.add_argument("--x-hi", type=float, default=10.0)
    sp.add_argument("--h", type=_positive, default=0.01)
    sp.add_argument("--delta", type=_positive, default=1e-3)
    sp.add_argument("--tolerance", type=float, default=1e-4)
    sp.add_argument("--output", "-o")

    add("selftest", cmd_selftest, "Run the full acceptance matrix and print one pass/fail line per criterion.")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except HeatSharpError as exc:
        sys.stderr.write(f"heatsharp {args.command}: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"heatsharp {args.command}: error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())
