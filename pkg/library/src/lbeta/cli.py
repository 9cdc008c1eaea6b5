"""
The `lbeta` command.

Every subcommand prints one JSON object on stdout, with the parameters that
produced it under "metadata". Logs and error messages go to stderr.

Exit codes: 0 success, 1 self-test failures, 2 usage or precondition errors,
3 IO errors, 4 numeric failures.

Example::

    lbeta context --lambda 1.5
    lbeta code --tau 7 --x 2.5 --n 32
    lbeta --log-level debug beta --lambda 0.70710678
    lbeta scan --tau-min 10.5 --tau-max 11 --step 0.05 --out curve.csv
    lbeta selftest --quick
"""

import argparse
import json
from pathlib import Path
import sys
from typing import Any, Callable, Dict, List, Optional

import mpmath

from lbeta.beta_shift import BetaContext
from lbeta.cf_expansion import expand_x
from lbeta.correspondence import DEFAULT_TOL, beta_of_lambda, lambda_of_beta, phi
from lbeta.errors import LbetaError
from lbeta.lambda_dynamics import (
    LambdaContext,
    build_context,
    code_orbit,
    lambda_from_tau,
)
from lbeta.logs import is_debug, log, log_method, update_filters
from lbeta.numerics import NumericContext, as_real
from lbeta.scan import ScanConfig, is_strictly_increasing, run_scan, save_csv
from lbeta.selftest import run_selftest
from lbeta.track import (
    jsonable,
    metadata,
    track_numeric_context,
    track_param,
    track_params,
    tracking_context,
)
from lbeta.words import CodeSeq

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_IO = 3

OMEGA_PREFIX_LEN = 12

Handler = Callable[[argparse.Namespace, NumericContext], Dict[str, Any]]


###
# Shared helpers
###


def _context(args: argparse.Namespace, nctx: NumericContext) -> LambdaContext:
    if args.lam is not None:
        lam = args.lam
    else:
        lam = lambda_from_tau(args.tau, nctx)
    return build_context(lam, nctx)


def _horizon(args: argparse.Namespace, nctx: NumericContext) -> int:
    if args.n is not None:
        return args.n
    track_param("n", nctx.horizon_default)
    return nctx.horizon_default


def _beta_summary(bctx: BetaContext) -> Dict[str, Any]:
    return {
        "beta": bctx.beta,
        "omega_prefix": str(CodeSeq(bctx.o_one.take(OMEGA_PREFIX_LEN))),
        "periodic": bctx.o_one.periodic,
        "period": bctx.o_one_period,
        "entropy": mpmath.log(bctx.beta),
    }


###
# Subcommands
###


def cmd_context(args, nctx):
    ctx = _context(args, nctx)
    return {
        "lambda": ctx.lam,
        "theta": ctx.theta,
        "i_lambda": ctx.i_lambda,
        "breakpoints": ctx.breakpoints,
        "ell_lambda": ctx.ell_lambda,
        "degenerate": ctx.degenerate,
        "p_values": ctx.p_values,
    }


def cmd_code(args, nctx):
    ctx = _context(args, nctx)
    code = code_orbit(ctx, args.x, _horizon(args, nctx))
    return {
        "digits": code.digits,
        "confidence": code.confidence,
        "period_start": code.period_start,
        "period_length": code.period_length,
    }


def cmd_expand(args, nctx):
    ctx = _context(args, nctx)
    expansion = expand_x(ctx, args.x, _horizon(args, nctx))
    return {
        "cf": expansion.cf.digits,
        "cf_alternating": expansion.cf.alternating(),
        "convergents": [
            {
                "cf_prefix_len": c.cf_prefix_len,
                "value": c.value,
                "cylinder_width": c.cylinder_width,
                "code_len": c.code_len,
            }
            for c in expansion.convergents
        ],
        "residual_bound": expansion.residual_bound,
        "finite": expansion.finite,
    }


def cmd_beta(args, nctx):
    ctx = _context(args, nctx)
    bctx = beta_of_lambda(ctx, args.tol)
    with nctx.workprec():
        return {"lambda": ctx.lam, **_beta_summary(bctx)}


def cmd_lambda(args, nctx):
    lam = lambda_of_beta(args.beta, args.tol, nctx)
    bctx = beta_of_lambda(build_context(lam, nctx), args.tol)
    with nctx.workprec():
        return {"lambda": lam, **_beta_summary(bctx)}


def cmd_phi(args, nctx):
    ctx = _context(args, nctx)
    bctx = beta_of_lambda(ctx, args.tol)
    value = phi(ctx, bctx, args.x, _horizon(args, nctx))
    return {"t": value.t, "tail_bound": value.tail_bound, "beta": bctx.beta}


def _scan_tol(value: str, nctx: NumericContext):
    with nctx.workprec():
        return as_real(value, "tol")


def cmd_scan(args, nctx):
    options = dict(
        tau_min=args.tau_min,
        tau_max=args.tau_max,
        step=args.step,
        tol=float(_scan_tol(args.tol, nctx)),
        precision_bits=nctx.precision_bits,
    )
    if args.workers is not None:
        options["workers"] = args.workers
    config = ScanConfig(**options)
    points = track_params(run_scan, prefix="scan")(config=config)
    save_csv(points, args.out)
    betas = [point.beta for point in points]
    return {
        "out": str(args.out),
        "rows": len(points),
        "monotone": is_strictly_increasing(points, config.tol, nctx),
        "beta_min": min(betas),
        "beta_max": max(betas),
    }


def cmd_selftest(args, nctx):
    report = track_params(run_selftest, prefix="selftest", ignore=["nctx"])(
        nctx=nctx, quick=args.quick, seed=args.seed
    )
    return report.to_dict()


###
# Parser
###


def _global_options(parser: argparse.ArgumentParser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--precision-bits",
        type=int,
        default=default,
        help="Working precision in bits (default: $LB_PRECISION_BITS or 192)",
    )
    parser.add_argument(
        "--log-level",
        action="append",
        default=argparse.SUPPRESS if suppress else [],
        metavar="SPEC",
        help="Log filter such as 'debug' or 'lbeta.scan:debug', repeatable",
    )


def _parameter_options(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--lambda", dest="lam", type=str, help="The parameter λ in (0, 2)")
    group.add_argument("--tau", type=str, help="Set λ = 2cos(π/τ), τ > 2")


def _tol_option(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--tol", type=str, default=str(DEFAULT_TOL), help="Target accuracy of β"
    )


def _orbit_options(parser: argparse.ArgumentParser):
    parser.add_argument("--x", type=str, required=True, help="Point of [0, ∞)")
    parser.add_argument("--n", type=int, default=None, help="Horizon (default 128)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lbeta",
        description="λ-continued fractions and the β-shift they correspond to",
    )
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(name: str, handler: Handler, help: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help)
        sub.set_defaults(handler=log_method(exit=False)(handler))
        return sub

    sub = add("context", cmd_context, "Breakpoints and branches of T_λ")
    _parameter_options(sub)

    sub = add("code", cmd_code, "Coding of the T_λ orbit of x")
    _parameter_options(sub)
    _orbit_options(sub)

    sub = add("expand", cmd_expand, "λ-continued fraction of x and its convergents")
    _parameter_options(sub)
    _orbit_options(sub)

    sub = add("beta", cmd_beta, "β(λ) and the expansion of ∞")
    _parameter_options(sub)
    _tol_option(sub)

    sub = add("lambda", cmd_lambda, "The λ with β(λ) = β")
    sub.add_argument("--beta", type=str, required=True, help="A base β > 1")
    _tol_option(sub)

    sub = add("phi", cmd_phi, "The conjugacy φ_λ(x)")
    _parameter_options(sub)
    _orbit_options(sub)
    _tol_option(sub)

    sub = add("scan", cmd_scan, "Write the curve τ -> β(2cos(π/τ)) as CSV")
    sub.add_argument("--tau-min", type=float, required=True)
    sub.add_argument("--tau-max", type=float, required=True)
    sub.add_argument("--step", type=float, required=True)
    sub.add_argument("--workers", type=int, default=None, help="Default: CPU count")
    sub.add_argument("--out", type=Path, required=True, help="CSV file to write")
    _tol_option(sub)

    sub = add("selftest", cmd_selftest, "Run the invariant checks")
    sub.add_argument("--quick", action="store_true", help="Run the fast subset")
    sub.add_argument("--seed", type=int, default=0)

    return parser


def _numeric_context(args: argparse.Namespace) -> NumericContext:
    bits = args.precision_bits
    if args.command == "selftest" and bits is not None and bits < 64:
        return NumericContext.degraded(bits)
    if bits is None:
        return NumericContext()
    return NumericContext(precision_bits=bits)


def _track_arguments(args: argparse.Namespace):
    for key, value in sorted(vars(args).items()):
        if key in ("handler", "log_level", "precision_bits") or value is None:
            continue
        track_param("lambda" if key == "lam" else key, value)


def _report(err: Exception):
    if is_debug():
        log.opt(exception=err).error(f"{type(err).__name__}: {err}")
    else:
        log.error(f"{type(err).__name__}: {err}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)

    if args.log_level:
        update_filters(args.log_level)

    with tracking_context():
        try:
            nctx = _numeric_context(args)
            track_numeric_context(nctx)
            _track_arguments(args)
            payload = args.handler(args, nctx)
        except LbetaError as err:
            _report(err)
            return err.exit_code
        except OSError as err:
            _report(err)
            return EXIT_IO

        payload["metadata"] = metadata()
        print(json.dumps(jsonable(payload), indent=2))

    if payload.get("passed") is False:
        return EXIT_CHECKS_FAILED
    return EXIT_OK


def cli():
    sys.exit(main())
