"""Command-line interface: ``censfit fit | simulate | kl``.

Reports are JSON documents carrying ``"format_version": "1"``; matrices are
nested row-major lists and parameters follow the family packing order.
Errors go to stderr as one line ``censfit: error: <kind>: <message>`` and
exit with the code listed in ``EXIT_CODES``.
"""

import argparse
import json
import os
import sys

import numpy as np

from censfit import __version__
from censfit.exceptions import (
    CensfitError,
    DimensionError,
    IdentifiabilityError,
    InitializationError,
    ParameterError,
    QuadratureError,
    ScenarioError,
    SchemaError,
)
from censfit.families import FAMILIES, get_family
from censfit.inference import infer
from censfit.io import read_csv
from censfit.kl import expected_loglik, kl_extended
from censfit.laws import CensoringLaw, CovariateLaw, QuadConfig
from censfit.optimize import FitConfig, fit
from censfit.simulation import format_table, load_scenarios, run_study

FORMAT_VERSION = "1"

EXIT_CODES = {
    "usage": 2,
    "io": 3,
    "schema": 4,
    "identifiability": 5,
    "nonconvergence": 6,
    "quadrature": 7,
    "scenario": 8,
    "initialization": 9,
    "parameter": 10,
}


class CliError(Exception):
    def __init__(self, kind, message):
        super().__init__(message)
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", f"{self.prog}: {message}")


def _vector(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=True)


def _rows(matrix):
    return [[float(v) for v in row] for row in np.asarray(matrix)]


def _floats(vec):
    return [float(v) for v in np.asarray(vec)]


def _default_threads():
    value = os.environ.get("CENSFIT_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        raise CliError("usage", f"CENSFIT_THREADS must be an integer, got {value!r}") from None


# -- fit ----------------------------------------------------------------------

def cmd_fit(args, out):
    try:
        data = read_csv(args.data, args.covariates, args.time, args.status, args.intercept)
    except OSError as exc:
        raise CliError("io", f"cannot read {args.data}: {exc.strerror or exc}") from None
    except SchemaError as exc:
        raise CliError("schema", f"{args.data}: {exc}") from None
    fam = get_family(args.family, data.p)
    config = FitConfig(
        max_iterations=args.max_iterations,
        grad_tolerance=args.grad_tolerance,
        step_tolerance=args.step_tolerance,
        init=args.init,
    )
    try:
        result = fit(fam, data, config)
    except IdentifiabilityError as exc:
        raise CliError("identifiability", str(exc)) from None
    except InitializationError as exc:
        raise CliError("initialization", str(exc)) from None
    except (ParameterError, DimensionError) as exc:
        raise CliError("parameter", str(exc)) from None
    report = infer(fam, result.theta_hat, data, level=args.level)
    doc = {
        "format_version": FORMAT_VERSION,
        "command": "fit",
        "family": fam.name,
        "n": data.n,
        "p": data.p,
        "censoring_rate": data.censoring_rate,
        "param_names": fam.param_names,
        "theta_hat": _floats(result.theta_hat),
        "loglik": float(result.loglik),
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "gradient_norm": float(result.gradient_norm),
        "message": result.message,
        "level": args.level,
        "information_ok": bool(report.ok),
        "condition_number": float(report.condition_number),
        "std_errors": _floats(report.std_errors),
        "ci_lower": _floats(report.ci_lower),
        "ci_upper": _floats(report.ci_upper),
        "sigma_hat": _rows(report.sigma_hat),
        "cov_theta": _rows(report.cov_theta),
    }
    if args.format == "json":
        out.write(_dump(doc) + "\n")
    else:
        out.write(_fit_text(doc) + "\n")
    if not result.converged:
        raise CliError("nonconvergence", f"fit did not converge: {result.message}")
    return 0


def _fit_text(doc):
    pct = int(round(100 * doc["level"]))
    lines = [
        f"family {doc['family']}, n = {doc['n']}, censoring rate {100 * doc['censoring_rate']:.1f}%",
        f"log-likelihood {doc['loglik']:.6f}, converged {doc['converged']} "
        f"after {doc['iterations']} iterations",
        f"{'':<8}{'estimate':>12}{'std.err':>12}{f'{pct}% lower':>12}{f'{pct}% upper':>12}",
    ]
    for name, est, se, lo, hi in zip(doc["param_names"], doc["theta_hat"], doc["std_errors"],
                                     doc["ci_lower"], doc["ci_upper"]):
        lines.append(f"{name:<8}{est:>12.6f}{se:>12.6f}{lo:>12.6f}{hi:>12.6f}")
    return "\n".join(lines)


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args, out):
    try:
        scenarios = load_scenarios(args.scenario)
    except OSError as exc:
        raise CliError("io", f"cannot read {args.scenario}: {exc.strerror or exc}") from None
    except ScenarioError as exc:
        raise CliError("scenario", f"{args.scenario}: key {exc.key!r}: {exc}") from None
    threads = args.threads if args.threads is not None else _default_threads()
    reports = [run_study(s, threads=threads) for s in scenarios]
    if args.format == "json":
        doc = {
            "format_version": FORMAT_VERSION,
            "command": "simulate",
            "reports": [r.to_dict() for r in reports],
        }
        out.write(_dump(doc) + "\n")
    else:
        out.write(format_table(reports) + "\n")
    return 0


# -- kl -----------------------------------------------------------------------

def _censoring_law(text):
    parts = text.split(":")
    if parts[0] == "none" and len(parts) == 1:
        return CensoringLaw.none()
    if parts[0] == "normal" and len(parts) in (2, 3):
        try:
            return CensoringLaw.normal(*(float(v) for v in parts[1:]))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(f"expected 'none' or 'normal:MEAN[:SD]', got {text!r}")


def _covariate_law(text):
    parts = text.split(":")
    try:
        if parts[0] == "intercept-uniform" and len(parts) == 3:
            return CovariateLaw.intercept_uniform(float(parts[1]), float(parts[2]))
        if parts[0] == "finite" and len(parts) in (2, 3):
            points = [[float(v) for v in pt.split(",")] for pt in parts[1].split(";")]
            weights = [float(w) for w in parts[2].split(",")] if len(parts) == 3 else None
            return CovariateLaw.finite(points, weights)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(
        "expected 'intercept-uniform:LOW:HIGH' or 'finite:X1;X2;...[:W1,W2,...]' "
        f"(points as comma-separated vectors), got {text!r}"
    )


def cmd_kl(args, out):
    if args.theta1.shape != args.theta2.shape:
        raise CliError("parameter", "theta1 and theta2 must have the same length")
    fam = get_family(args.family, args.theta1.size - 1)
    quad = QuadConfig(abs_tolerance=args.abs_tolerance, tail_cut=args.tail_cut,
                      covariate_nodes=args.nodes)
    try:
        kl, kl_err = kl_extended(fam, args.theta1, args.theta2, args.censoring,
                                 args.covariates, quad, full_output=True)
        l11, l11_err = expected_loglik(fam, args.theta1, args.theta1, args.censoring,
                                       args.covariates, quad, full_output=True)
        l12, l12_err = expected_loglik(fam, args.theta1, args.theta2, args.censoring,
                                       args.covariates, quad, full_output=True)
    except QuadratureError as exc:
        raise CliError("quadrature", f"{exc} (estimated error {exc.abserr:.3g})") from None
    except (ParameterError, DimensionError) as exc:
        raise CliError("parameter", str(exc)) from None
    doc = {
        "format_version": FORMAT_VERSION,
        "command": "kl",
        "family": fam.name,
        "theta1": _floats(args.theta1),
        "theta2": _floats(args.theta2),
        "kl": kl,
        "kl_abserr": kl_err,
        "expected_loglik_theta1": l11,
        "expected_loglik_theta1_abserr": l11_err,
        "expected_loglik_theta2": l12,
        "expected_loglik_theta2_abserr": l12_err,
    }
    out.write(_dump(doc) + "\n")
    return 0


# -- entry point --------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="censfit", description="Censored distributional regression by ML.")
    parser.add_argument("--version", action="version", version=f"censfit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_fit = sub.add_parser("fit", help="fit a family to a CSV dataset")
    p_fit.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p_fit.add_argument("--data", required=True, help="CSV file with a header row")
    p_fit.add_argument("--covariates", type=_names, default=[],
                       help="comma-separated covariate column names")
    p_fit.add_argument("--time", default="z", help="observed-time column (default: z)")
    p_fit.add_argument("--status", default="delta", help="indicator column, 1 = event (default: delta)")
    p_fit.add_argument("--intercept", action="store_true", help="prepend a constant covariate")
    p_fit.add_argument("--level", type=float, default=0.95)
    p_fit.add_argument("--init", type=_vector, default=None, help="starting theta, comma-separated")
    p_fit.add_argument("--max-iterations", type=int, default=200)
    p_fit.add_argument("--grad-tolerance", type=float, default=1e-8)
    p_fit.add_argument("--step-tolerance", type=float, default=1e-10)
    p_fit.add_argument("--format", choices=("json", "text"), default="json")
    p_fit.set_defaults(func=cmd_fit)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo study from a scenario file")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--threads", type=int, default=None,
                       help="worker processes (default: $CENSFIT_THREADS or 1)")
    p_sim.add_argument("--format", choices=("table", "json"), default="table")
    p_sim.set_defaults(func=cmd_simulate)

    p_kl = sub.add_parser("kl", help="extended Kullback-Leibler diagnostics")
    p_kl.add_argument("--family", required=True, choices=sorted(FAMILIES))
    p_kl.add_argument("--theta1", required=True, type=_vector)
    p_kl.add_argument("--theta2", required=True, type=_vector)
    p_kl.add_argument("--censoring", type=_censoring_law, default=CensoringLaw.normal(9.0, 1.0),
                      help="'none' or 'normal:MEAN[:SD]' (default: normal:9:1)")
    p_kl.add_argument("--covariates", type=_covariate_law,
                      default=CovariateLaw.intercept_uniform(-5.0, 5.0),
                      help="'intercept-uniform:LOW:HIGH' (default -5:5) or 'finite:X1;X2[:W1,W2]'")
    p_kl.add_argument("--abs-tolerance", type=float, default=1e-8)
    p_kl.add_argument("--tail-cut", type=float, default=12.0)
    p_kl.add_argument("--nodes", type=int, default=64)
    p_kl.set_defaults(func=cmd_kl)
    return parser


def _report_error(kind, message, err):
    message = " ".join(str(message).split())
    err.write(f"censfit: error: {kind}: {message}\n")
    return EXIT_CODES[kind]


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except CliError as exc:
        return _report_error(exc.kind, exc, err)
    except (ValueError, CensfitError) as exc:
        kind = "schema" if isinstance(exc, SchemaError) else "parameter"
        return _report_error(kind, exc, err)


if __name__ == "__main__":
    sys.exit(main())
