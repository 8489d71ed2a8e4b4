"""Command-line front end: constants, density, charsum, verify and bias reports."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from .bias import bias_builder
from .charsums import Q_exact
from .config_loader import DEFAULT_CONFIG, load_runtime_config
from .config_schema import RuntimeConfig
from .constants import constants_report, pnt_sum_coefficient
from .density import compare_report, gamma_term, gamma_term_imaginary_residual
from .errors import DomainError, NumericError, ResourceCapError
from .families import family_by_name, make_weight, scale_family, validate_and_residues
from .reports import render_csv, render_json
from .testfunctions import make_test_function
from .utils import default_threads, parse_float_list, parse_int_list
from .verify import verify_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_RESOURCE_CAP = 3
EXIT_NUMERIC = 4
EXIT_USAGE = 64

# run-only flags, excluded from the embedded config
_RUN_ONLY_FLAGS = ("config", "threads", "out", "log_level", "format")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_congruence(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=int, default=1, help="Odd congruence modulus")
    parser.add_argument("--a0", type=int, default=1, help="Residue of a modulo q")
    parser.add_argument("--b0", type=int, default=1, help="Residue of b modulo q")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="elliptic-density", description="Lower-order terms in 1-level densities of elliptic curve families")
    parser.add_argument("--config", type=Path, action="append", default=[], help="Override YAML path; repeatable")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (default: CPU count)")
    parser.add_argument("--format", choices=("json", "csv"), default="json", help="Report format")
    parser.add_argument("--out", type=Path, default=None, help="Write the report here instead of stdout")
    parser.add_argument("--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    constants = commands.add_parser("constants", help="All lower-order constants for a family")
    constants.add_argument("--family", required=True, choices=("f1", "f2"))
    _add_congruence(constants)
    constants.add_argument("--P", type=int, help="Prime-sum truncation")
    constants.add_argument("--PQ", type=int, help="Character-sum prime truncation")
    constants.add_argument("--Lmax", type=int, help="Q-series truncation")
    constants.add_argument("--T", type=int, help="R-integral upper limit")
    constants.add_argument("--quad-tol", type=float, help="Weight quadrature tolerance")

    density = commands.add_parser("density", help="Empirical family density against the prediction")
    density.add_argument("--family", required=True, choices=("f1", "f2"))
    density.add_argument("--X", type=float, required=True)
    density.add_argument("--rho", type=float, default=None)
    density.add_argument("--kind", choices=("fejer", "cosine_sq"), default=None)
    _add_congruence(density)
    density.add_argument("--method", choices=("auto", "tables", "direct"), default="auto")

    charsum = commands.add_parser("charsum", help="Exact complete character sum Q(p^nu)")
    charsum.add_argument("--family", required=True, choices=("f1", "f2"))
    charsum.add_argument("--p", type=int, required=True)
    charsum.add_argument("--nu", type=int, required=True)

    verify = commands.add_parser("verify", help="Convergence checks along an X grid")
    verify.add_argument("--family", required=True, choices=("f1", "f2"))
    _add_congruence(verify)
    verify.add_argument("--grid", type=parse_float_list, default=None, help="Comma-separated X values")
    verify.add_argument("--primes", type=parse_int_list, default=None, help="Comma-separated odd primes")

    bias = commands.add_parser("bias", help="Biased congruence family from extremal a_p choices")
    bias.add_argument("--family", required=True, choices=("f1", "f2"))
    bias.add_argument("--n", type=int, required=True)
    bias.add_argument("--sign", choices=("plus", "minus"), required=True)
    return parser


def _dotlist(args: argparse.Namespace) -> dict[str, Any]:
    updates: dict[str, Any] = {}
    if args.command == "constants":
        for flag, key in (("P", "P"), ("PQ", "P_Q"), ("Lmax", "L_max"), ("T", "T"), ("quad_tol", "quad_tol")):
            value = getattr(args, flag)
            if value is not None:
                updates[f"truncation.{key}"] = value
    if args.command == "verify":
        if args.grid is not None:
            updates["grid.X"] = args.grid
        if args.primes is not None:
            updates["grid.divisibility_primes"] = args.primes
    return updates


def _effective_config(args: argparse.Namespace, config: RuntimeConfig) -> dict[str, Any]:
    arguments = {key: value for key, value in vars(args).items() if key not in _RUN_ONLY_FLAGS}
    return {"arguments": arguments, "runtime": config}


def _run_constants(args: argparse.Namespace, config: RuntimeConfig, threads: int) -> tuple[Any, dict[str, Any]]:
    family = family_by_name(args.family)
    report = constants_report(
        family,
        args.q,
        args.a0,
        args.b0,
        make_weight(config.weight),
        config.truncation,
        config.caps.charsum_prime_cap,
        tail_constant=config.theta.tail_constant,
        threads=threads,
        segment_size=config.theta.segment_size,
    )
    results = {
        "constants": report,
        "c_sum": report.c_sum,
        "d_sum": report.d_sum,
        "lower_order_sum": report.lower_order_sum,
    }
    return results, report.diagnostics


def _run_density(args: argparse.Namespace, config: RuntimeConfig, threads: int) -> tuple[Any, dict[str, Any]]:
    family = family_by_name(args.family)
    params = validate_and_residues(family, args.q, args.a0, args.b0)
    scaled = scale_family(params, args.X, make_weight(config.weight))
    test = make_test_function(
        args.kind or config.density.default_kind,
        args.rho if args.rho is not None else config.density.default_rho,
        family.support_bound,
    )
    tol = config.density.gamma_quad_tol
    periods = config.density.tail_cutoff_periods
    weight = scaled.weight
    constants = constants_report(
        family,
        args.q,
        args.a0,
        args.b0,
        weight,
        config.truncation,
        config.caps.charsum_prime_cap,
        tail_constant=config.theta.tail_constant,
        threads=threads,
        segment_size=config.theta.segment_size,
    )
    # direct evaluation is capped to the first curves of the family
    limit = config.caps.direct_sample_size if args.method == "direct" else None
    report = compare_report(
        scaled,
        test,
        config.truncation,
        constants,
        method=args.method,
        limit=limit,
        threads=threads,
        cap=config.caps.charsum_prime_cap,
        quad_tol=tol,
        cutoff_periods=periods,
    )
    term_gamma = gamma_term(scaled.X, test, tol, periods)
    # finite-X coefficients that the c2 and c4 terms of the prediction approximate
    diagnostics = {
        "term_gamma": term_gamma,
        "term_gamma_imaginary": gamma_term_imaginary_residual(scaled.X, test, tol, periods),
        "gamma_coefficient": term_gamma * scaled.log_X,
        "pnt_sum_coefficient": pnt_sum_coefficient(family, test, scaled.log_X),
    }
    return report, diagnostics


def _run_charsum(args: argparse.Namespace, config: RuntimeConfig, threads: int) -> tuple[Any, dict[str, Any]]:
    family = family_by_name(args.family)
    moment = Q_exact(family, args.p, args.nu, config.caps.charsum_prime_cap, config.caps.max_moment_order)
    results = {"family": family.id, "p": args.p, "nu": args.nu, "Q": str(moment), "value": float(moment)}
    return results, {}


def _run_verify(args: argparse.Namespace, config: RuntimeConfig, threads: int) -> tuple[Any, dict[str, Any]]:
    family = family_by_name(args.family)
    params = validate_and_residues(family, args.q, args.a0, args.b0)
    rows = verify_suite(params, make_weight(config.weight), config.grid, config.truncation, config.caps.charsum_prime_cap)
    return rows, {}


def _run_bias(args: argparse.Namespace, config: RuntimeConfig, threads: int) -> tuple[Any, dict[str, Any]]:
    family = family_by_name(args.family)
    sign = "+" if args.sign == "plus" else "-"
    spec = bias_builder(family, args.n, sign, config.caps.charsum_prime_cap, config.caps.bias_max_n)
    return spec, {"e_small_lambda": spec.e_small_lambda, "growth_ratio": spec.growth_ratio}


COMMANDS: dict[str, Callable[[argparse.Namespace, RuntimeConfig, int], tuple[Any, dict[str, Any]]]] = {
    "constants": _run_constants,
    "density": _run_density,
    "charsum": _run_charsum,
    "verify": _run_verify,
    "bias": _run_bias,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one command and write its report; returns the exit code."""

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format == "csv" and args.command != "verify":
            parser.error("--format csv is only available for grid-valued output (verify)")
    except UsageError as exc:
        print(f"elliptic-density: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    threads = args.threads or default_threads()
    try:
        config = load_runtime_config(DEFAULT_CONFIG, args.config, dotlist=_dotlist(args))
        results, diagnostics = COMMANDS[args.command](args, config, threads)
    except FileNotFoundError as exc:
        print(f"elliptic-density: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValidationError as exc:
        print(f"elliptic-density: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DomainError as exc:
        print(f"elliptic-density: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceCapError as exc:
        print(f"elliptic-density: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    except NumericError as exc:
        print(f"elliptic-density: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.format == "csv":
        text = render_csv(results)
    else:
        text = render_json(_effective_config(args, config), results, diagnostics)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8", newline="")
        logger.info("report written to %s", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))
