"""Command-line entry point: constants, verify, identities, sharpness.

Every command validates its configuration against the variant's hypotheses
before any computation (violations exit with code 64 and a message naming
the failed hypothesis), prints one PASS/FAIL line per result, and optionally
writes a deterministic JSON or CSV report.

Exit codes: 0 all PASS, 1 any FAIL, 2 any INCONCLUSIVE or UNSUPPORTED (and
no FAIL), 64 configuration or usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .constants import Alpha, constant_A, constant_B, expand_characteristic
from .params import ParamError, ProblemParams, parse_rational
from .quadrature import QuadratureError
from .reports import SCHEMA_VERSION, emit_report, params_dict, report_dict, sweep_dict
from .sharpness import DEFAULT_EPS_GRID, RateFitError, run_sweep
from .testfunctions import STEP_VARIANTS, default_corpus, vector_function
from .verifier import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    UNSUPPORTED,
    check_ibp_identity,
    check_poincare,
    check_transform_identity,
    verify_inequality,
    verify_vector,
)
from .weights import iter_exp, log_identity_check

LOG_IDENTITY_TOL = 1e-12
IBP_TOL = 1e-8
TRANSFORM_TOL = 1e-8

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64


def _status_from_residual(residual: float, tol: float) -> str:
    return PASS if residual <= tol else FAIL


def _exit_code(statuses: List[str]) -> int:
    if FAIL in statuses:
        return EXIT_FAIL
    if INCONCLUSIVE in statuses or UNSUPPORTED in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _print_result(line: str) -> None:
    sys.stdout.write(line + "\n")


def _emit(payload: dict, args) -> None:
    if args.out:
        emit_report(payload, args.format, args.out)
        _print_result(f"report written to {args.out}")


def _cmd_constants(args) -> int:
    alpha = Alpha.exact(parse_rational(args.alpha))
    results = []
    for order in range(1, args.m + 1):
        table = expand_characteristic(order, alpha)
        results.append({
            "kind": "constants",
            "m": order,
            "alpha": str(alpha),
            "A": str(constant_A(order, alpha)),
            "B": str(constant_B(order, alpha)),
            "coefficients": [str(c) for c in table.coeffs],
        })
        _print_result(f"m={order} alpha={alpha}: A={results[-1]['A']} B={results[-1]['B']}")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "constants",
        "config": {"m": args.m, "alpha": str(alpha)},
        "results": results,
    }
    _emit(payload, args)
    return EXIT_OK


def _corpus_order(m: int) -> int:
    return m + 1


def _cmd_verify(args) -> int:
    if args.variant == "ln":
        if args.tau is not None:
            raise ParamError("ln variant takes --gamma, not --tau")
        anchor = args.gamma if args.gamma is not None else args.rho
    else:
        if args.gamma is not None:
            raise ParamError("L variant takes --tau, not --gamma")
        anchor = args.tau if args.tau is not None else args.rho
    params = ProblemParams.make(
        m=args.m, l=args.l, depth=args.N, alpha=args.alpha, rho=args.rho,
        anchor=anchor, side=args.side, variant=args.variant, d=args.d,
    )
    corpus = default_corpus(args.side, float(params.rho), _corpus_order(args.m))
    results = []
    statuses = []
    if args.d == 1:
        reports = [verify_inequality(params, f, rel_tol=args.rel_tol) for f in corpus]
    else:
        reports = []
        for i in range(len(corpus)):
            comps = [corpus[(i + j) % len(corpus)] for j in range(args.d)]
            reports.append(verify_vector(params, comps, rel_tol=args.rel_tol))
    for rep in reports:
        results.append(report_dict(rep))
        statuses.append(rep.status)
        _print_result(
            f"{rep.status} inequality m={params.m} l={params.l} "
            f"N={'inf' if params.depth is None else params.depth} alpha={params.alpha} "
            f"{params.side}-{params.variant} d={params.d} "
            f"slack={rep.slack:.6e} budget={rep.error_budget:.2e}"
        )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "config": {**params_dict(params), "rel_tol": args.rel_tol},
        "results": results,
    }
    _emit(payload, args)
    return _exit_code(statuses)


def _identity_log(results, statuses) -> None:
    for depth in (1, 2, 3, 4):
        base = iter_exp(depth)
        for i in range(20):
            x = base * (1.5 + 0.75 * i)
            residual = log_identity_check(depth, x)
            status = _status_from_residual(residual, LOG_IDENTITY_TOL)
            statuses.append(status)
            results.append({
                "kind": "log-identity", "N": depth, "x": x,
                "residual": residual, "tolerance": LOG_IDENTITY_TOL, "status": status,
            })
    _print_result(f"{statuses[-1]} log-identity battery (N=1..4, 20 points each)")


def _identity_ibp(results, statuses) -> None:
    for m in (1, 2, 3):
        corpus = default_corpus("interior", 1.0, 2 * m)
        for alpha in ("0", "1/2", "-1", "2"):
            worst = 0.0
            for f in corpus:
                residual = check_ibp_identity(m, alpha, f)
                worst = max(worst, residual)
            status = _status_from_residual(worst, IBP_TOL)
            statuses.append(status)
            results.append({
                "kind": "ibp", "m": m, "alpha": alpha,
                "residual": worst, "tolerance": IBP_TOL, "status": status,
            })
            _print_result(f"{status} ibp m={m} alpha={alpha} max residual={worst:.3e}")


def _identity_transform(results, statuses) -> None:
    for m in (1, 2):
        for depth in (1, 2):
            rho = str(16 if depth == 2 else 2)
            for alpha in ("0", "1/2", "-1"):
                params = ProblemParams.make(m, m, depth, alpha, rho, "1",
                                            "exterior", "ln")
                corpus = default_corpus("exterior", float(params.rho), m)
                worst = 0.0
                for f in corpus:
                    residual = check_transform_identity(params, f)
                    worst = max(worst, residual)
                status = _status_from_residual(worst, TRANSFORM_TOL)
                statuses.append(status)
                results.append({
                    "kind": "transform", "m": m, "N": depth, "alpha": alpha,
                    "residual": worst, "tolerance": TRANSFORM_TOL, "status": status,
                })
                _print_result(
                    f"{status} transform m={m} N={depth} alpha={alpha} "
                    f"max residual={worst:.3e}"
                )


def _identity_poincare(results, statuses) -> None:
    rho = 1.0
    for (k, m) in ((0, 1), (0, 2), (1, 2), (1, 3)):
        corpus = default_corpus("interior", rho, max(m, k) + 1)
        for alpha in ("0", "1/2"):
            for f in corpus:
                rep = check_poincare(k, m, alpha, rho, f)
                statuses.append(rep.status)
                entry = report_dict(rep)
                entry.update({"k": k, "m": m, "alpha": alpha, "rho": rho})
                results.append(entry)
            _print_result(f"{statuses[-1]} poincare k={k} m={m} alpha={alpha}")


def _cmd_identities(args) -> int:
    results: list = []
    statuses: list = []
    which = args.which
    if which in ("all", "log-identity"):
        _identity_log(results, statuses)
    if which in ("all", "ibp"):
        _identity_ibp(results, statuses)
    if which in ("all", "transform"):
        _identity_transform(results, statuses)
    if which in ("all", "poincare"):
        _identity_poincare(results, statuses)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "identities",
        "config": {"which": which},
        "results": results,
    }
    _emit(payload, args)
    return _exit_code(statuses)


def _cmd_sharpness(args) -> int:
    if args.eps_grid:
        grid = tuple(float(e) for e in args.eps_grid.split(","))
    else:
        grid = DEFAULT_EPS_GRID
    sweep = run_sweep(args.l, args.m, args.alpha, rho=float(parse_rational(args.rho)),
                      eps_grid=grid, step_variant=args.cutoff)
    ok = abs(sweep.fit_limit - 1.0) <= 0.02
    bp = sweep.bounded_products()
    bounded = max(bp) / min(bp) <= 5.0
    status = PASS if (ok and bounded) else FAIL
    _print_result(
        f"{status} sharpness l={sweep.l} m={sweep.m} alpha={sweep.alpha} "
        f"limit={sweep.fit_limit:.6f} slope={sweep.fit_slope:.3f} "
        f"bounded-ratio={max(bp) / min(bp):.3f}"
    )
    entry = sweep_dict(sweep)
    entry["status"] = status
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "sharpness",
        "config": {"m": args.m, "l": args.l, "alpha": str(args.alpha),
                   "rho": str(parse_rational(args.rho)), "eps_grid": list(grid),
                   "cutoff": args.cutoff},
        "results": [entry],
    }
    _emit(payload, args)
    return _exit_code([status])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhrlog",
        description="Certify weighted Birman-Hardy-Rellich inequalities with "
                    "logarithmic refinements on smooth test-function corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="report output path")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("constants", parents=[common],
                       help="exact leading constants and polynomial coefficients")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("verify", parents=[common],
                       help="verify one inequality instance over the default corpus")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--N", required=True, help="refinement depth (int or 'inf')")
    p.add_argument("--alpha", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--gamma", default=None, help="log anchor (ln variants)")
    p.add_argument("--tau", default=None, help="log anchor (L variants)")
    p.add_argument("--side", choices=("interior", "exterior"), required=True)
    p.add_argument("--variant", choices=("ln", "L"), required=True)
    p.add_argument("--d", type=int, default=1, help="vector dimension")
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("identities", parents=[common],
                       help="structural identity batteries")
    p.add_argument("--which", default="all",
                   choices=("all", "log-identity", "ibp", "transform", "poincare"))
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("sharpness", parents=[common],
                       help="extremizer sweep certifying the leading constant")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--rho", default="4")
    p.add_argument("--eps-grid", default=None, help="comma-separated decreasing list")
    p.add_argument("--cutoff", default="bump-integral", choices=STEP_VARIANTS)
    p.set_defaults(func=_cmd_sharpness)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParamError, RateFitError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except QuadratureError as exc:
        sys.stderr.write(f"quadrature failure: {exc}\n")
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    raise SystemExit(main())
