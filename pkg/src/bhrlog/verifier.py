"""Evaluate both sides of the weighted inequalities and their supporting
identities for concrete test functions, reporting signed slack with an
explicit error budget.

Both sides are always integrated over the closed support of the test
function only: outside it every integrand vanishes identically, and the
restriction sidesteps the power singularity at 0 as well as the blow-up of
the deepest logarithm at the interval edge when the anchor hypothesis holds
with equality.  The error budget is 10x the sum of all quadrature error
estimates; a slack inside the budget is reported INCONCLUSIVE rather than
PASS or FAIL.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import Alpha, constant_A, constant_B, expand_characteristic
from .jets import (
    FACTORIALS,
    derivatives_from_taylor,
    taylor_compose,
    taylor_exp,
    taylor_mul,
    taylor_pow,
    taylor_variable,
)
from .params import ParamError, ProblemParams, validate_params
from .quadrature import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    QuadResult,
    QuadratureError,
    integrate_vector,
)
from .testfunctions import JetFunction, VectorJetFunction
from .weights import WeightEvaluator, WeightSpec, weight_term_labels

__all__ = [
    "VerificationError",
    "VerificationReport",
    "verify_inequality",
    "verify_vector",
    "check_ibp_identity",
    "check_transform_identity",
    "check_poincare",
]

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
UNSUPPORTED = "UNSUPPORTED"

_BUDGET_FACTOR = 10.0


class VerificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class VerificationReport:
    """One verified instance: left side, per-term right side, slack, verdict."""

    kind: str
    params: Optional[ProblemParams]
    function: dict  # descriptor of the test function
    lhs: QuadResult
    rhs_terms: Tuple[Tuple[str, QuadResult], ...]
    slack: float
    error_budget: float
    status: str
    note: str = ""

    @property
    def rhs_total(self) -> float:
        return float(sum(q.value for _, q in self.rhs_terms))


def _status(slack: float, budget: float) -> str:
    if slack > budget:
        return PASS
    if abs(slack) <= budget:
        return INCONCLUSIVE
    return FAIL


def _components(f: Union[JetFunction, VectorJetFunction]) -> Tuple[JetFunction, ...]:
    if isinstance(f, VectorJetFunction):
        return f.components
    return (f,)


def _norm_sq(f, xs: np.ndarray, k: int) -> np.ndarray:
    total = np.zeros(xs.shape, dtype=np.float64)
    for comp in _components(f):
        d = comp.jet(xs)[k]
        total = total + d * d
    return total


def _check_admissible(f, params: ProblemParams, order_needed: int) -> None:
    lo, hi = params.interval()
    a, b = f.support
    if not (a > lo and b < hi):
        raise VerificationError(
            f"test function support [{a}, {b}] must lie strictly inside ({lo}, {hi})"
        )
    if f.order < order_needed:
        raise VerificationError(
            f"need jets up to order {order_needed}, function carries {f.order}"
        )
    # boundary vanishing up to order m-1 at both support endpoints
    for comp in _components(f):
        for endpoint in comp.support:
            jet = comp.jet(np.array([endpoint]))
            if np.any(jet[: params.m] != 0.0):
                raise VerificationError(
                    f"jet does not vanish to order {params.m - 1} at support endpoint {endpoint}"
                )


def _failed_report(kind: str, params, f, exc: Exception) -> VerificationReport:
    empty = QuadResult(0.0, 0.0, 0, ())
    return VerificationReport(
        kind=kind,
        params=params,
        function=getattr(f, "descriptor", {}),
        lhs=empty,
        rhs_terms=(),
        slack=0.0,
        error_budget=float("inf"),
        status=INCONCLUSIVE,
        note=f"quadrature failure: {exc}",
    )


def verify_inequality(
    params: ProblemParams,
    f: Union[JetFunction, VectorJetFunction],
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> VerificationReport:
    """Verify one weighted inequality instance for one test function.

    The left side is the x^alpha-weighted square integral of the m-th
    derivative; the right side is assembled term by term from the composite
    weight at refinement order l acting on the (m-l)-th derivative.
    """
    validate_params(params)
    _check_admissible(f, params, params.m)
    spec = WeightSpec(params)
    coeffs = expand_characteristic(params.l, params.alpha)
    alpha_f = float(params.alpha.value)
    m, l = params.m, params.l
    a, b = f.support
    breakpoints = tuple(getattr(f, "seams", ()))
    labels = weight_term_labels(spec)
    wev = WeightEvaluator(spec, coeffs, (a, b))

    def lhs_integrand(xs: np.ndarray) -> np.ndarray:
        return (xs ** alpha_f * _norm_sq(f, xs, m))[np.newaxis, :]

    def rhs_integrand(xs: np.ndarray) -> np.ndarray:
        base = xs ** (alpha_f - 2 * l) * _norm_sq(f, xs, m - l)
        return wev(xs) * base[np.newaxis, :]

    try:
        lhs_vals, lhs_errs, lhs_panels, pts = integrate_vector(
            lhs_integrand, a, b, 1, breakpoints, rel_tol, abs_tol
        )
        rhs_vals, rhs_errs, rhs_panels, _ = integrate_vector(
            rhs_integrand, a, b, len(labels), breakpoints, rel_tol, abs_tol
        )
    except QuadratureError as exc:
        return _failed_report("inequality", params, f, exc)

    lhs = QuadResult(float(lhs_vals[0]), float(lhs_errs[0]), lhs_panels, pts)
    rhs_terms = tuple(
        (label, QuadResult(float(v), float(e), rhs_panels, pts))
        for label, v, e in zip(labels, rhs_vals, rhs_errs)
    )
    slack = lhs.value - float(np.sum(rhs_vals))
    budget = _BUDGET_FACTOR * (lhs.abs_error_estimate + float(np.sum(rhs_errs)))
    return VerificationReport(
        kind="inequality",
        params=params,
        function=f.descriptor,
        lhs=lhs,
        rhs_terms=rhs_terms,
        slack=slack,
        error_budget=budget,
        status=_status(slack, budget),
    )


def verify_vector(
    params: ProblemParams,
    components: Sequence[JetFunction],
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    additivity_rtol: float = 1e-12,
) -> VerificationReport:
    """Vector-valued instance; asserts totals equal the component sums.

    The vector norm is the finite-dimensional sum of squared components, so
    every integral must equal the sum of the d scalar integrals; this is
    checked to additivity_rtol and a violation raises.
    """
    vec = VectorJetFunction(components)
    if params.d != vec.dim:
        params = dataclasses.replace(params, d=vec.dim)
    report = verify_inequality(params, vec, rel_tol, abs_tol)
    if report.note:
        return report
    scalar_params = dataclasses.replace(params, d=1)
    scalars = [verify_inequality(scalar_params, c, rel_tol, abs_tol) for c in vec.components]
    pairs = [("lhs", report.lhs.value, sum(r.lhs.value for r in scalars)),
             ("rhs", report.rhs_total, sum(r.rhs_total for r in scalars))]
    for name, total, summed in pairs:
        scale = max(abs(total), abs(summed), 1e-300)
        if abs(total - summed) > additivity_rtol * scale:
            raise VerificationError(
                f"vector {name} total {total!r} differs from component sum {summed!r}"
            )
    return report


def check_ibp_identity(
    m: int,
    alpha: Union[Alpha, int, str],
    f: JetFunction,
    rel_tol: float = 1e-12,
) -> float:
    """Relative residual between the two integration-by-parts forms.

    Integrates x^alpha |f^(m)|^2 directly, and independently integrates
    (-1)^m (x^alpha f^(m))^(m) * f with the outer derivative taken by jet
    arithmetic; the test function must carry jets to order 2m.
    """
    a_obj = alpha if isinstance(alpha, Alpha) else Alpha.exact(alpha)
    alpha_f = float(a_obj.value)
    if f.order < 2 * m:
        raise VerificationError(f"need jets to order {2 * m}, function carries {f.order}")
    a, b = f.support
    sign = -1.0 if m % 2 else 1.0
    fact_m = float(FACTORIALS[m])

    def both(xs: np.ndarray) -> np.ndarray:
        coeffs = f.taylor(xs)
        derivs = derivatives_from_taylor(coeffs)
        direct = xs ** alpha_f * derivs[m] ** 2
        # jet of g = f^(m) to order m, then of x^alpha * g
        g = np.stack([coeffs[m + k] * FACTORIALS[m + k] / FACTORIALS[k] for k in range(m + 1)])
        xa = taylor_pow(taylor_variable(xs, m), alpha_f)
        outer = taylor_mul(xa, g)
        dual = sign * outer[m] * fact_m * derivs[0]
        return np.stack([direct, dual])

    vals, errs, _, _ = integrate_vector(both, a, b, 2, getattr(f, "seams", ()),
                                        rel_tol, DEFAULT_ABS_TOL)
    i_direct, i_dual = float(vals[0]), float(vals[1])
    scale = max(abs(i_direct), abs(i_dual))
    if scale == 0.0:
        return 0.0
    return abs(i_direct - i_dual) / scale


def _w_taylor_factory(f: JetFunction, gamma: float, beta: float, order: int):
    """Jet of w(t) = exp(-beta t) f(gamma e^t) via composition."""

    def w_taylor(ts: np.ndarray) -> np.ndarray:
        tjet = taylor_variable(ts, order)
        inner = gamma * taylor_exp(tjet)
        fout = f.taylor(inner[0])
        fcomp = taylor_compose(fout, inner)
        return taylor_mul(fcomp, taylor_exp(-beta * tjet))

    return w_taylor


def check_transform_identity(
    params: ProblemParams,
    f: JetFunction,
    rel_tol: float = 1e-12,
) -> float:
    """Relative difference between the x-side bracket and its t-side image.

    x side: left side minus all right-hand weight terms for the exterior
    ln variant with l = m.  t side: gamma^(alpha-2m+1) times the sum over
    j = 1..m of |c_2j| applied to the unweighted bracket of w(t), where
    w(t) = exp(-[(2m-1-alpha)/2] t) f(gamma e^t).
    """
    validate_params(params)
    if params.side != "exterior" or params.variant != "ln":
        raise ParamError("transform identity check requires the exterior ln variant")
    if params.l != params.m:
        raise ParamError("transform identity check requires l = m")
    if params.depth is None or params.depth < 1:
        raise ParamError("transform identity check requires finite depth N >= 1")
    if not params.alpha.is_exact:
        raise ParamError("transform identity check requires an exact alpha")
    if params.alpha.value.denominator == 1 and 1 <= params.alpha.value <= 2 * params.m - 1:
        raise ParamError("transform identity check excludes integer alpha in [1, 2m-1]")
    _check_admissible(f, params, params.m)
    m, n = params.m, params.depth
    alpha_f = float(params.alpha.value)
    gamma = float(params.anchor)
    report = verify_inequality(params, f, rel_tol=rel_tol)
    if report.note:
        raise QuadratureError(report.note)
    x_side = report.slack

    coeffs = expand_characteristic(m, params.alpha)
    beta = (2 * m - 1 - alpha_f) / 2.0
    w_taylor = _w_taylor_factory(f, gamma, beta, m)
    t_lo = float(np.log(f.support[0] / gamma))
    t_hi = float(np.log(f.support[1] / gamma))

    # components per j: |w^(j)|^2, t^(-2j)|w|^2, then (N-1) iterated-log rows
    rows_per_j = 1 + 1 + (n - 1)

    def t_integrand(ts: np.ndarray) -> np.ndarray:
        w = derivatives_from_taylor(w_taylor(ts))
        wsq = w[0] * w[0]
        t_ld = np.asarray(ts, dtype=np.longdouble)
        rows = []
        for j in range(1, m + 1):
            rows.append(w[j] * w[j])
            tpow = np.asarray(t_ld ** (-2 * j), dtype=np.float64)
            rows.append(tpow * wsq)
            prod = np.ones_like(t_ld)
            chain_v = t_ld
            for _ in range(n - 1):
                chain_v = np.log(chain_v)
                prod = prod / (chain_v * chain_v)
                rows.append(np.asarray(tpow * prod, dtype=np.float64) * wsq)
        return np.stack(rows)

    vals, _, _, _ = integrate_vector(
        t_integrand, t_lo, t_hi, m * rows_per_j, (), rel_tol, DEFAULT_ABS_TOL
    )
    t_side = 0.0
    idx = 0
    for j in range(1, m + 1):
        c2j = float(coeffs.abs_even(j))
        bracket = vals[idx]
        idx += 1
        bracket -= float(constant_A(j, 0)) * vals[idx]
        idx += 1
        for _ in range(n - 1):
            bracket -= float(constant_B(j, 0)) * vals[idx]
            idx += 1
        t_side += c2j * bracket
    t_side *= gamma ** (alpha_f - 2 * m + 1)
    scale = max(abs(x_side), abs(t_side))
    if scale == 0.0:
        return 0.0
    return abs(x_side - t_side) / scale


def check_poincare(
    k: int,
    m: int,
    alpha: Union[Alpha, int, str],
    rho: Union[float, str],
    f: JetFunction,
    rel_tol: float = DEFAULT_REL_TOL,
) -> VerificationReport:
    """Lower bound of the m-th derivative energy by the k-th, on (0, rho).

    Uses the explicit constant A(m-k, alpha) * rho^(-2(m-k)); at exceptional
    alpha that constant vanishes and the check is reported UNSUPPORTED (the
    alternative constant is not explicit).
    """
    if not 0 <= k <= m - 1:
        raise ParamError(f"need 0 <= k <= m-1 (got k={k}, m={m})")
    a_obj = alpha if isinstance(alpha, Alpha) else Alpha.exact(alpha)
    rho_f = float(rho) if not isinstance(rho, str) else float(Alpha.exact(rho).value)
    a, b = f.support
    if not (a > 0 and b < rho_f):
        raise VerificationError("test function must be supported strictly inside (0, rho)")
    alpha_f = float(a_obj.value)
    aconst = constant_A(m - k, a_obj)
    empty = QuadResult(0.0, 0.0, 0, ())
    if a_obj.is_exact and a_obj.is_exceptional(m - k):
        return VerificationReport(
            kind="poincare", params=None, function=f.descriptor,
            lhs=empty, rhs_terms=(), slack=0.0, error_budget=float("inf"),
            status=UNSUPPORTED,
            note="exceptional alpha: explicit constant vanishes",
        )
    cval = float(aconst) * rho_f ** (-2 * (m - k))

    def both(xs: np.ndarray) -> np.ndarray:
        derivs = f.jet(xs)
        xa = xs ** alpha_f
        return np.stack([xa * derivs[m] ** 2, cval * xa * derivs[k] ** 2])

    try:
        vals, errs, panels, pts = integrate_vector(
            both, a, b, 2, getattr(f, "seams", ()), rel_tol, DEFAULT_ABS_TOL
        )
    except QuadratureError as exc:
        return _failed_report("poincare", None, f, exc)
    lhs = QuadResult(float(vals[0]), float(errs[0]), panels, pts)
    rhs = QuadResult(float(vals[1]), float(errs[1]), panels, pts)
    slack = lhs.value - rhs.value
    budget = _BUDGET_FACTOR * (lhs.abs_error_estimate + rhs.abs_error_estimate)
    return VerificationReport(
        kind="poincare",
        params=None,
        function=f.descriptor,
        lhs=lhs,
        rhs_terms=(("poincare", rhs),),
        slack=slack,
        error_budget=budget,
        status=_status(slack, budget),
    )
