"""Adaptive quadrature: panel subdivision with a tanh-sinh rule per panel.

Every integral in the package runs through here.  Panels never straddle a
caller-supplied breakpoint (cutoff seams are only finitely smooth), and the
double-exponential node clustering absorbs the power/log behavior the
integrands develop near panel endpoints.  Node positions are stored as
distances to the nearer panel endpoint, so integrable endpoint singularities
are sampled at x = a + delta*h rather than at a rounded-to-endpoint abscissa.

Error estimates are the conservative level-to-level differences of the
nested rule; non-convergence raises, it never returns a silent wrong value.
Evaluation order and summation order are fixed, so results are bit-for-bit
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadResult",
    "QuadratureError",
    "integrate",
    "integrate_exterior",
    "integrate_vector",
    "DEFAULT_REL_TOL",
    "DEFAULT_ABS_TOL",
    "MAX_PANELS",
]

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-14
MAX_PANELS = 4096
_MAX_LEVEL = 7
_T_MAX = 6.0


class QuadratureError(RuntimeError):
    """Quadrature failed to converge within the panel budget."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    breakpoints_used: tuple

    def __post_init__(self) -> None:
        if not np.isfinite(self.value):
            raise QuadratureError("non-finite integral value")


def _build_tables():
    """Per-level tanh-sinh nodes: (endpoint offsets in [0,1], weights)."""
    tables = []
    for level in range(_MAX_LEVEL + 1):
        h = 0.5 ** level
        if level == 0:
            ts = np.arange(0.0, _T_MAX + 1e-9, h)
        else:
            ts = np.arange(h, _T_MAX + 1e-9, 2.0 * h)
        sh = np.sinh(ts)
        # distance from the nearer endpoint: 1 - tanh(pi/2 sinh t) = 2/(1+e^{pi sinh t})
        offsets = 2.0 / (1.0 + np.exp(np.pi * sh))
        weights = (np.pi / 2.0) * np.cosh(ts) / np.cosh((np.pi / 2.0) * sh) ** 2
        keep = offsets > 0.0
        tables.append((offsets[keep], weights[keep]))
    return tables


_TABLES = _build_tables()


def _eval_panel(f, a: float, b: float, ncomp: int, rel_tol: float, abs_tol: float):
    """Run the nested tanh-sinh levels on one panel.

    Returns (values, error_estimates, converged, evaluations).
    """
    hw = 0.5 * (b - a)
    acc = np.zeros(ncomp, dtype=np.float64)
    prev = None
    values = np.zeros(ncomp, dtype=np.float64)
    errs = np.full(ncomp, np.inf)
    neval = 0
    for level in range(_MAX_LEVEL + 1):
        offsets, weights = _TABLES[level]
        if level == 0:
            # offsets[0] == 1 is the panel midpoint; count it once
            xs = np.concatenate([a + hw * offsets, b - hw * offsets[1:]])
            ws = np.concatenate([weights, weights[1:]])
        else:
            xs = np.concatenate([a + hw * offsets, b - hw * offsets])
            ws = np.concatenate([weights, weights])
        vals = np.asarray(f(xs), dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[np.newaxis, :]
        if vals.shape != (ncomp, xs.size):
            raise QuadratureError(
                f"integrand returned shape {vals.shape}, expected {(ncomp, xs.size)}"
            )
        if not np.all(np.isfinite(vals)):
            raise QuadratureError(f"integrand returned a non-finite value on ({a}, {b})")
        neval += xs.size
        acc += vals @ ws
        h = 0.5 ** level
        values = hw * h * acc
        if prev is not None:
            errs = np.abs(values - prev)
            if level >= 2 and np.all(errs <= np.maximum(rel_tol * np.abs(values), abs_tol)):
                return values, errs, True, neval
        prev = values
    return values, errs, False, neval


def integrate_vector(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    ncomp: int,
    breakpoints: Sequence[float] = (),
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_panels: int = MAX_PANELS,
):
    """Integrate a vectorized (ncomp, n)-valued integrand over (a, b).

    Returns (values, error_estimates, n_panels, breakpoints_used).
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise QuadratureError("integration endpoints must be finite")
    if b < a:
        raise QuadratureError(f"empty interval ({a}, {b})")
    if b == a:
        return np.zeros(ncomp), np.zeros(ncomp), 0, (a, b)
    pts = sorted({float(a), float(b), *(float(p) for p in breakpoints if a < p < b)})
    width = b - a
    stack = [(pts[i], pts[i + 1]) for i in range(len(pts) - 2, -1, -1)]
    accepted = []
    while stack:
        lo, hi = stack.pop()
        frac = (hi - lo) / width
        vals, errs, ok, _ = _eval_panel(f, lo, hi, ncomp, rel_tol, abs_tol * frac)
        tiny = (hi - lo) <= 64.0 * np.finfo(np.float64).eps * max(abs(lo), abs(hi))
        if ok or tiny:
            accepted.append((lo, hi, vals, errs))
        else:
            if len(accepted) + len(stack) + 2 > max_panels:
                raise QuadratureError(
                    f"no convergence after {len(accepted) + len(stack)} panels on ({a}, {b})"
                )
            mid = lo + 0.5 * (hi - lo)
            stack.append((mid, hi))
            stack.append((lo, mid))
    accepted.sort(key=lambda rec: rec[0])
    total = np.zeros(ncomp, dtype=np.float64)
    err = np.zeros(ncomp, dtype=np.float64)
    for _, _, vals, errs in accepted:
        total += vals
        err += errs
    return total, err, len(accepted), tuple(pts)


def integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    support: Sequence[float],
    breakpoints: Sequence[float] = (),
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """Integrate a scalar vectorized integrand over the open interval support."""
    a, b = float(support[0]), float(support[1])

    def wrapped(x: np.ndarray) -> np.ndarray:
        return np.asarray(integrand(x), dtype=np.float64)[np.newaxis, :]

    vals, errs, panels, pts = integrate_vector(
        wrapped, a, b, 1, breakpoints, rel_tol, abs_tol, max_panels
    )
    return QuadResult(float(vals[0]), float(errs[0]), panels, pts)


def integrate_exterior(
    integrand: Callable[[np.ndarray], np.ndarray],
    rho: float,
    support_upper: float,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
    breakpoints: Sequence[float] = (),
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """Integral over (rho, inf) of an integrand vanishing above support_upper."""
    if support_upper < rho:
        raise QuadratureError("support_upper must not be below rho")
    return integrate(integrand, (rho, support_upper), breakpoints, rel_tol, abs_tol, max_panels)
