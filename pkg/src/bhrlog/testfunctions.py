"""Smooth compactly supported test functions with exact jets.

Every function here evaluates together with all derivatives up to a fixed
order through the truncated-Taylor rules in :mod:`bhrlog.jets`, so derivative
values carry no finite-difference error.  Jets are clamped to exactly zero
once the underlying exponential factor drops below ~1e-60 (far beneath any
tolerance in the package); the resulting support margin is recorded in each
descriptor as ``clamp_margin``.

Descriptors are plain JSON-serializable dicts that fully reproduce the
construction, including the seam points where the function is only finitely
smooth (quadrature places mandatory panel boundaries there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .constants import Alpha, constant_A_tilde
from .jets import (
    derivatives_from_taylor,
    taylor_const,
    taylor_exp,
    taylor_mul,
    taylor_pow,
    taylor_reciprocal,
    taylor_variable,
)

__all__ = [
    "JetFunction",
    "VectorJetFunction",
    "ExtremizerFamily",
    "bump",
    "smooth_step",
    "descending_step",
    "extremizer",
    "vector_function",
    "product",
    "scale",
    "dilate",
    "zero_function",
    "default_corpus",
    "STEP_VARIANTS",
]

# jets are treated as identically zero where the bump argument 1-u^2 (or the
# step argument distance) falls below these cuts; see module docstring
_BUMP_S_CUT = 0.005
_STEP_T_CUT = 1.0 / 150.0
STEP_VARIANTS = ("bump-integral", "exp-ratio")


@dataclass(frozen=True, eq=False)
class JetFunction:
    """A function evaluable together with its derivatives up to ``order``.

    ``support`` is the closed hull outside of which the jet vanishes (one end
    may be infinite for cutoff building blocks).  ``seams`` lists interior
    points where smoothness is only finite; they become mandatory quadrature
    breakpoints.
    """

    support: tuple
    order: int
    descriptor: dict
    seams: tuple = ()
    _coeff_eval: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)

    def taylor(self, x) -> np.ndarray:
        """Taylor coefficients f^(k)(x)/k!, shape (order+1, n)."""
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return self._coeff_eval(xs)

    def jet(self, x) -> np.ndarray:
        """Derivative values (f(x), f'(x), ..., f^(order)(x)), shape (order+1, n)."""
        scalar = np.ndim(x) == 0
        out = derivatives_from_taylor(self.taylor(x))
        return out[:, 0] if scalar else out

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        v = self.taylor(x)[0]
        return float(v[0]) if scalar else v


def _mask_eval(support, order, compute):
    """Wrap a coefficient evaluator so points outside the hull are exact zeros."""
    lo, hi = support

    def eval_coeffs(xs: np.ndarray) -> np.ndarray:
        inside = (xs > lo) & (xs < hi)
        if np.all(inside):
            return compute(xs)
        out = np.zeros((order + 1, xs.size), dtype=np.float64)
        idx = np.flatnonzero(inside)
        if idx.size:
            out[:, idx] = compute(xs[idx])
        return out

    return eval_coeffs


def _bump_unit_value(u: np.ndarray) -> np.ndarray:
    """Value of exp(-1/(1-u^2)) with the clamp applied, any input shape."""
    s = 1.0 - u * u
    out = np.zeros_like(s)
    good = s > _BUMP_S_CUT
    out[good] = np.exp(-1.0 / s[good])
    return out


def _bump_coeffs_from_u(u_jet: np.ndarray) -> np.ndarray:
    """Jet of exp(-1/(1-u^2)) given the jet of u."""
    order = u_jet.shape[0] - 1
    npts = u_jet.shape[1]
    s = -taylor_mul(u_jet, u_jet)
    s[0] += 1.0
    out = np.zeros((order + 1, npts), dtype=np.float64)
    good = s[0] > _BUMP_S_CUT
    if np.any(good):
        r = taylor_reciprocal(s[:, good])
        out[:, good] = taylor_exp(-r)
    return out


def bump(a: float, b: float, max_order: int) -> JetFunction:
    """Standard bump exp(-1/(1-u^2)) mapped affinely onto (a, b), zero outside."""
    if not a < b:
        raise ValueError("bump requires a < b")
    a, b = float(a), float(b)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    slope = 1.0 / half
    clamp_margin = half * (1.0 - math.sqrt(1.0 - _BUMP_S_CUT))

    def compute(xs: np.ndarray) -> np.ndarray:
        u = taylor_variable((xs - mid) * slope, max_order)
        if max_order >= 1:
            u[1] = slope
        return _bump_coeffs_from_u(u)

    return JetFunction(
        support=(a, b),
        order=max_order,
        descriptor={"kind": "bump", "a": a, "b": b, "order": max_order,
                    "clamp_margin": clamp_margin},
        seams=(),
        _coeff_eval=_mask_eval((a, b), max_order, compute),
    )


# fixed Gauss-Legendre rule used for the smooth-step prefix integral; the
# integrand is the unit bump on [1,2], analytic inside each sub-segment
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_PANELS = 12


def _bump12_prefix(x: np.ndarray) -> np.ndarray:
    """ >= machine-accurate prefix integral of the unit bump on [1, min(x,2)]."""
    xc = np.clip(x, 1.0, 2.0)
    length = (xc - 1.0) / _GL_PANELS
    starts = 1.0 + length * np.arange(_GL_PANELS)[:, None]
    hw = 0.5 * length
    mids = starts + hw
    nodes = mids[None, :, :] + hw[None, None, :] * _GL_NODES[:, None, None]
    vals = _bump_unit_value(2.0 * nodes - 3.0)
    return (vals * _GL_WEIGHTS[:, None, None]).sum(axis=(0, 1)) * hw


_STEP_NORM = float(_bump12_prefix(np.array([2.0]))[0])  # integral of the bump over (1,2)


def smooth_step(max_order: int, variant: str = "bump-integral") -> JetFunction:
    """Monotone C^inf step: exactly 0 for x <= 1 and exactly 1 for x >= 2.

    The default realizes the normalized prefix integral of the unit bump on
    (1, 2); its derivatives of every order are jets of the bump itself.  The
    alternative "exp-ratio" variant exp(-1/t)-ratio step exists so sharpness
    sweeps can demonstrate independence from the cutoff choice.
    """
    if variant not in STEP_VARIANTS:
        raise ValueError(f"unknown smooth_step variant {variant!r}")
    if variant == "bump-integral":
        inner = bump(1.0, 2.0, max_order=max(max_order - 1, 0))

        def compute(xs: np.ndarray) -> np.ndarray:
            out = np.zeros((max_order + 1, xs.size), dtype=np.float64)
            out[0] = np.clip(_bump12_prefix(xs) / _STEP_NORM, 0.0, 1.0)
            out[0][xs >= 2.0] = 1.0
            out[0][xs <= 1.0] = 0.0
            if max_order >= 1:
                bcoeffs = inner.taylor(xs) / _STEP_NORM
                for k in range(1, max_order + 1):
                    out[k] = bcoeffs[k - 1] / k
            return out

    else:

        def compute(xs: np.ndarray) -> np.ndarray:
            out = np.zeros((max_order + 1, xs.size), dtype=np.float64)
            lowcut = xs <= 1.0 + _STEP_T_CUT
            highcut = xs >= 2.0 - _STEP_T_CUT
            out[0][highcut] = 1.0
            mid = ~(lowcut | highcut)
            if np.any(mid):
                xm = xs[mid]
                t1 = taylor_variable(xm - 1.0, max_order)
                t2 = taylor_variable(2.0 - xm, max_order)
                if max_order >= 1:
                    t2[1] = -1.0
                g1 = taylor_exp(-taylor_reciprocal(t1))
                g2 = taylor_exp(-taylor_reciprocal(t2))
                out[:, mid] = taylor_mul(g1, taylor_reciprocal(g1 + g2))
            return out

    return JetFunction(
        support=(1.0, np.inf),
        order=max_order,
        descriptor={"kind": "smooth_step", "variant": variant, "order": max_order},
        seams=(2.0,),
        _coeff_eval=compute,
    )


def _step_window(lo: float, hi: float, order: int, descending: bool, variant: str):
    """Coefficient evaluator for the step composed with an affine window map."""
    base = smooth_step(order, variant)
    lam = 1.0 / (hi - lo)

    def compute(xs: np.ndarray) -> np.ndarray:
        xi = 1.0 + (hi - xs) * lam if descending else 1.0 + (xs - lo) * lam
        coeffs = base.taylor(xi)
        sgn = -lam if descending else lam
        scalepow = np.float64(1.0)
        out = coeffs.copy()
        for k in range(1, order + 1):
            scalepow *= sgn
            out[k] *= scalepow
        return out

    return compute


def descending_step(lo: float, hi: float, max_order: int,
                    variant: str = "bump-integral") -> JetFunction:
    """C^inf cutoff: exactly 1 for x <= lo, exactly 0 for x >= hi."""
    if not lo < hi:
        raise ValueError("descending_step requires lo < hi")
    return JetFunction(
        support=(-np.inf, float(hi)),
        order=max_order,
        descriptor={"kind": "descending_step", "lo": lo, "hi": hi,
                    "variant": variant, "order": max_order},
        seams=(float(lo),),
        _coeff_eval=_step_window(float(lo), float(hi), max_order, True, variant),
    )


def product(f: JetFunction, g: JetFunction) -> JetFunction:
    """Pointwise product; support is the intersection of the hulls."""
    if f.order != g.order:
        raise ValueError("product requires equal jet orders")
    lo = max(f.support[0], g.support[0])
    hi = min(f.support[1], g.support[1])
    if not lo < hi:
        raise ValueError("product support is empty")
    seams = tuple(sorted({s for s in (*f.seams, *g.seams,
                                      f.support[0], f.support[1],
                                      g.support[0], g.support[1]) if lo < s < hi}))

    def compute(xs: np.ndarray) -> np.ndarray:
        return taylor_mul(f.taylor(xs), g.taylor(xs))

    return JetFunction(
        support=(lo, hi),
        order=f.order,
        descriptor={"kind": "product", "factors": [f.descriptor, g.descriptor]},
        seams=seams,
        _coeff_eval=compute,
    )


def scale(f: JetFunction, c: float) -> JetFunction:
    def compute(xs: np.ndarray) -> np.ndarray:
        return c * f.taylor(xs)

    return JetFunction(
        support=f.support,
        order=f.order,
        descriptor={"kind": "scaled", "factor": float(c), "base": f.descriptor},
        seams=f.seams,
        _coeff_eval=compute,
    )


def dilate(f: JetFunction, lam: float) -> JetFunction:
    """g(x) = f(lam * x); support and seams shrink by 1/lam accordingly."""
    if lam <= 0:
        raise ValueError("dilation factor must be positive")

    def compute(xs: np.ndarray) -> np.ndarray:
        out = f.taylor(xs * lam)
        lampow = np.float64(1.0)
        for k in range(1, f.order + 1):
            lampow *= lam
            out[k] = out[k] * lampow
        return out

    return JetFunction(
        support=(f.support[0] / lam, f.support[1] / lam),
        order=f.order,
        descriptor={"kind": "dilated", "factor": float(lam), "base": f.descriptor},
        seams=tuple(s / lam for s in f.seams),
        _coeff_eval=compute,
    )


def zero_function(support: tuple, max_order: int) -> JetFunction:
    def compute(xs: np.ndarray) -> np.ndarray:
        return np.zeros((max_order + 1, xs.size), dtype=np.float64)

    return JetFunction(
        support=tuple(map(float, support)),
        order=max_order,
        descriptor={"kind": "zero", "support": list(map(float, support))},
        seams=(),
        _coeff_eval=compute,
    )


@dataclass(frozen=True)
class ExtremizerFamily:
    """Mollified near-extremal family on (0, rho).

    The profile is the pure power whose weighted quotient saturates the
    leading constant; the inner cutoff switches on across [eps, 2*eps] and
    the outer cutoff switches off across [rho-2, rho-1] (after rescaling any
    rho <= 2 + 2*eps instance to rho' = 4, which preserves the quotient
    because both integrals scale by the same power of the dilation).
    """

    l: int
    m: int
    alpha: Alpha
    rho: float
    eps: float
    step_variant: str = "bump-integral"

    def __post_init__(self) -> None:
        if not 1 <= self.l <= self.m:
            raise ValueError("extremizer family requires 1 <= l <= m")
        if not self.alpha.is_exact:
            raise ValueError("extremizer family requires an exact alpha")
        if self.eps <= 0:
            raise ValueError("mollification scale must be positive")
        if self.step_variant not in STEP_VARIANTS:
            raise ValueError(f"unknown cutoff variant {self.step_variant!r}")
        if self.l < self.m and constant_A_tilde(self.m, self.alpha) == 0:
            raise ValueError(
                "shifted family undefined at exceptional alpha (zero leading derivative)"
            )

    @property
    def rho_effective(self) -> float:
        return self.rho if self.rho - 2.0 > 2.0 * self.eps else 4.0

    @property
    def dilation(self) -> float:
        return self.rho_effective / self.rho


def extremizer(family: ExtremizerFamily, order: int) -> JetFunction:
    """Mollified extremizer with jets up to ``order``."""
    rho_eff = family.rho_effective
    eps = family.eps
    if not 2.0 * eps < rho_eff - 2.0:
        raise ValueError(
            f"mollification scale too large: need 2*eps < rho-2 (eps={eps}, rho={rho_eff})"
        )
    lam = family.dilation
    alpha = family.alpha.value
    if family.l == family.m:
        beta = float(2 * family.l - 1 - alpha) / 2.0
        amp = 1.0
    else:
        beta = float(2 * family.m - 1 - alpha) / 2.0
        amp = float(constant_A_tilde(family.l, family.alpha)
                    / constant_A_tilde(family.m, family.alpha))
    phi = _step_window(eps, 2.0 * eps, order, False, family.step_variant)
    psi = _step_window(rho_eff - 2.0, rho_eff - 1.0, order, True, family.step_variant)
    lo = eps / lam
    hi = (rho_eff - 1.0) / lam

    def compute(xs: np.ndarray) -> np.ndarray:
        xh = xs * lam
        cut = taylor_mul(phi(xh), psi(xh))
        out = np.zeros((order + 1, xs.size), dtype=np.float64)
        live = cut[0] > 0.0
        if np.any(live):
            xv = taylor_variable(xh[live], order)
            power = taylor_pow(xv, beta)
            out[:, live] = amp * taylor_mul(power, cut[:, live])
        if order >= 1:
            lampow = np.float64(1.0)
            for k in range(1, order + 1):
                lampow *= lam
                out[k] *= lampow
        return out

    seams = tuple(sorted({eps / lam, 2.0 * eps / lam, (rho_eff - 2.0) / lam,
                          (rho_eff - 1.0) / lam}))
    descriptor = {
        "kind": "extremizer",
        "l": family.l,
        "m": family.m,
        "alpha": str(family.alpha),
        "rho": family.rho,
        "eps": eps,
        "dilation": lam,
        "step_variant": family.step_variant,
        "order": order,
    }
    return JetFunction(
        support=(lo, hi),
        order=order,
        descriptor=descriptor,
        seams=tuple(s for s in seams if lo < s < hi),
        _coeff_eval=_mask_eval((lo, hi), order, compute),
    )


class VectorJetFunction:
    """Finite-dimensional vector of jointly evaluated jet functions."""

    def __init__(self, components: Sequence[JetFunction]):
        comps = list(components)
        if not comps:
            raise ValueError("vector function needs at least one component")
        order = comps[0].order
        if any(c.order != order for c in comps):
            raise ValueError("mismatched component jet orders")
        lo = min(c.support[0] for c in comps)
        hi = max(c.support[1] for c in comps)
        if not np.isfinite(lo) or not np.isfinite(hi):
            raise ValueError("vector components must be compactly supported")
        self.components = tuple(comps)
        self.support = (lo, hi)
        self.order = order
        self.seams = tuple(sorted({s for c in comps
                                   for s in (*c.seams, *c.support) if lo < s < hi}))
        self.descriptor = {"kind": "vector",
                           "components": [c.descriptor for c in comps]}

    @property
    def dim(self) -> int:
        return len(self.components)

    def norm_sq_derivative(self, xs: np.ndarray, k: int) -> np.ndarray:
        """Sum over components of |f_c^(k)(x)|^2."""
        total = np.zeros(np.asarray(xs).shape, dtype=np.float64)
        for c in self.components:
            d = c.jet(xs)[k]
            total += d * d
        return total


def vector_function(components: Sequence[JetFunction]) -> VectorJetFunction:
    """Bundle scalar jet functions into a vector-valued one."""
    return VectorJetFunction(components)


# window tables for the default verification corpus: six bumps at varied
# positions/widths plus one product of overlapping bumps, per interval side
_INTERIOR_WINDOWS = ((0.04, 0.30), (0.18, 0.52), (0.35, 0.92),
                     (0.08, 0.80), (0.55, 0.95), (0.22, 0.34))
_INTERIOR_PRODUCT = ((0.10, 0.60), (0.30, 0.90))
_EXTERIOR_WINDOWS = ((1.05, 1.45), (1.20, 2.60), (1.90, 7.50),
                     (1.10, 1.80), (3.60, 4.90), (1.50, 2.40))
_EXTERIOR_PRODUCT = ((1.20, 3.00), (2.00, 6.00))


def default_corpus(side: str, rho: float, max_order: int) -> list:
    """Deterministic test-function corpus for one interval side."""
    if side == "interior":
        windows, pw = _INTERIOR_WINDOWS, _INTERIOR_PRODUCT
    elif side == "exterior":
        windows, pw = _EXTERIOR_WINDOWS, _EXTERIOR_PRODUCT
    else:
        raise ValueError(f"side must be 'interior' or 'exterior', got {side!r}")
    rho = float(rho)
    funcs = [bump(lo * rho, hi * rho, max_order) for lo, hi in windows]
    funcs.append(product(bump(pw[0][0] * rho, pw[0][1] * rho, max_order),
                         bump(pw[1][0] * rho, pw[1][1] * rho, max_order)))
    return funcs
