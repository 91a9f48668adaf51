"""Iterated logarithms, normalized iterated logarithms, iterated exponentials,
and the four composite right-hand-side weight families.

Direction of the logarithm argument per variant (the single most error-prone
detail; pinned here and exercised directly by the tests):

    variant      interval      argument of ln_p / L_p
    -----------  ------------  ----------------------
    exterior ln  (rho, inf)    ln_p(x / gamma)
    exterior L   (rho, inf)    L_p(tau / x)
    interior ln  (0, rho)      ln_p(gamma / x)
    interior L   (0, rho)      L_p(x / tau)

All transcendental evaluation runs in 80-bit extended precision
(numpy longdouble) and is rounded to double at the API boundary; iterated
logarithms lose precision near their domain edges and the extra mantissa
bits keep the composite weights accurate to well below every contract
tolerance.  Refinement depth for ln variants is capped at 4 because the
iterated exponential e_5 overflows every binary floating-point format, so
the hypothesis gamma >= e_5 * rho could never be satisfied by representable
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .constants import Alpha, CoefficientTable, constant_A, constant_B
from .params import ProblemParams, validate_params

__all__ = [
    "LN_DEPTH_CAP",
    "WeightSpec",
    "iter_exp",
    "iter_ln",
    "norm_L",
    "weight_value",
    "weight_term_labels",
    "weight_terms_array",
    "WeightEvaluator",
    "log_identity_check",
    "l_series_tail",
    "LSeriesSum",
]

LN_DEPTH_CAP = 4

_LD = np.longdouble
_E_TOWER_LD = [_LD(0.0), _LD(1.0)]
for _ in range(3):
    _E_TOWER_LD.append(np.exp(_E_TOWER_LD[-1]))  # e_2, e_3, e_4


def iter_exp(j: int) -> float:
    """Iterated exponential e_0 = 0, e_{j+1} = exp(e_j); j <= 4 only."""
    if j < 0:
        raise ValueError("iterated exponential index must be non-negative")
    if j > LN_DEPTH_CAP:
        raise OverflowError(f"e_{j} exceeds every floating-point range (index cap {LN_DEPTH_CAP})")
    return float(_E_TOWER_LD[j])


def iter_ln(j: int, x) -> Union[float, np.ndarray]:
    """j-fold iterated logarithm; defined for x > e_{j-1}."""
    if j < 1:
        raise ValueError("iterated logarithm index must be >= 1")
    if j - 1 > LN_DEPTH_CAP:
        raise ValueError(
            f"iter_ln({j}, x) needs x > e_{j - 1}, which overflows every floating-point format"
        )
    xs = np.asarray(x, dtype=_LD)
    if np.any(xs <= _E_TOWER_LD[j - 1]):
        raise ValueError(f"iter_ln({j}, x) requires x > e_{j - 1}")
    v = np.log(xs)
    for _ in range(j - 1):
        v = np.log(v)
    out = np.asarray(v, dtype=np.float64)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def norm_L(j: int, s) -> Union[float, np.ndarray]:
    """Normalized iterated logarithm: L_1(s) = (1 - ln s)^(-1), L_{j+1} = L_1 o L_j."""
    if j < 1:
        raise ValueError("normalized logarithm index must be >= 1")
    v = np.asarray(s, dtype=_LD)
    for _ in range(j):
        if np.any(v <= 0.0):
            raise ValueError("norm_L argument left the domain (non-positive iterate)")
        lv = np.log(v)
        if np.any(lv == 1.0) or np.any(lv > 1.0):
            raise ValueError("norm_L undefined at ln(s) >= 1 somewhere along the iteration")
        v = 1.0 / (1.0 - lv)
    out = np.asarray(v, dtype=np.float64)
    return float(out) if np.isscalar(s) or np.ndim(s) == 0 else out


@dataclass(frozen=True)
class WeightSpec:
    """Validated right-hand-side weight family for one inequality instance.

    ``depth`` is the refinement depth N (0 disables all logarithmic terms);
    ``n_infinite`` replaces the finite refinement sums of the L variants with
    the full convergent series.
    """

    params: ProblemParams

    def __post_init__(self) -> None:
        validate_params(self.params)

    @property
    def variant(self) -> str:
        return self.params.variant

    @property
    def side(self) -> str:
        return self.params.side

    @property
    def l(self) -> int:
        return self.params.l

    @property
    def depth(self) -> Optional[int]:
        return self.params.depth

    @property
    def n_infinite(self) -> bool:
        return self.params.depth is None

    @property
    def alpha(self) -> Alpha:
        return self.params.alpha

    @property
    def anchor(self) -> Fraction:
        return self.params.anchor


def _anchor_ld(spec: WeightSpec) -> np.longdouble:
    a = spec.anchor
    return _LD(a.numerator) / _LD(a.denominator)


def _ln_chain(z: np.ndarray, depth: int) -> list:
    """[ln_1(z), ..., ln_depth(z)] in extended precision."""
    chain = []
    v = z
    for _ in range(depth):
        v = np.log(v)
        chain.append(v)
    return chain


def _l_chain(s: np.ndarray, depth: int) -> list:
    """[L_1(s), ..., L_depth(s)] in extended precision."""
    chain = []
    v = s
    for _ in range(depth):
        v = 1.0 / (1.0 - np.log(v))
        chain.append(v)
    return chain


def _l_product_series(s: np.ndarray, rel_tol: float = 1e-12, max_terms: int = 1_000_000):
    """sum_{k>=1} prod_{j<=k} L_j(s)^2 with a closed-form tail estimate.

    The iterates L_j(s) increase to the fixed point 1 like 1 - 2/j, so the
    running products a_k decay like k^(-4) and direct summation to rel_tol
    would take ~1e4 terms.  Instead, once the fixed-point gap delta = 1 - L
    is small the local recurrence delta' = delta - delta^2/2 telescopes the
    remaining tail into a_k * (q/3) * (1 - 1/q)^2 with q = 2/delta; the
    neglected delta^3 drift makes this accurate to O(delta^2 log(1/delta)),
    which sets the stopping rule.  Returns (sum, terms_used).
    """
    u = np.asarray(s, dtype=_LD).ravel()
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValueError("the infinite refinement series requires s in (0, 1)")
    n = u.size
    total = np.zeros(n, dtype=_LD)
    final_u = np.ones(n, dtype=_LD)
    final_prod = np.zeros(n, dtype=_LD)
    idx = np.arange(n)
    cur_u = u.copy()
    cur_prod = np.ones(n, dtype=_LD)
    k = 0
    while idx.size and k < max_terms:
        k += 1
        cur_u = 1.0 / (1.0 - np.log(cur_u))
        cur_prod = cur_prod * (cur_u * cur_u)
        total[idx] += cur_prod
        delta = 1.0 - cur_u
        err = cur_prod * delta * (2.0 * np.log(2.0 / np.maximum(delta, 1e-30)))
        keep = err > rel_tol * total[idx]
        if not np.all(keep):
            done = ~keep
            final_u[idx[done]] = cur_u[done]
            final_prod[idx[done]] = cur_prod[done]
            idx, cur_u, cur_prod = idx[keep], cur_u[keep], cur_prod[keep]
    if idx.size:
        raise ValueError("refinement series did not converge (argument too close to 1)")
    delta = 1.0 - final_u
    q = 2.0 / np.where(delta > 0, delta, 1.0)
    tail = final_prod * (q / 3.0) * (1.0 - 1.0 / q) ** 2
    out = total + tail
    return out.reshape(np.asarray(s).shape), k


@dataclass(frozen=True)
class LSeriesSum:
    """Audit record for a truncated refinement series."""

    partial_sum: float
    truncation_index: int
    first_omitted_term: float
    tail_safety_factor: float  # estimated tail / first omitted term


def l_series_tail(s: float, tol: float, max_terms: int = 1_000_000) -> LSeriesSum:
    """Partial sum of sum_k prod_{j<=k} L_j(s)^2, truncated at term < tol.

    The partial sum underestimates the true value by roughly the first
    omitted term times the recorded safety factor (the factor grows like
    2/(3(1 - L_k)) because consecutive terms decay slowly).
    """
    if not (0.0 < s < 1.0):
        raise ValueError("l_series_tail requires s in (0, 1)")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    u = _LD(s)
    total = _LD(0.0)
    prod = _LD(1.0)
    k = 0
    while k < max_terms:
        k += 1
        u = 1.0 / (1.0 - np.log(u))
        nxt = prod * u * u
        if nxt < tol:
            delta = 1.0 - u
            q = 2.0 / delta if delta > 0 else np.inf
            safety = float((q / 3.0) * (1.0 - 1.0 / q) ** 2) if np.isfinite(q) else np.inf
            return LSeriesSum(float(total), k - 1, float(nxt), safety)
        prod = nxt
        total += nxt
    raise ValueError(f"series did not reach term < {tol} within {max_terms} terms")


def weight_term_labels(spec: WeightSpec) -> list:
    """Stable labels for the additive weight terms, in evaluation order."""
    l = spec.l
    if spec.n_infinite:
        return (["A", "B[*]"]
                + [f"cA[{j}]" for j in range(2, l + 1)]
                + [f"cB[{j},*]" for j in range(2, l + 1)])
    n = spec.depth
    labels = ["A"]
    labels.extend(f"B[{k}]" for k in range(1, n + 1))
    if n >= 1:
        labels.extend(f"cA[{j}]" for j in range(2, l + 1))
    labels.extend(f"cB[{j},{k}]" for j in range(2, l + 1) for k in range(1, n))
    return labels


def _assemble_terms(spec: WeightSpec, coeffs: CoefficientTable, z_ld: np.ndarray,
                    series_fn) -> np.ndarray:
    l = spec.l
    alpha = spec.alpha
    if coeffs.m != l:
        raise ValueError("coefficient table order must equal the refinement order l")
    A_l = float(constant_A(l, alpha))
    B_l = float(constant_B(l, alpha))
    cA = {j: float(coeffs.abs_even(j)) * float(constant_A(j, 0)) for j in range(2, l + 1)}
    cB = {j: float(coeffs.abs_even(j)) * float(constant_B(j, 0)) for j in range(2, l + 1)}

    rows = [np.full(np.asarray(z_ld).shape, A_l, dtype=np.float64)]
    if spec.n_infinite:
        series = series_fn(z_ld)
        L1 = 1.0 / (1.0 - np.log(z_ld))
        rows.append(np.asarray(B_l * series, dtype=np.float64))
        inner = series / (L1 * L1) - 1.0  # sum_{k>=1} prod_{p<=k} L_{p+1}^2
        for j in range(2, l + 1):
            rows.append(np.asarray(cA[j] * L1 ** (2 * j), dtype=np.float64))
        for j in range(2, l + 1):
            rows.append(np.asarray(cB[j] * L1 ** (2 * j) * inner, dtype=np.float64))
        return np.stack(rows)

    n = spec.depth
    if spec.variant == "ln":
        chain = _ln_chain(z_ld, n)
        inv_sq = [1.0 / (c * c) for c in chain]
    else:
        chain = _l_chain(z_ld, n)
        inv_sq = [c * c for c in chain]  # L terms enter with positive even powers
    prod = np.ones_like(z_ld)
    partials = []
    for k in range(n):
        prod = prod * inv_sq[k]
        partials.append(prod)
    for k in range(n):
        rows.append(np.asarray(B_l * partials[k], dtype=np.float64))
    if n >= 1:
        first = inv_sq[0]
        for j in range(2, l + 1):
            rows.append(np.asarray(cA[j] * first ** j, dtype=np.float64))
        inner_prod = np.ones_like(z_ld)
        inner_partials = []
        for k in range(1, n):
            inner_prod = inner_prod * inv_sq[k]
            inner_partials.append(inner_prod)
        for j in range(2, l + 1):
            fj = first ** j
            for k in range(n - 1):
                rows.append(np.asarray(cB[j] * fj * inner_partials[k], dtype=np.float64))
    return np.stack(rows)


def weight_terms_array(spec: WeightSpec, coeffs: CoefficientTable, x: np.ndarray) -> np.ndarray:
    """All weight terms at the points x, shape (n_terms, n).

    Each row is one additive term of the composite weight; the full
    right-hand-side density at x is x^(alpha-2l) * (sum of rows) * |f^(m-l)|^2.
    The constants include A(l,alpha), B(l,alpha), |c_2j| A(j,0), |c_2j| B(j,0);
    at exceptional alpha the leading row is identically zero, which realizes
    the convention that the leading term is dropped there.
    """
    xs = np.asarray(x, dtype=np.float64)
    z_ld = _weight_argument(spec, xs)
    return _assemble_terms(spec, coeffs, z_ld, lambda z: _l_product_series(z)[0])


class _SeriesTable:
    """Piecewise-Chebyshev table of the series s -> sum_k prod_j L_j(s)^2.

    The series has branch points at s = 0 and s = 1, so a single polynomial
    over a wide window cannot reach 1e-13; on segments graded geometrically
    toward both ends the function is analytic well inside each Bernstein
    ellipse and degree 32 reaches machine level.  One table serves every
    caller (the series does not depend on the weight parameters); it is
    self-checked at off-node probes on construction.
    """

    S_MIN = 1e-8
    S_MAX = 0.995
    DEGREE = 32

    def __init__(self) -> None:
        edges = []
        s = self.S_MIN
        while s < 0.2:
            edges.append(s)
            s *= 2.0
        edges += [0.2, 0.4, 0.6, 0.8]
        t = 0.2  # distance to 1, halved per segment
        while 1.0 - t < self.S_MAX:
            t *= 0.5
            edges.append(1.0 - t)
        edges.append(self.S_MAX)
        self.edges = np.array(sorted(set(edges)))
        k = np.arange(self.DEGREE + 1)
        ref = np.cos(np.pi * k / self.DEGREE)  # Chebyshev-Lobatto nodes
        nodes = []
        for lo, hi in zip(self.edges[:-1], self.edges[1:]):
            nodes.append(0.5 * (hi + lo) + 0.5 * (hi - lo) * ref)
        all_nodes = np.concatenate(nodes)
        vals, _ = _l_product_series(np.asarray(all_nodes, dtype=_LD))
        vals = np.asarray(vals, dtype=np.float64)
        self.coef = []
        nseg = len(self.edges) - 1
        for i in range(nseg):
            seg_vals = vals[i * (self.DEGREE + 1):(i + 1) * (self.DEGREE + 1)]
            self.coef.append(np.polynomial.chebyshev.chebfit(ref, seg_vals, self.DEGREE))
        self._self_check()

    def _self_check(self) -> None:
        probes = []
        for lo, hi in zip(self.edges[:-1], self.edges[1:]):
            probes.extend((lo + (hi - lo) * f for f in (0.13, 0.57, 0.83)))
        probes = np.array(probes)
        direct, _ = _l_product_series(np.asarray(probes, dtype=_LD))
        direct = np.asarray(direct, dtype=np.float64)
        rel = np.max(np.abs(self(probes) - direct) / np.abs(direct))
        if rel > 1e-12:
            raise RuntimeError(f"series table self-check failed (max rel err {rel:.3e})")

    def covers(self, s_lo: float, s_hi: float) -> bool:
        return self.S_MIN <= s_lo and s_hi <= self.S_MAX

    def __call__(self, s) -> np.ndarray:
        sv = np.asarray(s, dtype=np.float64)
        out = np.empty_like(sv)
        seg = np.clip(np.searchsorted(self.edges, sv, side="right") - 1,
                      0, len(self.coef) - 1)
        for i in np.unique(seg):
            sel = seg == i
            lo, hi = self.edges[i], self.edges[i + 1]
            t = (2.0 * sv[sel] - (hi + lo)) / (hi - lo)
            out[sel] = np.polynomial.chebyshev.chebval(t, self.coef[i])
        return out


_SERIES_TABLE = None


def _series_table() -> _SeriesTable:
    global _SERIES_TABLE
    if _SERIES_TABLE is None:
        _SERIES_TABLE = _SeriesTable()
    return _SERIES_TABLE


class WeightEvaluator:
    """Weight terms bound to one x-window, for repeated quadrature calls.

    For the infinite refinement series the evaluation goes through the shared
    Chebyshev table when the window's argument range is covered by it, and
    falls back to direct tail-corrected summation otherwise.
    """

    def __init__(self, spec: WeightSpec, coeffs: CoefficientTable, x_window) -> None:
        self.spec = spec
        self.coeffs = coeffs
        self._series = None
        if spec.n_infinite:
            lo, hi = (float(x_window[0]), float(x_window[1]))
            ends = _weight_argument(spec, np.array([lo, hi], dtype=np.float64))
            s_lo, s_hi = float(min(ends)), float(max(ends))
            if not (0.0 < s_lo <= s_hi < 1.0):
                raise ValueError("series argument window must lie inside (0, 1)")
            table = _series_table()
            if table.covers(s_lo, s_hi):
                self._series = table

    def __call__(self, x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=np.float64)
        z_ld = _weight_argument(self.spec, xs)
        if self.spec.n_infinite and self._series is not None:
            return _assemble_terms(self.spec, self.coeffs, np.asarray(z_ld, np.float64),
                                   self._series)
        return _assemble_terms(self.spec, self.coeffs, z_ld,
                               lambda z: _l_product_series(z)[0])


def _weight_argument(spec: WeightSpec, xs: np.ndarray) -> np.ndarray:
    """ln/L argument per the direction table, in extended precision."""
    anchor = _anchor_ld(spec)
    x_ld = np.asarray(xs, dtype=_LD)
    if spec.variant == "ln":
        return anchor / x_ld if spec.side == "interior" else x_ld / anchor
    return x_ld / anchor if spec.side == "interior" else anchor / x_ld


def weight_value(spec: WeightSpec, coeffs: CoefficientTable, x: float) -> dict:
    """Per-term weight breakdown at a single point, keyed by term label."""
    arr = weight_terms_array(spec, coeffs, np.array([float(x)]))
    return {label: float(v[0]) for label, v in zip(weight_term_labels(spec), arr)}


def log_identity_check(depth: int, x: float) -> float:
    """Relative residual of the refinement-sum identity under t = ln x.

    Both sides of

        sum_{k<=N} prod_{j<=k} [ln_j x]^(-2)
            = t^(-2) * (1 + sum_{k<=N-1} prod_{j<=k} [ln_j t]^(-2))

    are evaluated independently in extended precision.
    """
    if depth < 1:
        raise ValueError("identity requires depth >= 1")
    xv = _LD(x)
    if depth <= LN_DEPTH_CAP and not xv > _E_TOWER_LD[depth]:
        raise ValueError(f"identity requires x > e_{depth}")
    chain = _ln_chain(xv, depth)
    lhs = _LD(0.0)
    prod = _LD(1.0)
    for c in chain:
        prod = prod / (c * c)
        lhs = lhs + prod
    t = np.log(xv)
    inner = _LD(0.0)
    prod_t = _LD(1.0)
    tc = _ln_chain(t, depth - 1)
    for c in tc:
        prod_t = prod_t / (c * c)
        inner = inner + prod_t
    rhs = (1.0 + inner) / (t * t)
    return float(abs(lhs - rhs) / abs(rhs))
