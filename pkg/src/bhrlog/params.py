"""Problem parameters for one inequality instance and their hypothesis checks.

Each of the four weight variants carries one domain hypothesis relating the
interval radius rho to the logarithmic anchor (gamma for ln variants, tau for
L variants).  rho and the anchor are kept as exact rationals; the iterated
exponentials e_N appearing in the ln-variant hypotheses are irrational, so
those comparisons use precomputed rational upper bounds (60-digit values
rounded outward).  A configuration is accepted only if it satisfies the
hypothesis against the outward-rounded bound, i.e. acceptance is always
mathematically safe; configurations within ~1e-50 of the irrational
threshold are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .constants import Alpha

__all__ = [
    "ProblemParams",
    "ParamError",
    "validate_params",
    "parse_rational",
    "e_tower_upper",
]

SIDES = ("interior", "exterior")
VARIANTS = ("ln", "L")
LN_DEPTH_CAP = 4  # e_5 overflows every floating-point format


class ParamError(ValueError):
    """Invalid configuration; message names the violated hypothesis."""


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Exact rational from an int, Fraction, decimal string, or 'p/q' string."""
    if isinstance(text, bool):
        raise ParamError("boolean is not a rational parameter")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParamError(f"cannot parse {text!r} as an exact rational") from exc


def _tower_bounds() -> list:
    bounds = [Fraction(0), Fraction(1)]
    with mpmath.workdps(60):
        v = mpmath.mpf(1)
        for _ in range(2, LN_DEPTH_CAP + 1):
            v = mpmath.exp(v)
            exact = Fraction(*mpmath.libmp.to_rational(v._mpf_))
            bounds.append(exact * (1 + Fraction(1, 10**50)))
    return bounds


_E_TOWER_UPPER = _tower_bounds()


def e_tower_upper(n: int) -> Fraction:
    """Rational upper bound for the iterated exponential e_n, n <= 4."""
    if not 0 <= n <= LN_DEPTH_CAP:
        raise ValueError(f"iterated exponential bound available only for 0 <= n <= {LN_DEPTH_CAP}")
    return _E_TOWER_UPPER[n]


@dataclass(frozen=True)
class ProblemParams:
    """One inequality instance: orders, refinement depth, weight, and geometry.

    ``depth`` is the number N of refinement terms (0 drops all logarithmic
    terms); ``None`` requests the infinite refinement series, which exists
    for the L variants only.  ``anchor`` is gamma for ln variants and tau for
    L variants.
    """

    m: int
    l: int
    depth: Optional[int]
    alpha: Alpha
    rho: Fraction
    anchor: Fraction
    side: str
    variant: str
    d: int = 1

    @classmethod
    def make(cls, m, l, depth, alpha, rho, anchor, side, variant, d=1) -> "ProblemParams":
        a = alpha if isinstance(alpha, Alpha) else Alpha.exact(parse_rational(alpha))
        dep = None if depth in (None, "inf", "infinity") else int(depth)
        p = cls(
            m=int(m),
            l=int(l),
            depth=dep,
            alpha=a,
            rho=parse_rational(rho),
            anchor=parse_rational(anchor),
            side=str(side),
            variant=str(variant),
            d=int(d),
        )
        validate_params(p)
        return p

    @property
    def infinite_depth(self) -> bool:
        return self.depth is None

    def interval(self) -> tuple:
        """Open interval carrying the test functions."""
        r = float(self.rho)
        return (0.0, r) if self.side == "interior" else (r, float("inf"))


def validate_params(p: ProblemParams) -> None:
    """Raise ParamError naming the violated hypothesis, if any."""
    if p.m < 1:
        raise ParamError(f"derivative order m must satisfy m >= 1 (got m={p.m})")
    if not 1 <= p.l <= p.m:
        raise ParamError(f"refinement order must satisfy 1 <= l <= m (got l={p.l}, m={p.m})")
    if p.side not in SIDES:
        raise ParamError(f"side must be one of {SIDES} (got {p.side!r})")
    if p.variant not in VARIANTS:
        raise ParamError(f"variant must be one of {VARIANTS} (got {p.variant!r})")
    if p.d < 1:
        raise ParamError(f"vector dimension must satisfy d >= 1 (got d={p.d})")
    if p.rho <= 0:
        raise ParamError(f"interval radius rho must be positive (got rho={p.rho})")
    if p.anchor <= 0:
        name = "gamma" if p.variant == "ln" else "tau"
        raise ParamError(f"log anchor {name} must be positive (got {name}={p.anchor})")
    if p.depth is None:
        if p.variant != "L":
            raise ParamError("infinite refinement depth N requires the L variant")
    else:
        if p.depth < 0:
            raise ParamError(f"refinement depth N must satisfy N >= 0 (got N={p.depth})")
        if p.variant == "ln" and p.depth > LN_DEPTH_CAP:
            raise ParamError(
                f"ln-variant depth N={p.depth} not representable: the hypothesis "
                f"compares against e_{p.depth}, which overflows every floating-point format "
                f"(cap N <= {LN_DEPTH_CAP})"
            )
    if p.depth == 0:
        return  # no logarithmic terms, hence no anchor hypothesis
    if p.variant == "ln":
        n = p.depth
        bound = e_tower_upper(n)
        if p.side == "interior":
            if p.anchor < bound * p.rho:
                raise ParamError(
                    f"interior ln-variant requires gamma >= e_{n} * rho "
                    f"(gamma={p.anchor}, e_{n}*rho ~= {float(bound * p.rho):.6g})"
                )
        else:
            if p.rho < bound * p.anchor:
                raise ParamError(
                    f"exterior ln-variant requires rho >= e_{n} * gamma "
                    f"(rho={p.rho}, e_{n}*gamma ~= {float(bound * p.anchor):.6g})"
                )
    else:
        if p.side == "interior":
            if p.anchor < p.rho:
                raise ParamError(
                    f"interior L-variant requires tau >= rho (tau={p.anchor}, rho={p.rho})"
                )
        else:
            if p.rho < p.anchor:
                raise ParamError(
                    f"exterior L-variant requires rho >= tau (rho={p.rho}, tau={p.anchor})"
                )
