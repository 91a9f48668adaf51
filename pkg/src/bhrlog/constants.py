"""Exact rational computation of the leading constants and the coefficients
of the even characteristic polynomial attached to the weighted inequalities.

For order ``m`` and power weight ``alpha`` the polynomial is

    P(lam) = prod_{j=1..m} (lam^2 - ((2j-1-alpha)/2)^2),

its constant coefficient has magnitude A(m, alpha) and its quadratic
coefficient has magnitude 4*B(m, alpha), where

    A(m, alpha) = prod_{j=1..m} ((2j-1-alpha)/2)^2,
    B(m, alpha) = 4^(-m) * sum_{k=1..m} prod_{j != k} (2j-1-alpha)^2.

Everything here is pure rational arithmetic (``fractions.Fraction``), so the
structural properties of the coefficients can be asserted as exact equalities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

__all__ = [
    "Alpha",
    "CoefficientTable",
    "constant_A",
    "constant_B",
    "constant_A_tilde",
    "expand_characteristic",
    "characteristic_roots",
]

RationalLike = Union[int, str, Fraction]


@dataclass(frozen=True)
class Alpha:
    """Power-weight exponent, either an exact rational or a flagged real.

    Exact mode keeps a ``Fraction`` so membership in the exceptional set
    {2j-1 : 1 <= j <= l} is decidable with no tolerance.  Approximate mode
    keeps a float; exact-equality questions are then unanswerable and the
    corresponding operations refuse to run.
    """

    value: Union[Fraction, float]

    def __post_init__(self) -> None:
        if not isinstance(self.value, (Fraction, float)):
            raise TypeError(f"Alpha value must be Fraction or float, got {type(self.value)!r}")

    @classmethod
    def exact(cls, value: RationalLike) -> "Alpha":
        """Exact alpha from an integer, a Fraction, or a decimal/ratio string."""
        if isinstance(value, bool):
            raise TypeError("bool is not a valid alpha")
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, str):
            return cls(Fraction(value))
        raise TypeError(f"cannot build exact Alpha from {type(value)!r}")

    @classmethod
    def approx(cls, value: float) -> "Alpha":
        return cls(float(value))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def is_exceptional(self, order: int) -> bool:
        """Exact test for alpha in {2j-1 : 1 <= j <= order}."""
        if not self.is_exact:
            raise ValueError("exceptional-set membership is only decidable in exact mode")
        v = self.value
        return v.denominator == 1 and 1 <= v <= 2 * order - 1 and v.numerator % 2 == 1

    def __str__(self) -> str:
        return str(self.value)


def _as_alpha(alpha: Union[Alpha, RationalLike]) -> Alpha:
    if isinstance(alpha, Alpha):
        return alpha
    return Alpha.exact(alpha)


def _check_order(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"order must be a positive integer, got {m!r}")


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients c_0..c_{2m} of the expanded characteristic polynomial."""

    m: int
    alpha: Alpha
    coeffs: tuple  # 2m+1 exact Fractions, ascending degree

    def __post_init__(self) -> None:
        if len(self.coeffs) != 2 * self.m + 1:
            raise ValueError("coefficient table must have 2m+1 entries")

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def abs_even(self, j: int) -> Fraction:
        """|c_{2j}| for 0 <= j <= m."""
        return abs(self.coeffs[2 * j])

    def evaluate(self, lam: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * lam + c
        return acc


def constant_A(m: int, alpha: Union[Alpha, RationalLike]) -> Union[Fraction, float]:
    """A(m, alpha) = prod_{j=1..m} ((2j-1-alpha)/2)^2.

    Exactly 0 iff alpha lies in the exceptional set {2j-1 : j <= m}.
    Approximate-mode input is evaluated in 80-bit extended precision and
    rounded to double at the boundary.
    """
    _check_order(m)
    a = _as_alpha(alpha)
    if a.is_exact:
        acc = Fraction(1)
        for j in range(1, m + 1):
            acc *= Fraction(2 * j - 1 - a.value, 2) ** 2
        return acc
    acc_ld = np.longdouble(1.0)
    av = np.longdouble(a.value)
    for j in range(1, m + 1):
        acc_ld *= ((np.longdouble(2 * j - 1) - av) / np.longdouble(2)) ** 2
    return float(acc_ld)


def constant_B(m: int, alpha: Union[Alpha, RationalLike]) -> Union[Fraction, float]:
    """B(m, alpha) = 4^(-m) * sum_{k=1..m} prod_{j != k} (2j-1-alpha)^2.

    For m = 1 the empty product is 1, so B(1, alpha) = 1/4 for every alpha.
    """
    _check_order(m)
    a = _as_alpha(alpha)
    if a.is_exact:
        total = Fraction(0)
        for k in range(1, m + 1):
            prod = Fraction(1)
            for j in range(1, m + 1):
                if j != k:
                    prod *= Fraction(2 * j - 1 - a.value) ** 2
            total += prod
        return total / Fraction(4) ** m
    av = np.longdouble(a.value)
    total_ld = np.longdouble(0.0)
    for k in range(1, m + 1):
        prod_ld = np.longdouble(1.0)
        for j in range(1, m + 1):
            if j != k:
                prod_ld *= (np.longdouble(2 * j - 1) - av) ** 2
        total_ld += prod_ld
    return float(total_ld / np.longdouble(4) ** m)


def constant_A_tilde(m: int, alpha: Union[Alpha, RationalLike]) -> Fraction:
    """Signed square root 2^(-m) * prod_{j=1..m} (2j-1-alpha) of A(m, alpha).

    This is the coefficient produced by differentiating the pure power
    x^((2m-1-alpha)/2) exactly m times; its square equals A(m, alpha).
    Exact mode only.
    """
    _check_order(m)
    a = _as_alpha(alpha)
    if not a.is_exact:
        raise ValueError("constant_A_tilde requires an exact alpha")
    acc = Fraction(1)
    for j in range(1, m + 1):
        acc *= Fraction(2 * j - 1 - a.value)
    return acc / Fraction(2) ** m


def expand_characteristic(m: int, alpha: Union[Alpha, RationalLike]) -> CoefficientTable:
    """Expand prod_{j=1..m} (lam^2 - ((2j-1-alpha)/2)^2) by iterated convolution.

    Exact mode only: the table's structural invariants (vanishing odd
    coefficients, alternating signs, |c_0| = A, |c_2| = 4B, monic) are
    rational identities and are asserted by the test suite, not here.
    """
    _check_order(m)
    a = _as_alpha(alpha)
    if not a.is_exact:
        raise ValueError("expand_characteristic requires an exact alpha")
    coeffs = [Fraction(1)]
    for j in range(1, m + 1):
        r2 = Fraction(2 * j - 1 - a.value, 2) ** 2
        # multiply by (lam^2 - r2): shift by two, subtract r2 * old
        new = [Fraction(0)] * (len(coeffs) + 2)
        for k, c in enumerate(coeffs):
            new[k + 2] += c
            new[k] -= r2 * c
        coeffs = new
    return CoefficientTable(m=m, alpha=a, coeffs=tuple(coeffs))


def characteristic_roots(m: int, alpha: Union[Alpha, RationalLike]) -> list:
    """All 2m roots +/-(2j-1-alpha)/2, j = 1..m, with multiplicity.

    At exceptional alpha a +/- pair collapses to a double root at 0.
    """
    _check_order(m)
    a = _as_alpha(alpha)
    roots = []
    for j in range(1, m + 1):
        if a.is_exact:
            r = Fraction(2 * j - 1 - a.value, 2)
        else:
            r = (2 * j - 1 - a.value) / 2.0
        roots.append(r)
        roots.append(-r)
    return roots
