"""Exact-arithmetic tests for the leading constants and polynomial coefficients."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bhrlog.constants import (
    Alpha,
    characteristic_roots,
    constant_A,
    constant_A_tilde,
    constant_B,
    expand_characteristic,
)


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


ALPHA_GRID = [Fraction(v) for v in (
    0, 1, -1, 2, -2, 3, 5, 7, 9, 11,
    Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3), Fraction(-2, 3),
    Fraction(22, 7), Fraction(7, 2), Fraction(-5, 2), Fraction(13, 4),
    Fraction(9, 4), Fraction(-11, 3), Fraction(1, 7), 4, 8, 13, Fraction(2, 5),
)]

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=60
)


class TestConstantA:
    def test_unweighted_double_factorial(self):
        for m in range(1, 9):
            expected = Fraction(double_factorial(2 * m - 1) ** 2, 4 ** m)
            assert constant_A(m, 0) == expected

    def test_known_values(self):
        assert constant_A(1, 0) == Fraction(1, 4)
        assert constant_A(2, 1) == 0
        assert constant_A(3, 0) == Fraction(225, 64)

    def test_zero_iff_exceptional(self):
        for m in range(1, 7):
            for a in ALPHA_GRID:
                alpha = Alpha.exact(a)
                if alpha.is_exceptional(m):
                    assert constant_A(m, alpha) == 0
                else:
                    assert constant_A(m, alpha) != 0

    @given(m=st.integers(1, 8), a=rationals)
    @settings(max_examples=200, deadline=None)
    def test_product_formula(self, m, a):
        expected = Fraction(1)
        for j in range(1, m + 1):
            expected *= Fraction(2 * j - 1 - a, 2) ** 2
        assert constant_A(m, Alpha.exact(a)) == expected


class TestConstantB:
    def test_order_one_is_quarter_for_every_alpha(self):
        for a in ALPHA_GRID:
            assert constant_B(1, a) == Fraction(1, 4)

    def test_value_m2(self):
        # hand evaluation of the k = 1, 2 sum: (9 + 1)/16
        assert constant_B(2, 0) == Fraction(5, 8)

    def test_b_equals_a_times_reciprocal_sum(self):
        for m in range(1, 9):
            for a in ALPHA_GRID:
                alpha = Alpha.exact(a)
                if alpha.is_exceptional(m):
                    continue
                s = sum(1 / Fraction(2 * j - 1 - a) ** 2 for j in range(1, m + 1))
                assert constant_B(m, alpha) == constant_A(m, alpha) * s

    def test_consistency_m2_alpha0(self):
        assert constant_B(2, 0) == constant_A(2, 0) * (Fraction(1) + Fraction(1, 9))


class TestCoefficientTable:
    def test_m1_alpha0(self):
        t = expand_characteristic(1, 0)
        assert list(t.coeffs) == [Fraction(-1, 4), 0, 1]

    def test_m2_alpha0(self):
        t = expand_characteristic(2, 0)
        assert list(t.coeffs) == [Fraction(9, 16), 0, Fraction(-5, 2), 0, 1]

    def test_structural_properties_exact(self):
        # odd coefficients vanish; even ones alternate in sign from the top;
        # |c_0| = A, |c_2| = 4B, c_2m = 1 -- all as exact rational identities
        for m in range(1, 9):
            for a in ALPHA_GRID:
                alpha = Alpha.exact(a)
                t = expand_characteristic(m, alpha)
                for j in range(1, m + 1):
                    assert t.coeffs[2 * j - 1] == 0
                for j in range(0, m + 1):
                    c = t.coeffs[2 * j]
                    assert c == 0 or (c > 0) == ((m - j) % 2 == 0)
                assert abs(t.coeffs[0]) == constant_A(m, alpha)
                assert abs(t.coeffs[2]) == 4 * constant_B(m, alpha)
                assert t.coeffs[2 * m] == 1

    @given(m=st.integers(1, 6), a=rationals)
    @settings(max_examples=100, deadline=None)
    def test_roots_annihilate_polynomial(self, m, a):
        alpha = Alpha.exact(a)
        t = expand_characteristic(m, alpha)
        for r in characteristic_roots(m, alpha):
            assert t.evaluate(r) == 0

    def test_exceptional_double_root(self):
        roots = characteristic_roots(1, 1)
        assert roots == [Fraction(0), Fraction(0)]

    def test_roots_m1_m2(self):
        assert set(characteristic_roots(1, 0)) == {Fraction(1, 2), Fraction(-1, 2)}
        assert set(characteristic_roots(2, 0)) == {
            Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2), Fraction(-3, 2)
        }

    def test_requires_exact_alpha(self):
        with pytest.raises(ValueError):
            expand_characteristic(2, Alpha.approx(0.3))


class TestApproximateMode:
    def test_continuity_at_exceptional_points(self):
        # A(m, 2j-1 + 10^-k) must decay monotonically toward the exceptional 0
        for m in (1, 2, 3):
            for j in range(1, m + 1):
                values = [constant_A(m, Alpha.approx((2 * j - 1) + 10.0 ** -k))
                          for k in (4, 8, 12)]
                assert values[0] > values[1] > values[2] > 0

    def test_matches_exact_at_rationals(self):
        for m in (1, 3, 5):
            for a in (Fraction(1, 2), Fraction(-7, 4)):
                exact = float(constant_A(m, Alpha.exact(a)))
                approx = constant_A(m, Alpha.approx(float(a)))
                assert approx == pytest.approx(exact, rel=1e-14)
                exact_b = float(constant_B(m, Alpha.exact(a)))
                approx_b = constant_B(m, Alpha.approx(float(a)))
                assert approx_b == pytest.approx(exact_b, rel=1e-14)

    def test_exceptional_membership_needs_exact(self):
        with pytest.raises(ValueError):
            Alpha.approx(1.0).is_exceptional(1)


class TestATilde:
    def test_square_is_A(self):
        for m in range(1, 6):
            for a in (Fraction(0), Fraction(1, 2), Fraction(-3, 2)):
                assert constant_A_tilde(m, a) ** 2 == constant_A(m, a)

    def test_sign_alternation_above_exceptional_band(self):
        # each factor 2j-1-alpha flips sign as alpha crosses 2j-1
        assert constant_A_tilde(1, 0) > 0
        assert constant_A_tilde(1, 2) < 0
        assert constant_A_tilde(2, 2) < 0
        assert constant_A_tilde(2, 4) > 0
