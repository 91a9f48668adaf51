"""Truncated-Taylor arithmetic against closed-form derivatives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bhrlog.jets import (
    derivatives_from_taylor,
    taylor_compose,
    taylor_const,
    taylor_exp,
    taylor_from_derivatives,
    taylor_log,
    taylor_mul,
    taylor_pow,
    taylor_reciprocal,
    taylor_variable,
)

ORDER = 6
POINTS = np.array([0.31, 0.9, 1.7, 2.4])

coeff_lists = st.lists(
    st.floats(min_value=-3, max_value=3, allow_nan=False), min_size=ORDER + 1,
    max_size=ORDER + 1,
)


def _jet(coeffs):
    return np.array(coeffs, dtype=np.float64)[:, np.newaxis]


def test_variable_jet():
    v = taylor_variable(POINTS, 3)
    assert np.all(v[0] == POINTS)
    assert np.all(v[1] == 1.0)
    assert np.all(v[2:] == 0.0)


def test_product_against_leibniz_x2_expx():
    v = taylor_variable(POINTS, ORDER)
    jet = taylor_mul(taylor_mul(v, v), taylor_exp(v))
    derivs = derivatives_from_taylor(jet)
    for k in range(ORDER + 1):
        expected = np.exp(POINTS) * (POINTS ** 2 + 2 * k * POINTS + k * (k - 1))
        np.testing.assert_allclose(derivs[k], expected, rtol=1e-13)


def test_real_power_derivatives():
    v = taylor_variable(POINTS, ORDER)
    beta = -1.75
    derivs = derivatives_from_taylor(taylor_pow(v, beta))
    falling = 1.0
    for k in range(ORDER + 1):
        np.testing.assert_allclose(derivs[k], falling * POINTS ** (beta - k), rtol=1e-12)
        falling *= beta - k


def test_log_inverts_exp():
    v = taylor_variable(POINTS, ORDER)
    back = taylor_log(taylor_exp(v))
    np.testing.assert_allclose(back, v, atol=1e-12)


def test_reciprocal_times_self_is_one():
    v = taylor_variable(POINTS, ORDER)
    jet = taylor_mul(v, taylor_exp(v))
    one = taylor_mul(jet, taylor_reciprocal(jet))
    np.testing.assert_allclose(one[0], 1.0, rtol=1e-13)
    np.testing.assert_allclose(one[1:], 0.0, atol=1e-12)


def test_compose_exp_of_square():
    t = np.array([0.7, -0.4])
    v = taylor_variable(t, 5)
    inner = taylor_mul(v, v)
    outer = np.stack([np.exp(inner[0]) / math.factorial(k) for k in range(6)])
    derivs = derivatives_from_taylor(taylor_compose(outer, inner))
    e = np.exp(t * t)
    expected = [
        e,
        2 * t * e,
        (2 + 4 * t ** 2) * e,
        (12 * t + 8 * t ** 3) * e,
        (12 + 48 * t ** 2 + 16 * t ** 4) * e,
        (120 * t + 160 * t ** 3 + 32 * t ** 5) * e,
    ]
    for k in range(6):
        np.testing.assert_allclose(derivs[k], expected[k], rtol=1e-12)


def test_derivative_factor_roundtrip():
    rng = np.random.default_rng(7)
    c = rng.standard_normal((ORDER + 1, 5))
    np.testing.assert_allclose(taylor_from_derivatives(derivatives_from_taylor(c)), c)


@given(a=coeff_lists, b=coeff_lists)
@settings(max_examples=150, deadline=None)
def test_product_commutes(a, b):
    ja, jb = _jet(a), _jet(b)
    np.testing.assert_allclose(taylor_mul(ja, jb), taylor_mul(jb, ja), rtol=1e-12, atol=1e-12)


@given(a=coeff_lists, b=coeff_lists)
@settings(max_examples=150, deadline=None)
def test_exp_turns_sums_into_products(a, b):
    ja, jb = _jet(a), _jet(b)
    lhs = taylor_exp(ja + jb)
    rhs = taylor_mul(taylor_exp(ja), taylor_exp(jb))
    scale = np.max(np.abs(lhs)) + 1.0
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * scale)


@given(a=coeff_lists)
@settings(max_examples=100, deadline=None)
def test_integer_power_matches_repeated_product(a):
    ja = _jet(a)
    ja[0] = abs(ja[0]) + 1.0  # positive value part for the pow recurrence
    cubed = taylor_pow(ja, 3.0)
    direct = taylor_mul(taylor_mul(ja, ja), ja)
    scale = np.max(np.abs(direct)) + 1.0
    np.testing.assert_allclose(cubed, direct, atol=1e-10 * scale)


def test_compose_requires_matching_order():
    with pytest.raises(ValueError):
        taylor_compose(taylor_const(1.0, 3, (2,)), taylor_variable(np.zeros(2), 4))
