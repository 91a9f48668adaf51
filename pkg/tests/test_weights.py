"""Iterated/normalized logarithms, iterated exponentials, composite weights."""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bhrlog.constants import constant_A, constant_B, expand_characteristic
from bhrlog.params import ProblemParams
from bhrlog.weights import (
    WeightEvaluator,
    WeightSpec,
    _l_product_series,
    iter_exp,
    iter_ln,
    l_series_tail,
    log_identity_check,
    norm_L,
    weight_term_labels,
    weight_terms_array,
    weight_value,
)


def spec_for(m, l, depth, alpha, rho, anchor, side, variant):
    return WeightSpec(ProblemParams.make(m, l, depth, alpha, rho, anchor, side, variant))


class TestIterExp:
    def test_tower_values(self):
        assert iter_exp(0) == 0.0
        assert iter_exp(1) == 1.0
        assert iter_exp(2) == pytest.approx(math.e, rel=1e-15)
        assert iter_exp(3) == pytest.approx(math.exp(math.e), rel=1e-15)

    def test_tower_against_mpmath(self):
        with mpmath.workdps(40):
            v = mpmath.mpf(0)
            for j in range(5):
                assert iter_exp(j) == pytest.approx(float(v), rel=1e-15)
                v = mpmath.exp(v)

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            iter_exp(5)


class TestIterLn:
    def test_base_cases(self):
        assert iter_ln(1, math.e) == 1.0
        assert iter_ln(2, math.exp(math.e)) == pytest.approx(1.0, abs=1e-15)

    def test_against_composed_library_log(self):
        assert iter_ln(2, 20.0) == pytest.approx(math.log(math.log(20.0)), rel=5e-16)

    def test_boundary_value_at_tower(self):
        for j in range(1, 5):
            assert abs(iter_ln(j, iter_exp(j))) <= 1e-12

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            iter_ln(1, 0.0)
        with pytest.raises(ValueError):
            iter_ln(2, 1.0)
        with pytest.raises(ValueError):
            iter_ln(3, math.e)


class TestNormL:
    def test_fixed_point(self):
        assert norm_L(1, 1.0) == 1.0
        assert norm_L(2, 1.0) == 1.0

    def test_exponential_substitution(self):
        # L_1(e^(1-t)) = 1/t
        for t in (0.5, 1.0, 4.0, 10.0):
            assert norm_L(1, math.exp(1.0 - t)) == pytest.approx(1.0 / t, rel=1e-15)

    def test_domain_error_at_e(self):
        with pytest.raises(ValueError):
            norm_L(1, math.e)

    @given(s=st.floats(min_value=1e-6, max_value=1.0))
    @settings(max_examples=200, deadline=None)
    def test_bounded_on_unit_interval(self, s):
        for j in (1, 2, 3):
            v = norm_L(j, s)
            assert 0.0 < v <= 1.0


class TestLogIdentity:
    def test_trivial_n1(self):
        # both sides reduce to (ln x)^-2
        assert log_identity_check(1, math.e ** 2) == 0.0

    @pytest.mark.parametrize("depth", [1, 2, 3, 4])
    def test_residual_battery(self, depth):
        base = iter_exp(depth)
        for i in range(20):
            x = base * (1.5 + 0.7 * i)
            assert log_identity_check(depth, x) <= 1e-12

    def test_independent_high_precision_oracle(self):
        # recompute both sides with mpmath at 40 digits for a spot check
        depth, x = 3, 10.0 * iter_exp(3)
        with mpmath.workdps(40):
            xv = mpmath.mpf(x)
            lhs = mpmath.mpf(0)
            prod = mpmath.mpf(1)
            v = xv
            for _ in range(depth):
                v = mpmath.log(v)
                prod /= v * v
                lhs += prod
            t = mpmath.log(xv)
            rhs = mpmath.mpf(1)
            prod = mpmath.mpf(1)
            w = t
            for _ in range(depth - 1):
                w = mpmath.log(w)
                prod /= w * w
                rhs += prod
            rhs /= t * t
            assert float(abs(lhs - rhs) / rhs) <= 1e-30
        assert log_identity_check(depth, x) <= 1e-12

    def test_domain_guard(self):
        with pytest.raises(ValueError):
            log_identity_check(2, math.e)


class TestSeriesTail:
    def test_first_term_under_exponential_substitution(self):
        # s = e^(1-t) gives first term L_1(s)^2 = t^-2
        res = l_series_tail(math.exp(1.0 - 10.0), tol=1e-4)
        assert res.partial_sum == pytest.approx(0.01, rel=1e-2)

    def test_direct_summation_oracle(self):
        res = l_series_tail(0.1, tol=1e-16)
        u, total = 0.1, 0.0
        prod = 1.0
        for _ in range(res.truncation_index):
            u = 1.0 / (1.0 - math.log(u))
            prod *= u * u
            total += prod
        assert res.partial_sum == pytest.approx(total, rel=1e-12)
        assert res.first_omitted_term < 1e-16

    def test_underestimates_by_bounded_tail(self):
        res = l_series_tail(0.3, tol=1e-10)
        full, _ = _l_product_series(np.array([0.3]))
        missing = float(full[0]) - res.partial_sum
        assert 0 < missing <= 3.0 * res.tail_safety_factor * res.first_omitted_term

    def test_nonconvergence_near_one(self):
        with pytest.raises(ValueError):
            l_series_tail(1.0 - 1e-12, tol=1e-16, max_terms=5000)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            l_series_tail(1.5, tol=1e-6)
        with pytest.raises(ValueError):
            l_series_tail(0.5, tol=0.0)


class TestAcceleratedSeries:
    def test_against_brute_force(self):
        svals = np.array([0.05, 0.1, 0.5, 0.9])
        fast, _ = _l_product_series(svals)
        for i, s in enumerate(svals):
            u = np.longdouble(s)
            total = np.longdouble(0)
            prod = np.longdouble(1)
            for _ in range(3_000_000):
                u = 1.0 / (1.0 - np.log(u))
                prod *= u * u
                total += prod
                if prod < 1e-23 * total:
                    break
            assert float(fast[i]) == pytest.approx(float(total), rel=5e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            _l_product_series(np.array([1.0]))


class TestWeightValue:
    def test_interior_ln_example(self):
        spec = spec_for(1, 1, 1, "0", "1",
                        "2.71828182845904523536028747135266", "interior", "ln")
        coeffs = expand_characteristic(1, 0)
        terms = weight_value(spec, coeffs, math.exp(-1.0))
        # gamma/x = e*e, so the refinement factor is [ln e^2]^-2 = 1/4
        assert terms["A"] == pytest.approx(0.25, abs=1e-15)
        assert terms["B[1]"] == pytest.approx(1.0 / 16.0, rel=1e-14)

    def test_order_one_has_no_polynomial_terms(self):
        spec = spec_for(2, 1, 3, "0", "1", "16", "interior", "ln")
        labels = weight_term_labels(spec)
        assert labels == ["A", "B[1]", "B[2]", "B[3]"]

    def test_exterior_L_substitution(self):
        # x = rho*e^(t-1) with tau = rho makes the B factor (1/4) t^-2
        t = 7.0
        spec = spec_for(1, 1, 1, "0", "1", "1", "exterior", "L")
        coeffs = expand_characteristic(1, 0)
        terms = weight_value(spec, coeffs, math.exp(t - 1.0))
        assert terms["B[1]"] == pytest.approx(0.25 / t ** 2, rel=1e-14)

    def test_depth_zero_drops_all_log_terms(self):
        spec = spec_for(2, 2, 0, "1/2", "1", "16", "interior", "ln")
        coeffs = expand_characteristic(2, "1/2")
        labels = weight_term_labels(spec)
        assert labels == ["A"]
        terms = weight_value(spec, coeffs, 0.4)
        assert terms["A"] == pytest.approx(float(constant_A(2, Fraction(1, 2))))

    def test_exceptional_alpha_zeroes_leading_term(self):
        spec = spec_for(2, 2, 1, "1", "1", "16", "interior", "ln")
        coeffs = expand_characteristic(2, 1)
        terms = weight_value(spec, coeffs, 0.3)
        assert terms["A"] == 0.0
        assert terms["B[1]"] > 0.0

    def test_all_terms_nonnegative_on_grid(self):
        cases = [
            spec_for(3, 3, 3, "-1/2", "1", "16", "interior", "ln"),
            spec_for(3, 3, 2, "2", "1", "1/16", "exterior", "ln"),
            spec_for(3, 3, 3, "1/2", "1", "1", "interior", "L"),
            spec_for(3, 3, None, "0", "1", "1", "exterior", "L"),
        ]
        for spec in cases:
            coeffs = expand_characteristic(spec.l, spec.alpha)
            xs = (np.linspace(0.05, 0.93, 41) if spec.side == "interior"
                  else np.linspace(1.1, 7.0, 41))
            arr = weight_terms_array(spec, coeffs, xs)
            assert arr.shape[0] == len(weight_term_labels(spec))
            assert np.all(arr >= 0.0)

    def test_refinement_extends_previous_depth(self):
        # deeper refinements keep every existing term and add non-negative ones
        x = 0.37
        for l in (1, 3):
            coeffs = expand_characteristic(l, "1/2")
            prev = None
            for depth in (0, 1, 2, 3):
                spec = spec_for(3, l, depth, "1/2", "1", "16", "interior", "ln")
                terms = weight_value(spec, coeffs, x)
                assert all(v >= 0.0 for v in terms.values())
                if prev is not None:
                    assert set(prev) < set(terms)
                    for label, value in prev.items():
                        assert terms[label] == pytest.approx(value, rel=1e-15)
                    added = set(terms) - set(prev)
                    if l == 1:
                        assert len(added) == 1
                prev = terms

    def test_bsum_matches_log_identity_image(self):
        # under x = gamma e^t the exterior B-sum becomes
        # B * t^-2 * (1 + sum prod [ln_j t]^-2)
        gamma, depth, l = 1.0, 3, 2
        spec = spec_for(2, l, depth, "1/2", str(float(iter_exp(3)) * 1.01), "1",
                        "exterior", "ln")
        coeffs = expand_characteristic(l, "1/2")
        b_l = float(constant_B(l, Fraction(1, 2)))
        for t in (16.0, 20.0, 35.0):
            x = gamma * math.exp(t)
            terms = weight_value(spec, coeffs, x)
            bsum = sum(v for k, v in terms.items() if k.startswith("B["))
            inner = 1.0
            prod = 1.0
            v = t
            for _ in range(depth - 1):
                v = math.log(v)
                prod /= v * v
                inner += prod
            expected = b_l * inner / t ** 2
            assert bsum == pytest.approx(expected, rel=1e-12)

    def test_infinite_depth_dominates_finite(self):
        coeffs = expand_characteristic(2, "0")
        x = 0.55
        finite = spec_for(2, 2, 6, "0", "1", "1", "interior", "L")
        inf_spec = spec_for(2, 2, None, "0", "1", "1", "interior", "L")
        ft = weight_value(finite, coeffs, x)
        it = weight_value(inf_spec, coeffs, x)
        fin_b = sum(v for k, v in ft.items() if k.startswith("B["))
        assert it["B[*]"] > fin_b
        assert it["B[*]"] == pytest.approx(fin_b, rel=1e-2)  # series nearly exhausted

    def test_weight_evaluator_matches_direct(self):
        spec = spec_for(2, 2, None, "1/2", "1", "1", "interior", "L")
        coeffs = expand_characteristic(2, "1/2")
        ev = WeightEvaluator(spec, coeffs, (0.04, 0.95))
        xs = np.linspace(0.05, 0.94, 23)
        direct = weight_terms_array(spec, coeffs, xs)
        np.testing.assert_allclose(ev(xs), direct, rtol=5e-12)
