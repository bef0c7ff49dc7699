"""Quadrature tests: rule construction, Gaussian expectations against the
adaptive-trapezoid oracle, Jacobians against finite differences."""

import numpy as np
import pytest
from scipy.special import roots_hermite

from balanced_net.model import CHANNELS, CustomRate, MacroState, TanhAffine, constant_rate
from balanced_net.quadrature import (DEFAULT_ORDER, balance_residual,
                                     gauss_expect, gauss_hermite,
                                     gaussian_density, jacobian_K, jacobian_v,
                                     variance_drive)

from oracles import (balance_oracle, fd_jacobian_K, fd_jacobian_v,
                     trapezoid_expect, variance_drive_oracle)


class TestRule:
    def test_weights_sum_and_symmetry(self):
        for order in (2, 16, 64, DEFAULT_ORDER):
            rule = gauss_hermite(order)
            assert abs(rule.weights.sum() - np.sqrt(np.pi)) < 1e-12
            assert np.array_equal(rule.nodes, -rule.nodes[::-1])
            assert np.all(rule.weights > 0)

    def test_matches_scipy_roots(self):
        # eigenvector components below ~1e-20 are unresolvable by the
        # tridiagonal eigensolver, so weights under ~1e-40 may be dropped or
        # noisy; they contribute < 1e-40 to any bounded integral.  Compare
        # the numerically meaningful bulk against scipy's independent method.
        for order in (16, 64, 256):
            rule = gauss_hermite(order)
            x, w = roots_hermite(order)
            keep = w > 1e-12
            idx = np.argmin(np.abs(rule.nodes[None, :] - x[keep, None]), axis=1)
            assert np.max(np.abs(rule.nodes[idx] - x[keep])) < 1e-12
            assert np.max(np.abs((rule.weights[idx] - w[keep]) / w[keep])) < 1e-10
            # bulk captures the whole mass
            assert rule.weights[rule.weights > 1e-12].sum() == pytest.approx(
                np.sqrt(np.pi), abs=1e-9)

    def test_polynomial_exactness(self):
        # order-n rule integrates monomials up to degree 2n-1 exactly
        rule = gauss_hermite(8)
        # E[Z^4] = 3 for standard normal via the sqrt(2) substitution
        f = CustomRate(bound=np.inf, lipschitz=np.inf, func=lambda y: y ** 4)
        assert gauss_expect(f, 0.0, 1.0, rule) == pytest.approx(3.0, rel=1e-13)


class TestDensity:
    def test_values(self):
        assert gaussian_density(1.0, 0.0) == pytest.approx(0.3989422804014327, abs=1e-15)
        assert gaussian_density(2.0, 0.0) == pytest.approx(0.28209479177387814, abs=1e-15)

    def test_normalization(self):
        for K in (0.1, 1.0, 10.0):
            s = np.sqrt(K)
            x = np.linspace(-12 * s, 12 * s, 200_001)
            total = np.trapezoid(gaussian_density(K, x), x)
            assert abs(total - 1.0) < 1e-10

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gaussian_density(0.0, 0.0)
        with pytest.raises(ValueError):
            gaussian_density(-1.0, 0.0)


class TestGaussExpect:
    def test_constant_rate(self):
        f = constant_rate(1.0)
        for v, K in [(0.0, 0.0), (1.3, 0.7), (-2.0, 5.0)]:
            assert gauss_expect(f, v, K) == pytest.approx(1.0, abs=1e-14)

    def test_odd_symmetry_at_origin(self):
        # centered Gaussian kills the odd tanh part: E = scale * offset
        f = TanhAffine(0.5, 2, 1)
        assert gauss_expect(f, 0.0, 1.0) == pytest.approx(1.0, abs=1e-13)

    def test_zero_variance_is_point_eval(self):
        f = TanhAffine(0.5, 2, 1)
        assert gauss_expect(f, 0.7, 0.0) == f(0.7)

    def test_against_trapezoid_oracle_frozen(self):
        # oracle value computed by the adaptive trapezoid rule
        f = TanhAffine(0.5, 2, 1)
        got = gauss_expect(f, 0.7, 1.3)
        assert got == pytest.approx(1.1874946632222385, abs=1e-10)
        assert abs(got - trapezoid_expect(f, 0.7, 1.3)) < 1e-8

    def test_bounded_by_rate_range(self, params):
        rng_pts = np.random.default_rng(5)
        for _ in range(25):
            v = rng_pts.uniform(-5, 5)
            K = rng_pts.uniform(0.0, 10.0)
            for ch in CHANNELS:
                f = params.rate(ch)
                val = gauss_expect(f, v, K)
                assert 0.0 < val <= f.bound + 1e-12

    def test_default_order_converged(self, params):
        # doubling the default order moves nothing above 1e-10 on the
        # working domain (|v| <= 5, K <= 5)
        big = gauss_hermite(2 * DEFAULT_ORDER)
        base = gauss_hermite(DEFAULT_ORDER)
        worst = 0.0
        for v in (-5.0, -1.0, 0.3, 5.0):
            for K in (0.25, 1.0, 5.0):
                for ch in CHANNELS:
                    f = params.rate(ch)
                    worst = max(worst, abs(gauss_expect(f, v, K, base)
                                           - gauss_expect(f, v, K, big)))
        assert worst < 1e-10

    def test_order_64_insufficient_for_wide_variance(self, params):
        # documents why the default order is far above 64: tanh poles sit
        # close to the real axis once K is large
        f = params.rate("ei")  # steepest gain in the preset
        lo = gauss_expect(f, 0.7, 10.0, gauss_hermite(64))
        hi = gauss_expect(f, 0.7, 10.0, gauss_hermite(DEFAULT_ORDER))
        assert abs(lo - hi) > 1e-7


class TestBalanceResidual:
    def test_symmetric_point(self, params):
        # all four preset rates average to 1 at the origin
        F_e, F_i = balance_residual(MacroState(0.0, 0.0, 1.0, 1.0), params)
        assert F_e == pytest.approx(-0.5, abs=1e-12)
        assert F_i == pytest.approx(0.0, abs=1e-12)

    def test_zero_coupling(self, params):
        p0 = params.replace(c_ee=0.0, c_ei=0.0, c_ie=0.0, c_ii=0.0)
        F_e, F_i = balance_residual(MacroState(0.3, -0.4, 1.0, 2.0), p0)
        assert F_e == 0.0 and F_i == 0.0

    def test_against_oracle_random_points(self, params):
        rng_pts = np.random.default_rng(11)
        for _ in range(50):
            m = MacroState(rng_pts.uniform(-3, 3), rng_pts.uniform(-3, 3),
                           rng_pts.uniform(0.1, 5), rng_pts.uniform(0.1, 5))
            got = balance_residual(m, params)
            want = balance_oracle(params, m)
            assert abs(got[0] - want[0]) < 1e-8
            assert abs(got[1] - want[1]) < 1e-8

    def test_frozen_value(self, params):
        got = balance_residual(MacroState(0.3, -0.2, 1.0, 0.5), params)
        assert got[0] == pytest.approx(-0.1492248991819647, abs=1e-9)
        assert got[1] == pytest.approx(0.07566696947564022, abs=1e-9)


class TestVarianceDrive:
    def test_symmetric_point(self, params):
        S_e, S_i = variance_drive(MacroState(0.0, 0.0, 1.0, 1.0), params)
        assert S_e == pytest.approx(3.25, abs=1e-12)
        assert S_i == pytest.approx(0.5, abs=1e-12)

    def test_zero_coupling(self, params):
        p0 = params.replace(c_ee=0.0, c_ei=0.0, c_ie=0.0, c_ii=0.0)
        assert variance_drive(MacroState(0.1, 0.2, 1.0, 1.0), p0) == (0.0, 0.0)

    def test_frozen_value_and_oracle(self, params):
        m = MacroState(0.3, -0.2, 1.0, 0.5)
        got = variance_drive(m, params)
        assert got[0] == pytest.approx(2.9489489139637697, abs=1e-9)
        assert got[1] == pytest.approx(0.4930199169918007, abs=1e-9)
        want = variance_drive_oracle(params, m)
        assert abs(got[0] - want[0]) < 1e-8
        assert abs(got[1] - want[1]) < 1e-8

    def test_strictly_positive(self, params):
        rng_pts = np.random.default_rng(13)
        for _ in range(20):
            m = MacroState(rng_pts.uniform(-3, 3), rng_pts.uniform(-3, 3),
                           rng_pts.uniform(0.0, 5), rng_pts.uniform(0.0, 5))
            S_e, S_i = variance_drive(m, params)
            assert S_e > 0 and S_i > 0


class TestJacobians:
    def test_zero_coupling(self, params):
        p0 = params.replace(c_ee=0.0, c_ei=0.0, c_ie=0.0, c_ii=0.0)
        m = MacroState(0.1, 0.2, 1.0, 1.0)
        assert np.all(jacobian_v(m, p0) == 0.0)
        assert np.all(jacobian_K(m, p0) == 0.0)

    def test_sign_pattern(self, params):
        rng_pts = np.random.default_rng(17)
        for _ in range(10):
            m = MacroState(rng_pts.uniform(-3, 3), rng_pts.uniform(-3, 3),
                           rng_pts.uniform(0.1, 5), rng_pts.uniform(0.1, 5))
            J = jacobian_v(m, params)
            assert J[0, 0] > 0 and J[1, 0] > 0
            assert J[0, 1] < 0 and J[1, 1] < 0

    def test_jacobian_v_vs_finite_differences(self, params):
        rng_pts = np.random.default_rng(19)
        for _ in range(100):
            ve, vi = rng_pts.uniform(-3, 3, size=2)
            Ke, Ki = rng_pts.uniform(0.1, 5, size=2)

            def fn(a, b):
                return balance_residual(MacroState(a, b, Ke, Ki), params)

            J = jacobian_v(MacroState(ve, vi, Ke, Ki), params)
            J_fd = fd_jacobian_v(fn, ve, vi)
            scale = np.maximum(np.abs(J_fd), 1e-3)
            assert np.max(np.abs(J - J_fd) / scale) < 1e-5

    def test_jacobian_K_vs_finite_differences(self, params):
        rng_pts = np.random.default_rng(23)
        for _ in range(100):
            ve, vi = rng_pts.uniform(-3, 3, size=2)
            Ke, Ki = rng_pts.uniform(0.1, 5, size=2)

            def fnK(a, b):
                return balance_residual(MacroState(ve, vi, a, b), params)

            J = jacobian_K(MacroState(ve, vi, Ke, Ki), params)
            J_fd = fd_jacobian_K(fnK, Ke, Ki)
            scale = np.maximum(np.abs(J_fd), 1e-3)
            assert np.max(np.abs(J - J_fd) / scale) < 1e-5

    def test_jacobian_K_linear_rate_is_zero(self, params):
        # zero second derivative: variance has no effect on the expectation slope
        lin = CustomRate(bound=np.inf, lipschitz=1.0, func=lambda y: y + 10.0,
                         deriv=lambda y: np.ones_like(np.asarray(y, dtype=float)),
                         deriv2=lambda y: np.zeros_like(np.asarray(y, dtype=float)))
        p_lin = params.replace(f_ee=lin, f_ei=lin, f_ie=lin, f_ii=lin)
        J = jacobian_K(MacroState(0.4, -0.3, 1.0, 2.0), p_lin)
        assert np.max(np.abs(J)) < 1e-12

    def test_jacobian_K_rejects_zero_variance(self, params):
        with pytest.raises(ValueError):
            jacobian_K(MacroState(0.0, 0.0, 0.0, 1.0), params)

    def test_custom_rate_fd_fallback(self, params):
        # no analytic derivatives: the dispatcher falls back to differences
        soft = CustomRate(bound=2.0, lipschitz=0.5,
                          func=lambda y: 1.0 + 0.5 * np.tanh(0.5 * y))
        p_c = params.replace(f_ee=soft)
        m = MacroState(0.4, -0.1, 1.2, 0.8)
        J = jacobian_v(m, p_c)
        ref = TanhAffine(0.5, 2.0, 0.5)  # same shape, analytic path
        J_ref = jacobian_v(m, params.replace(f_ee=ref))
        assert abs(J[0, 0] - J_ref[0, 0]) < 1e-6
