"""Core type tests: firing rates, micro/macro moments, initial conditions."""

import numpy as np
import pytest

from balanced_net import rng
from balanced_net.model import (CHANNELS, MacroState, MicroState, TanhAffine,
                                channel_source, channel_target, constant_rate,
                                firing_rate_eval, init_micro, macro_of_micro)


def test_channels_enumeration():
    assert CHANNELS == ("ee", "ei", "ie", "ii")
    assert channel_target("ei") == "e"
    assert channel_source("ei") == "i"


class TestTanhAffine:
    def test_origin_values(self):
        # both published rate families evaluate to 1 at the origin
        assert firing_rate_eval(TanhAffine(0.5, 2, 1), 0.0) == pytest.approx(1.0, abs=1e-15)
        assert firing_rate_eval(TanhAffine(1, 1, 0.5), 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_saturation_bound(self):
        f = TanhAffine(0.5, 2, 1)
        assert f.bound == pytest.approx(1.5)
        assert f(1e3) == pytest.approx(1.5, abs=1e-12)
        assert f(1e3) <= f.bound

    def test_positive_on_dense_grid(self, params):
        # pointwise positivity over [-100, 100] for every preset family,
        # including the offset-1 families whose infimum is 0
        x = np.linspace(-100, 100, 20001)
        for ch in CHANNELS:
            f = params.rate(ch)
            vals = f(x)
            assert np.all(vals > 0.0), ch
            assert np.all(vals <= f.bound * (1 + 1e-15)), ch

    def test_matches_naive_form_in_safe_range(self):
        f = TanhAffine(0.7, 1.8, 1.3)
        x = np.linspace(-20, 20, 4001)
        naive = 0.7 * (np.tanh(1.3 * x) + 1.8)
        assert np.max(np.abs(f(x) - naive)) < 1e-14

    def test_derivatives_match_finite_differences(self):
        f = TanhAffine(0.5, 2, 1.5)
        x = np.linspace(-3, 3, 61)
        h = 1e-6
        d1 = (f(x + h) - f(x - h)) / (2 * h)
        d2 = (f.deriv(x + h) - f.deriv(x - h)) / (2 * h)
        assert np.max(np.abs(f.deriv(x) - d1)) < 1e-8
        assert np.max(np.abs(f.deriv2(x) - d2)) < 1e-8

    def test_lipschitz_constant(self):
        f = TanhAffine(0.5, 2, 1.3)
        assert f.lipschitz == pytest.approx(0.65)
        x = np.linspace(-5, 5, 1001)
        assert np.max(f.deriv(x)) <= f.lipschitz * (1 + 1e-12)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            TanhAffine(0.5, 0.5, 1.0)  # offset < 1 goes negative
        with pytest.raises(ValueError):
            TanhAffine(-1.0, 2.0, 1.0)


def test_constant_rate():
    f = constant_rate(1.0, bound=2.0)
    assert f(0.3) == 1.0
    assert f.deriv(0.3) == 0.0
    assert f.const_value == 1.0
    with pytest.raises(ValueError):
        constant_rate(1.0, bound=0.5)


class TestMacroOfMicro:
    def test_constant_vectors(self):
        s = MicroState(0.0, np.ones(5), np.zeros(5))
        m = macro_of_micro(s)
        assert (m.v_e, m.v_i, m.K_e, m.K_i) == (1.0, 0.0, 0.0, 0.0)

    def test_two_point_symmetric(self):
        s = MicroState(0.0, np.array([-1.0, 1.0]), np.zeros(2))
        m = macro_of_micro(s)
        assert m.v_e == 0.0
        assert m.K_e == 1.0  # population variance, divisor n

    def test_gaussian_sample_moments(self):
        # 1e4 draws from N(2, 0.25); bands sized from the CLT
        key = rng.derive_key(7, rng.STREAM_INIT, 0)
        u = 2.0 + 0.5 * rng.standard_normal_block(key, 10_000)
        s = MicroState(0.0, u, np.zeros(10_000))
        m = macro_of_micro(s)
        assert abs(m.v_e - 2.0) <= 0.02
        assert abs(m.K_e - 0.25) <= 0.01

    def test_translation_equivariance(self):
        u = np.sin(np.arange(50) * 0.7)
        s1 = MicroState(0.0, u, u)
        s2 = MicroState(0.0, u + 3.25, u)
        m1, m2 = macro_of_micro(s1), macro_of_micro(s2)
        assert m2.v_e == pytest.approx(m1.v_e + 3.25, rel=1e-12)
        assert m2.K_e == pytest.approx(m1.K_e, rel=1e-12)

    def test_scale_equivariance(self):
        u = np.cos(np.arange(50) * 0.3)
        m1 = macro_of_micro(MicroState(0.0, u, u))
        m2 = macro_of_micro(MicroState(0.0, 2.0 * u, u))
        assert m2.v_e == pytest.approx(2.0 * m1.v_e, rel=1e-12)
        assert m2.K_e == pytest.approx(4.0 * m1.K_e, rel=1e-12)

    def test_requires_sync(self):
        s = MicroState(1.0, np.ones(3), np.ones(3),
                       last_e=np.zeros(3), last_i=np.full(3, 1.0))
        with pytest.raises(ValueError):
            macro_of_micro(s)


class TestInitMicro:
    def test_zero_variance(self, params_small):
        s = init_micro(0.5, -0.25, 0.0, 0.0, params_small, seed=1)
        assert np.all(s.u_e == 0.5)
        assert np.all(s.u_i == -0.25)

    def test_clt_bands(self, params):
        p = params.replace(n=10_000)
        s = init_micro(2.0, 0.0, 1.0, 1.0, p, seed=42)
        m = macro_of_micro(s)
        assert abs(m.v_e - 2.0) <= 0.04
        assert abs(m.K_e - 1.0) <= 0.03

    def test_same_seed_bitwise(self, params_small):
        a = init_micro(0.1, 0.2, 1.0, 0.5, params_small, seed=9)
        b = init_micro(0.1, 0.2, 1.0, 0.5, params_small, seed=9)
        assert np.array_equal(a.u_e, b.u_e)
        assert np.array_equal(a.u_i, b.u_i)
        c = init_micro(0.1, 0.2, 1.0, 0.5, params_small, seed=10)
        assert not np.array_equal(a.u_e, c.u_e)

    def test_populations_independent(self, params_small):
        s = init_micro(0.0, 0.0, 1.0, 1.0, params_small, seed=3)
        assert not np.array_equal(s.u_e, s.u_i)


def test_macro_state_rejects_negative_variance():
    with pytest.raises(ValueError):
        MacroState(0.0, 0.0, -1e-9, 0.0)
