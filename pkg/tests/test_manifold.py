"""Balance solver and manifold classification tests."""

import numpy as np
import pytest

from balanced_net.errors import NoRootError
from balanced_net.manifold import classify, eig2x2, solve_balance
from balanced_net.model import CustomRate, MacroState
from balanced_net.quadrature import balance_residual

from oracles import balance_root_oracle

# frozen values from the nested-bisection / trapezoid oracle
ORACLE_ROOT_K11 = (-2.9632610858083996, -1.09978895183794)
ORACLE_ROOT_K105 = (-2.0483238849729415, -0.8108661674497972)


def _const_deriv_rate(d):
    """Synthetic rate with constant derivative d (for spectrum tests)."""
    return CustomRate(
        bound=np.inf, lipschitz=abs(d),
        func=lambda y: 100.0 + d * np.asarray(y, dtype=float),
        deriv=lambda y: np.full_like(np.asarray(y, dtype=float), d),
        deriv2=lambda y: np.zeros_like(np.asarray(y, dtype=float)))


class TestEig2x2:
    def test_diagonal(self):
        e1, e2 = eig2x2(np.array([[-1.0, 0.0], [0.0, -2.0]]))
        assert sorted([e1.real, e2.real]) == [-2.0, -1.0]
        assert e1.imag == e2.imag == 0.0

    def test_complex_pair(self):
        e1, e2 = eig2x2(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert e1 == pytest.approx(1j)
        assert e2 == pytest.approx(-1j)

    def test_characteristic_equation_random(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            J = rng.normal(size=(2, 2))
            tr = J[0, 0] + J[1, 1]
            det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
            for lam in eig2x2(J):
                res = abs(lam * lam - tr * lam + det)
                assert res <= 1e-10 * max(1.0, abs(tr), abs(det))


class TestSolveBalance:
    def test_experiment_1_residual_and_oracle(self, params):
        m_e, m_i = solve_balance(1.0, 1.0, params)
        F = balance_residual(MacroState(m_e, m_i, 1.0, 1.0), params)
        assert abs(F[0]) <= 1e-12 and abs(F[1]) <= 1e-12
        assert abs(m_e - ORACLE_ROOT_K11[0]) < 1e-6
        assert abs(m_i - ORACLE_ROOT_K11[1]) < 1e-6

    def test_experiment_2_residual_and_oracle(self, params):
        m_e, m_i = solve_balance(1.0, 0.5, params)
        F = balance_residual(MacroState(m_e, m_i, 1.0, 0.5), params)
        assert abs(F[0]) <= 1e-12 and abs(F[1]) <= 1e-12
        assert abs(m_e - ORACLE_ROOT_K105[0]) < 1e-6
        assert abs(m_i - ORACLE_ROOT_K105[1]) < 1e-6

    def test_bisection_oracle_reproduces_frozen_values(self, params):
        # regenerate (cheaply) the frozen oracle values to keep them honest
        got = balance_root_oracle(params, 1.0, 1.0, ve_bracket=(-6.0, -1.0))
        assert got[0] == pytest.approx(ORACLE_ROOT_K11[0], abs=1e-9)
        assert got[1] == pytest.approx(ORACLE_ROOT_K11[1], abs=1e-9)

    def test_symmetric_parameters(self, params):
        # populations made exchangeable: any solver answer must satisfy
        # F_e = F_i identically, so the residual contract still holds
        p_sym = params.replace(c_ee=1.0, c_ie=1.0, c_ei=1.5, c_ii=1.5,
                               f_ie=params.f_ee, f_ii=params.f_ei)
        m_e, m_i = solve_balance(1.0, 1.0, p_sym)
        F = balance_residual(MacroState(m_e, m_i, 1.0, 1.0), p_sym)
        assert abs(F[0]) <= 1e-12 and abs(F[1]) <= 1e-12

    def test_guess_basin(self, params):
        # starts within distance 1 of the root land on the same point
        root = solve_balance(1.0, 1.0, params)
        rng = np.random.default_rng(37)
        for _ in range(8):
            d = rng.uniform(-1, 1, size=2)
            d *= min(1.0, rng.uniform(0, 1) / (np.hypot(*d) + 1e-12))
            got = solve_balance(1.0, 1.0, params,
                                guess=(root[0] + d[0], root[1] + d[1]))
            assert got[0] == pytest.approx(root[0], abs=1e-9)
            assert got[1] == pytest.approx(root[1], abs=1e-9)

    def test_no_root_raises(self, params):
        # the degenerate preset with both cross-channel rates tied to their
        # target-form families has no balance point
        p_bad = params.replace(f_ei=params.f_ee.__class__(0.5, 2.0, 1.0),
                               f_ie=params.f_ii.__class__(1.0, 1.0, 0.5))
        with pytest.raises(NoRootError):
            solve_balance(1.0, 1.0, p_bad)


class TestClassify:
    def test_solved_point_in_U(self, params):
        for (ke, ki) in [(1.0, 1.0), (1.0, 0.5)]:
            m_e, m_i = solve_balance(ke, ki, params)
            rep = classify(MacroState(m_e, m_i, ke, ki), params)
            assert rep.in_U
            assert rep.zeta > 0
            assert abs(rep.residual[0]) <= 1e-12
            assert abs(rep.residual[1]) <= 1e-12

    def test_zero_coupling_not_in_U(self, params):
        p0 = params.replace(c_ee=0.0, c_ei=0.0, c_ie=0.0, c_ii=0.0)
        rep = classify(MacroState(0.7, -0.3, 1.0, 1.0), p0)
        assert rep.residual == (0.0, 0.0)
        assert rep.eig == (0j, 0j)
        assert not rep.in_U  # eigenvalues are not strictly negative

    def test_synthetic_diagonal_spectrum(self, params):
        # build J_v = [[-1, 0], [0, -2]] from constant-derivative rates
        p_syn = params.replace(
            c_ee=1.0, c_ei=0.0, c_ie=0.0, c_ii=1.0,
            f_ee=_const_deriv_rate(-1.0), f_ei=_const_deriv_rate(0.0),
            f_ie=_const_deriv_rate(0.0), f_ii=_const_deriv_rate(2.0))
        rep = classify(MacroState(0.0, 0.0, 1.0, 1.0), p_syn)
        assert rep.zeta == pytest.approx(1.0, abs=1e-10)

    def test_zeta_positive_iff_in_U(self, params):
        # on solved points the verdict is exactly the spectral sign
        rng = np.random.default_rng(41)
        for _ in range(5):
            ke, ki = rng.uniform(0.3, 2.0, size=2)
            m_e, m_i = solve_balance(ke, ki, params)
            rep = classify(MacroState(m_e, m_i, ke, ki), params)
            assert rep.in_U == (rep.zeta > 0)

    def test_report_formats(self, params):
        m_e, m_i = solve_balance(1.0, 1.0, params)
        rep = classify(MacroState(m_e, m_i, 1.0, 1.0), params)
        text = rep.format_text()
        assert "in_U" in text and "zeta" in text
        rec = rep.format_record()
        assert '"in_U": true' in rec
        import json
        parsed = json.loads(rec)
        assert parsed["v_e"] == pytest.approx(m_e)
