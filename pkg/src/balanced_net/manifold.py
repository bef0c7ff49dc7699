"""Balanced-manifold membership and the balance-point solver.

A macro state lies on the balanced manifold when both balance functions
vanish and the 2x2 mean-coupling Jacobian is Hurwitz (eigenvalues with
strictly negative real parts).  The spectral margin zeta is the negated
largest real part; it controls how strongly the mean drive pins the
population averages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NoRootError, SingularJacobianError
from .model import MacroState, NetworkParams
from .quadrature import QuadratureRule, balance_residual, gauss_hermite, jacobian_v, solve_2x2

RESIDUAL_TOL = 1e-12


def eig2x2(J: np.ndarray) -> Tuple[complex, complex]:
    """Eigenvalues of a real 2x2 matrix from trace and determinant."""
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        r = np.sqrt(disc)
        return complex(0.5 * (tr + r)), complex(0.5 * (tr - r))
    r = np.sqrt(-disc)
    return complex(0.5 * tr, 0.5 * r), complex(0.5 * tr, -0.5 * r)


@dataclass(frozen=True)
class ManifoldReport:
    state: MacroState
    residual: Tuple[float, float]
    eig: Tuple[complex, complex]
    det_Jv: float
    zeta: float
    in_U: bool

    def format_text(self) -> str:
        lines = [
            f"state      v_e={self.state.v_e:+.12g}  v_i={self.state.v_i:+.12g}  "
            f"K_e={self.state.K_e:.12g}  K_i={self.state.K_i:.12g}",
            f"residual   F_e={self.residual[0]:+.3e}  F_i={self.residual[1]:+.3e}",
            f"eigs       {self.eig[0]:.6g}  {self.eig[1]:.6g}",
            f"det_Jv     {self.det_Jv:+.6e}",
            f"zeta       {self.zeta:.6g}",
            f"in_U       {self.in_U}",
        ]
        return "\n".join(lines)

    def format_record(self) -> str:
        return (
            "{"
            f'"v_e": {self.state.v_e!r}, "v_i": {self.state.v_i!r}, '
            f'"K_e": {self.state.K_e!r}, "K_i": {self.state.K_i!r}, '
            f'"F_e": {self.residual[0]!r}, "F_i": {self.residual[1]!r}, '
            f'"eig_re": [{self.eig[0].real!r}, {self.eig[1].real!r}], '
            f'"eig_im": [{self.eig[0].imag!r}, {self.eig[1].imag!r}], '
            f'"det_Jv": {self.det_Jv!r}, "zeta": {self.zeta!r}, '
            f'"in_U": {str(self.in_U).lower()}'
            "}"
        )


def classify(m: MacroState, p: NetworkParams,
             rule: Optional[QuadratureRule] = None,
             residual_tol: float = RESIDUAL_TOL) -> ManifoldReport:
    """Evaluate residual, spectrum and manifold membership at a macro state."""
    if rule is None:
        rule = gauss_hermite()
    F_e, F_i = balance_residual(m, p, rule)
    J = jacobian_v(m, p, rule)
    e1, e2 = eig2x2(J)
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    max_re = max(e1.real, e2.real)
    in_u = (abs(F_e) <= residual_tol and abs(F_i) <= residual_tol and max_re < 0.0)
    return ManifoldReport(
        state=m,
        residual=(F_e, F_i),
        eig=(e1, e2),
        det_Jv=float(det),
        zeta=-max_re,
        in_U=in_u,
    )


def _grid_start(k_e: float, k_i: float, p: NetworkParams, rule: QuadratureRule,
                lo: float = -10.0, hi: float = 10.0, m: int = 41) -> Tuple[float, float]:
    """Coarse scan of |F_e| + |F_i| over a v-grid; returns the minimizer."""
    vs = np.linspace(lo, hi, m)
    best = (np.inf, 0.0, 0.0)
    for ve in vs:
        for vi in vs:
            F_e, F_i = balance_residual(MacroState(ve, vi, k_e, k_i), p, rule)
            r = abs(F_e) + abs(F_i)
            if r < best[0]:
                best = (r, ve, vi)
    return best[1], best[2]


def solve_balance(k_e: float, k_i: float, p: NetworkParams,
                  guess: Optional[Tuple[float, float]] = None,
                  rule: Optional[QuadratureRule] = None,
                  tol: float = RESIDUAL_TOL,
                  max_iter: int = 100) -> Tuple[float, float]:
    """Solve F_e = F_i = 0 for the population means at fixed variances.

    Damped Newton on the analytic Jacobian; without a guess, a 41x41 scan of
    [-10, 10]^2 picks the start.  Raises NoRootError when the iteration
    cannot reach ``tol`` and SingularJacobianError when the Jacobian
    degenerates at an iterate.
    """
    if k_e < 0 or k_i < 0:
        raise ValueError("variances must be non-negative")
    if rule is None:
        rule = gauss_hermite()
    x = np.array(guess if guess is not None else _grid_start(k_e, k_i, p, rule), dtype=float)

    def residual(v):
        return np.array(balance_residual(MacroState(v[0], v[1], k_e, k_i), p, rule))

    F = residual(x)
    best = (float(np.max(np.abs(F))), x.copy())
    for _ in range(max_iter):
        r0 = np.max(np.abs(F))
        if r0 <= tol:
            return float(x[0]), float(x[1])
        J = jacobian_v(MacroState(x[0], x[1], k_e, k_i), p, rule)
        try:
            step = solve_2x2(J, -F, det_floor=1e-14, where="solve_balance")
        except SingularJacobianError:
            # exchangeable populations give proportional rows (F_e == F_i):
            # take the minimal-norm step when the system is consistent
            step, *_ = np.linalg.lstsq(J, -F, rcond=None)
            if np.linalg.norm(J @ step + F) > 1e-8 * max(np.linalg.norm(F), 1e-300):
                raise
        lam = 1.0
        accepted = False
        for _ in range(30):
            xt = x + lam * step
            Ft = residual(xt)
            if np.max(np.abs(Ft)) < r0:
                x, F = xt, Ft
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            raise NoRootError(tuple(best[1]), best[0])
        if np.max(np.abs(F)) < best[0]:
            best = (float(np.max(np.abs(F))), x.copy())
    if np.max(np.abs(F)) <= tol:
        return float(x[0]), float(x[1])
    raise NoRootError(tuple(best[1]), best[0])
