"""Hydrodynamic-limit integration.

The limiting system evolves the population variances by
dK_a/dt = -2 K_a / tau_a + Sigma_a while the means stay pinned to the
balance constraints F_e = F_i = 0.  Differentiating the constraints gives
the mean velocity dv = -Jv^{-1} Jk dK, which is used as a predictor inside
classical RK4 steps; after every step the means are re-solved by Newton
projection onto the constraint set, so the recorded trajectory carries no
constraint drift.  Integration stops early (recording the exit time) as
soon as the state leaves the balanced manifold or the Jacobian degenerates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SingularJacobianError
from .manifold import classify, eig2x2
from .model import MacroState, NetworkParams
from .quadrature import (QuadratureRule, balance_residual, gauss_hermite,
                         jacobian_K, jacobian_v, solve_2x2, variance_drive)

DET_FLOOR_STEP = 1e-10    # hard floor inside RK stages
DET_FLOOR_REPORT = 1e-6   # exit-time reporting floor
ZETA_FLOOR_REPORT = 1e-3
PROJECTION_TOL = 1e-12


@dataclass
class LimitTrajectory:
    """Recorded limit path: strictly increasing times, macro states, the
    spectral margin and Jacobian determinant, and the exit time if hit."""

    times: np.ndarray
    v_e: np.ndarray
    v_i: np.ndarray
    K_e: np.ndarray
    K_i: np.ndarray
    F_e: np.ndarray
    F_i: np.ndarray
    zetas: np.ndarray
    det_Jvs: np.ndarray
    eta_hit: Optional[float] = None
    eta_reason: Optional[str] = None
    pred_proj_gap: float = 0.0  # max per-step ||v_pred - v_projected||

    def state_at(self, i: int) -> MacroState:
        return MacroState(self.v_e[i], self.v_i[i], self.K_e[i], self.K_i[i])

    def __len__(self) -> int:
        return self.times.shape[0]


def limit_rhs(m: MacroState, p: NetworkParams,
              rule: Optional[QuadratureRule] = None) -> tuple[float, float, float, float]:
    """Time derivatives (dv_e, dv_i, dK_e, dK_i) of the limit system.

    Raises SingularJacobianError when |det Jv| < 1e-10 and the constraint
    velocity is nonzero (approach to the exit time).
    """
    if rule is None:
        rule = gauss_hermite()
    S_e, S_i = variance_drive(m, p, rule)
    dK = np.array([-2.0 * m.K_e / p.tau_e + S_e, -2.0 * m.K_i / p.tau_i + S_i])
    Jk = jacobian_K(m, p, rule) if (m.K_e > 0 and m.K_i > 0) else np.zeros((2, 2))
    rhs = Jk @ dK
    Jv = jacobian_v(m, p, rule)
    dv = -solve_2x2(Jv, rhs, det_floor=DET_FLOOR_STEP, where="limit_rhs")
    return float(dv[0]), float(dv[1]), float(dK[0]), float(dK[1])


def _project_means(v_e: float, v_i: float, K_e: float, K_i: float,
                   p: NetworkParams, rule: QuadratureRule,
                   tol: float = PROJECTION_TOL, max_iter: int = 25) -> tuple[float, float]:
    """Newton-project the means onto {F = 0} at fixed variances."""
    x = np.array([v_e, v_i])
    for _ in range(max_iter):
        F = np.array(balance_residual(MacroState(x[0], x[1], K_e, K_i), p, rule))
        if np.max(np.abs(F)) <= tol:
            return float(x[0]), float(x[1])
        J = jacobian_v(MacroState(x[0], x[1], K_e, K_i), p, rule)
        x = x + solve_2x2(J, -F, det_floor=DET_FLOOR_STEP, where="projection")
    raise SingularJacobianError(0.0, "projection failed to converge")


def integrate_limit(start: MacroState, p: NetworkParams, T: float, h: float,
                    rule: Optional[QuadratureRule] = None,
                    enforce_manifold: bool = True) -> LimitTrajectory:
    """Integrate the limit system from ``start`` to time T with step h.

    ``enforce_manifold=False`` skips the membership gate and the Newton
    projection (pure RK4 on the predictor field); this keeps degenerate
    configurations such as constant rates, whose Jacobian is identically
    zero, integrable for validation against closed forms.
    """
    if h <= 0 or T <= 0:
        raise ValueError("T and h must be positive")
    if rule is None:
        rule = gauss_hermite()

    n_steps = int(round(T / h))
    times = [0.0]
    cols = {k: [] for k in ("v_e", "v_i", "K_e", "K_i", "F_e", "F_i", "zeta", "det")}

    def record(m: MacroState):
        F_e, F_i = balance_residual(m, p, rule)
        J = jacobian_v(m, p, rule)
        e1, e2 = eig2x2(J)
        cols["v_e"].append(m.v_e)
        cols["v_i"].append(m.v_i)
        cols["K_e"].append(m.K_e)
        cols["K_i"].append(m.K_i)
        cols["F_e"].append(F_e)
        cols["F_i"].append(F_i)
        cols["zeta"].append(-max(e1.real, e2.real))
        cols["det"].append(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
        return cols["zeta"][-1]

    eta_hit = None
    eta_reason = None
    gap = 0.0

    zeta0 = record(start)
    if enforce_manifold:
        rep = classify(start, p, rule)
        if not rep.in_U:
            return _finish(times, cols, 0.0, "initial state off the balanced manifold", gap)

    y = start.as_array()

    def rhs_vec(v):
        return np.array(limit_rhs(MacroState(v[0], v[1], v[2], v[3]), p, rule))

    for step in range(n_steps):
        t_next = (step + 1) * h
        try:
            k1 = rhs_vec(y)
            k2 = rhs_vec(y + 0.5 * h * k1)
            k3 = rhs_vec(y + 0.5 * h * k2)
            k4 = rhs_vec(y + h * k3)
        except SingularJacobianError as exc:
            eta_hit, eta_reason = times[-1], f"singular Jacobian in stage ({exc})"
            break
        y_pred = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if y_pred[2] <= 0 or y_pred[3] <= 0:
            eta_hit, eta_reason = times[-1], "variance left the positive cone"
            break
        if enforce_manifold:
            try:
                ve, vi = _project_means(y_pred[0], y_pred[1], y_pred[2], y_pred[3], p, rule)
            except SingularJacobianError as exc:
                eta_hit, eta_reason = times[-1], f"projection failed ({exc})"
                break
            gap = max(gap, float(np.hypot(ve - y_pred[0], vi - y_pred[1])))
            y = np.array([ve, vi, y_pred[2], y_pred[3]])
        else:
            y = y_pred

        times.append(t_next)
        zeta = record(MacroState(y[0], y[1], y[2], y[3]))
        if enforce_manifold and (zeta <= 0.0 or abs(cols["det"][-1]) < DET_FLOOR_STEP):
            eta_hit, eta_reason = t_next, "left the balanced manifold"
            break

    return _finish(times, cols, eta_hit, eta_reason, gap)


def _finish(times, cols, eta_hit, eta_reason, gap) -> LimitTrajectory:
    return LimitTrajectory(
        times=np.asarray(times),
        v_e=np.asarray(cols["v_e"]),
        v_i=np.asarray(cols["v_i"]),
        K_e=np.asarray(cols["K_e"]),
        K_i=np.asarray(cols["K_i"]),
        F_e=np.asarray(cols["F_e"]),
        F_i=np.asarray(cols["F_i"]),
        zetas=np.asarray(cols["zeta"]),
        det_Jvs=np.asarray(cols["det"]),
        eta_hit=eta_hit,
        eta_reason=eta_reason,
        pred_proj_gap=gap,
    )


def detect_eta(traj: LimitTrajectory,
               det_floor: float = DET_FLOOR_REPORT,
               zeta_floor: float = ZETA_FLOOR_REPORT) -> Optional[float]:
    """First recorded time where |det Jv| <= det_floor or zeta <= zeta_floor."""
    hit = np.nonzero((np.abs(traj.det_Jvs) <= det_floor) | (traj.zetas <= zeta_floor))[0]
    if hit.size == 0:
        return None
    return float(traj.times[hit[0]])
