"""Gaussian expectations of firing rates and their Jacobians.

All the population-level integrals reduce to the one-dimensional kernel
E[f(v + sqrt(K) Z)] with Z standard normal, evaluated by physicists'
Gauss-Hermite quadrature.  tanh-family integrands are meromorphic with
poles a distance pi/(2 c sqrt(2K)) off the real axis, so the quadrature
error decays like exp(-b sqrt(8 N)) rather than spectrally; the default
order below is sized for ~1e-11 worst-case error over the working domain
|v| <= 3, K <= 5 with gains up to 1.5.  Nodes come from the Golub-Welsch
symmetric tridiagonal eigenproblem (the numpy hermgauss recurrence
overflows past order ~380).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import SingularJacobianError
from .model import CustomRate, FiringRate, MacroState, NetworkParams, TanhAffine

DEFAULT_ORDER = 768

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes/weights for weight exp(-x^2); sum(weights) = sqrt(pi).

    ``prob_weights`` are the weights renormalized to sum exactly to one, so
    expectations of constants are exact and the small Golub-Welsch weight-sum
    drift never biases an integral.
    """

    nodes: np.ndarray
    weights: np.ndarray
    prob_weights: np.ndarray
    order: int

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")


@lru_cache(maxsize=8)
def gauss_hermite(order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Build a rule by Golub-Welsch: eigen-decomposition of the Jacobi matrix.

    At orders past ~400 the true extreme-tail weights sit below the smallest
    double-precision subnormal; the corresponding nodes are dropped (they
    cannot contribute to any bounded integrand), keeping every stored weight
    strictly positive and the node set symmetric.
    """
    off = np.sqrt(np.arange(1, order) / 2.0)
    x, vecs = eigh_tridiagonal(np.zeros(order), off)
    w = _SQRT_PI * vecs[0] ** 2
    # enforce exact symmetry about the origin
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    keep = w > 0.0
    x = x[keep]
    w = w[keep]
    pw = w / w.sum()
    for arr in (x, w, pw):
        arr.flags.writeable = False
    return QuadratureRule(nodes=x, weights=w, prob_weights=pw, order=order)


def gaussian_density(K: float, x):
    """Centered Gaussian density with variance K > 0."""
    if K <= 0:
        raise ValueError("variance must be positive")
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-x * x / (2.0 * K)) / math.sqrt(2.0 * math.pi * K)
    return float(out) if out.ndim == 0 else out


def gauss_expect(f: FiringRate, v: float, K: float,
                 rule: QuadratureRule | None = None) -> float:
    """E[f(v + sqrt(K) Z)]; exact point evaluation f(v) at K = 0."""
    if K < 0:
        raise ValueError("variance must be non-negative")
    if K == 0.0:
        return float(f(v))
    if rule is None:
        rule = gauss_hermite()
    y = v + math.sqrt(2.0 * K) * rule.nodes
    return float(rule.prob_weights @ np.asarray(f(y), dtype=np.float64))


def _expect_deriv(f: FiringRate, v: float, K: float, rule: QuadratureRule) -> float:
    """d/dv E[f(v + sqrt(K) Z)]: analytic derivative when available, else
    central differences with step 1e-6 * max(1, |v|)."""
    if isinstance(f, TanhAffine) or (isinstance(f, CustomRate) and f.deriv is not None):
        if K == 0.0:
            return float(f.deriv(v))
        y = v + math.sqrt(2.0 * K) * rule.nodes
        return float(rule.prob_weights @ np.asarray(f.deriv(y), dtype=np.float64))
    h = 1e-6 * max(1.0, abs(v))
    return (gauss_expect(f, v + 0.5 * h, K, rule)
            - gauss_expect(f, v - 0.5 * h, K, rule)) / h


def _expect_dK(f: FiringRate, v: float, K: float, rule: QuadratureRule) -> float:
    """d/dK E[f(v + sqrt(K) Z)] via the heat identity 0.5 E[f''] when second
    derivatives exist, else central differences in K with step 1e-6 * max(1, K)."""
    if K <= 0:
        raise ValueError("d/dK expectation needs K > 0")
    if isinstance(f, TanhAffine) or (isinstance(f, CustomRate) and f.deriv2 is not None):
        y = v + math.sqrt(2.0 * K) * rule.nodes
        return 0.5 * float(rule.prob_weights @ np.asarray(f.deriv2(y), dtype=np.float64))
    h = 1e-6 * max(1.0, K)
    return (gauss_expect(f, v, K + 0.5 * h, rule)
            - gauss_expect(f, v, max(K - 0.5 * h, 0.0), rule)) / h


def _channel_args(m: MacroState, ch: str):
    return (m.v_e, m.K_e) if ch[1] == "e" else (m.v_i, m.K_i)


def balance_residual(m: MacroState, p: NetworkParams,
                     rule: QuadratureRule | None = None) -> tuple[float, float]:
    """The two balance functions (F_e, F_i): net mean drive into each
    population divided by the n^(-1/2) scale.  Zero on the balanced manifold.
    """
    if rule is None:
        rule = gauss_hermite()
    E = {ch: gauss_expect(p.rate(ch), *_channel_args(m, ch), rule) for ch in ("ee", "ei", "ie", "ii")}
    F_e = p.c_ee * E["ee"] - p.c_ei * E["ei"]
    F_i = p.c_ie * E["ie"] - p.c_ii * E["ii"]
    return F_e, F_i


def variance_drive(m: MacroState, p: NetworkParams,
                   rule: QuadratureRule | None = None) -> tuple[float, float]:
    """Per-population variance production rates (Sigma_e, Sigma_i): squared
    couplings weighted by expected channel rates.  Strictly positive."""
    if rule is None:
        rule = gauss_hermite()
    E = {ch: gauss_expect(p.rate(ch), *_channel_args(m, ch), rule) for ch in ("ee", "ei", "ie", "ii")}
    S_e = p.c_ee ** 2 * E["ee"] + p.c_ei ** 2 * E["ei"]
    S_i = p.c_ie ** 2 * E["ie"] + p.c_ii ** 2 * E["ii"]
    return S_e, S_i


def jacobian_v(m: MacroState, p: NetworkParams,
               rule: QuadratureRule | None = None) -> np.ndarray:
    """2x2 Jacobian of (F_e, F_i) in (v_e, v_i); rows F, columns v.

    Each entry touches a single channel because F_e depends on v_e only
    through the ee term and on v_i only through the ei term (and likewise
    for F_i), giving the sign pattern [[+,-],[+,-]] for monotone rates.
    """
    if rule is None:
        rule = gauss_hermite()
    d = {ch: _expect_deriv(p.rate(ch), *_channel_args(m, ch), rule) for ch in ("ee", "ei", "ie", "ii")}
    return np.array([
        [p.c_ee * d["ee"], -p.c_ei * d["ei"]],
        [p.c_ie * d["ie"], -p.c_ii * d["ii"]],
    ])


def jacobian_K(m: MacroState, p: NetworkParams,
               rule: QuadratureRule | None = None) -> np.ndarray:
    """2x2 Jacobian of (F_e, F_i) in (K_e, K_i); requires K_e, K_i > 0."""
    if m.K_e <= 0 or m.K_i <= 0:
        raise ValueError("jacobian_K requires strictly positive variances")
    if rule is None:
        rule = gauss_hermite()
    d = {ch: _expect_dK(p.rate(ch), *_channel_args(m, ch), rule) for ch in ("ee", "ei", "ie", "ii")}
    return np.array([
        [p.c_ee * d["ee"], -p.c_ei * d["ei"]],
        [p.c_ie * d["ie"], -p.c_ii * d["ii"]],
    ])


def solve_2x2(J: np.ndarray, rhs: np.ndarray, det_floor: float = 1e-14,
              where: str = "") -> np.ndarray:
    """Solve J x = rhs by the explicit inverse, guarded by the determinant.

    A rhs that is exactly zero short-circuits to x = 0 so degenerate
    constant-rate configurations (J and rhs both zero) stay well defined.
    """
    if rhs[0] == 0.0 and rhs[1] == 0.0:
        return np.zeros(2)
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if abs(det) < det_floor:
        raise SingularJacobianError(det, where)
    return np.array([
        (J[1, 1] * rhs[0] - J[0, 1] * rhs[1]) / det,
        (J[0, 0] * rhs[1] - J[1, 0] * rhs[0]) / det,
    ])
