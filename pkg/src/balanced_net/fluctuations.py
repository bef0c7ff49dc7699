"""Compensated Poisson path statistics.

For a unit-rate counting process y, the compensated path w(t) = y(nt) - nt
concentrates at scale sqrt(n): the running sup obeys the sub-Gaussian bound
P(sup |w| >= x sqrt(n)) <= 2 exp(-x^2 / (4T)), and the per-path modulus of
continuity vanishes as the window shrinks.  Everything here is event-exact:
sups and moduli are computed from the jump times themselves, never from a
grid (grids appear only in test oracles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import rng
from .backend import kernels


@dataclass
class CompensatedPath:
    """Jump times (in t-units, sorted) of y(nt) on [0, horizon]."""

    n: int
    horizon: float
    times: np.ndarray

    @property
    def sup_abs(self) -> float:
        return sup_abs_deviation(self)


def sample_event_times(n: int, horizon: float, key: int) -> np.ndarray:
    """Unit-exponential gaps in y-time until n * horizon, returned in t-units."""
    total = n * horizon
    est = int(total + 10.0 * math.sqrt(total + 1.0) + 64)
    s = np.empty(0)
    start = 0
    offset = 0.0
    while True:
        gaps = -np.log(rng.uniform_block(key, est, start=start))
        block = offset + np.cumsum(gaps)
        s = np.concatenate([s, block])
        if s[-1] > total:
            break
        start += est
        offset = s[-1]
        est = max(64, est // 4)
    m = int(np.searchsorted(s, total, side="right"))
    return s[:m] / n


def simulate_compensated(n: int, T: float, seed: int,
                         trial: int = 0) -> CompensatedPath:
    """One compensated-path realization; (seed, trial) indexes the stream."""
    if n < 1 or T <= 0:
        raise ValueError("need n >= 1 and T > 0")
    key = rng.derive_key(seed, rng.STREAM_COUNTING, trial)
    return CompensatedPath(n=n, horizon=T, times=sample_event_times(n, T, key))


def sup_abs_deviation(path: CompensatedPath) -> float:
    """Exact sup of |w| over [0, horizon]: the sup of a compensated counting
    path is attained at a jump, just before a jump, or at the horizon."""
    n, T = path.n, path.horizon
    s = path.times * n  # jump positions in y-time
    N = s.shape[0]
    if N == 0:
        return n * T
    k = np.arange(1, N + 1)
    up = max(0.0, float(np.max(k - s)))
    low = min(0.0, float(np.min(k - 1 - s)), float(N - n * T))
    return max(up, -low)


def modulus_of_continuity(path: CompensatedPath, eps: float,
                          normalize: bool = False) -> float:
    """Exact sup of |w(s) - w(t)| over windows |s - t| <= eps within the
    horizon; ``normalize`` divides by sqrt(n) (the scaling under which the
    concentration statement is uniform in n)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    val = kernels().moc_exact(np.asarray(path.times, dtype=np.float64),
                              path.n, path.horizon, eps)
    return val / math.sqrt(path.n) if normalize else val


@dataclass
class TailCheckResult:
    x_grid: np.ndarray
    empirical_tail: np.ndarray
    bound: np.ndarray
    trials: int
    holds: np.ndarray

    @property
    def all_hold(self) -> bool:
        return bool(np.all(self.holds))


def check_tail_bound(n: int, T: float, x_grid: Sequence[float], trials: int,
                     seed: int = 0) -> TailCheckResult:
    """Empirical P(sup|w| >= x sqrt(n)) against 2 exp(-x^2/(4T)) plus
    three-sigma Monte Carlo slack."""
    if trials < 1:
        raise ValueError("trials must be positive")
    xs = np.asarray(list(x_grid), dtype=np.float64)
    sups = np.empty(trials)
    for t in range(trials):
        sups[t] = simulate_compensated(n, T, seed, trial=t).sup_abs
    thresh = xs * math.sqrt(n)
    emp = np.array([float(np.mean(sups >= th)) for th in thresh])
    bound = 2.0 * np.exp(-xs * xs / (4.0 * T))
    holds = emp <= bound + 3.0 * np.sqrt(bound / trials)
    return TailCheckResult(x_grid=xs, empirical_tail=emp, bound=bound,
                           trials=trials, holds=holds)


def expectation_square_stat(n: int, T: float, b: float, trials: int,
                            seed: int = 0) -> tuple[float, float]:
    """Mean and standard error of exp(b * sup|w|^2 / n) over trials."""
    vals = np.empty(trials)
    for t in range(trials):
        sup = simulate_compensated(n, T, seed, trial=t).sup_abs
        vals[t] = math.exp(b * sup * sup / n)
    return float(np.mean(vals)), float(np.std(vals) / math.sqrt(trials))


@dataclass
class MocReport:
    eps_grid: np.ndarray
    frequencies: np.ndarray
    delta: float
    trials: int
    n_procs: int

    @property
    def non_increasing(self) -> bool:
        f = self.frequencies
        return bool(np.all(f[:-1] >= f[1:] - 1e-15))


def check_moc_concentration(n_procs: int, eps_grid: Sequence[float], delta: float,
                            trials: int, seed: int = 0,
                            horizon: float = 1.0) -> MocReport:
    """Estimate P(mean_j phi_eps(w_j) >= delta) on a decreasing eps grid.

    Paths are normalized by sqrt(n); each trial draws ``n_procs`` independent
    paths and every eps is evaluated on the same paths.
    """
    eps = np.asarray(sorted(eps_grid, reverse=True), dtype=np.float64)
    hits = np.zeros(eps.shape[0], dtype=np.int64)
    mod = kernels()
    sqrt_n = math.sqrt(n_procs)
    for t in range(trials):
        sums = np.zeros(eps.shape[0])
        for j in range(n_procs):
            key = rng.derive_key(seed, rng.STREAM_COUNTING, t, j)
            times = sample_event_times(n_procs, horizon, key)
            for a, e in enumerate(eps):
                sums[a] += mod.moc_exact(times, n_procs, horizon, e) / sqrt_n
        hits += (sums / n_procs >= delta)
    return MocReport(eps_grid=eps, frequencies=hits / trials, delta=delta,
                     trials=trials, n_procs=n_procs)
