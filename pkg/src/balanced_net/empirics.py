"""Convergence diagnostics.

Sup-norm errors between empirical and limit moment trajectories, the 1-D
Wasserstein distance of sample clouds to Gaussian marginals (quantile-grid
form: in one dimension W1 is the L1 distance between quantile functions),
and the convergence study sweeping the population size.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .backend import thread_count
from .errors import GridMismatchError
from .limit_ode import LimitTrajectory, integrate_limit
from .manifold import solve_balance
from .model import MacroState, NetworkParams, init_micro
from .rng import normal_quantile
from .simulate import SimConfig, Trajectory, empirical_trajectory, simulate


class SupErrors(NamedTuple):
    v_e: float
    v_i: float
    K_e: float
    K_i: float

    @property
    def combined(self) -> float:
        return self.v_e + self.v_i + self.K_e + self.K_i


def sup_error(emp, lim) -> SupErrors:
    """Componentwise sup over the empirical grid of |empirical - limit|.

    The limit trajectory is interpolated linearly onto the empirical grid;
    the empirical grid must not extend beyond it.
    """
    t = np.asarray(emp.times)
    lt = np.asarray(lim.times)
    if t[0] < lt[0] - 1e-12 or t[-1] > lt[-1] + 1e-12:
        raise GridMismatchError(
            f"empirical grid [{t[0]}, {t[-1]}] exceeds limit grid [{lt[0]}, {lt[-1]}]"
        )
    vals = []
    for name in ("v_e", "v_i", "K_e", "K_i"):
        li = np.interp(t, lt, np.asarray(getattr(lim, name)))
        vals.append(float(np.max(np.abs(np.asarray(getattr(emp, name)) - li))))
    return SupErrors(*vals)


def wasserstein1_to_gaussian(samples, mean: float, var: float) -> float:
    """W1 distance between a sample cloud and N(mean, var).

    Order statistics are matched against the Gaussian quantiles at
    (j - 1/2)/N; the quantile function is evaluated by a rational
    approximation polished to double precision.
    """
    if var < 0:
        raise ValueError("variance must be non-negative")
    s = np.sort(np.asarray(samples, dtype=np.float64))
    N = s.shape[0]
    if N == 0:
        raise ValueError("samples must be non-empty")
    q = mean + math.sqrt(var) * normal_quantile((np.arange(N) + 0.5) / N)
    return float(np.mean(np.abs(s - q)))


def gaussian_w1(m1: float, v1: float, m2: float, v2: float, N: int = 4096) -> float:
    """W1 between two Gaussians on the shared quantile grid (used by the
    triangle-inequality checks)."""
    z = normal_quantile((np.arange(N) + 0.5) / N)
    return float(np.mean(np.abs((m1 + math.sqrt(v1) * z) - (m2 + math.sqrt(v2) * z))))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    seed: int
    sup_err_v_e: float
    sup_err_v_i: float
    sup_err_K_e: float
    sup_err_K_i: float
    w1_e_final: float
    w1_i_final: float

    @property
    def combined(self) -> float:
        return (self.sup_err_v_e + self.sup_err_v_i
                + self.sup_err_K_e + self.sup_err_K_i)


@dataclass
class ConvergenceStudy:
    rows: list
    ns: list
    medians: dict            # n -> median combined sup error
    medians_v_e: dict        # n -> median sup_err_v_e
    monotone: bool           # medians non-increasing in n
    ratio_first_last: float  # median(smallest n) / median(largest n)
    limit: LimitTrajectory
    failures: list


def convergence_study(ns: Sequence[int], seeds: Sequence[int], p: NetworkParams,
                      k_e: float, k_i: float, T: float = 5.0,
                      dt: float = 1e-3, record_stride: float = 0.05,
                      h: float = 1e-3, method: str = "fixed",
                      max_workers: Optional[int] = None) -> ConvergenceStudy:
    """One simulation per (n, seed) against a single precomputed limit
    trajectory; per-row failures are recorded and the sweep continues."""
    m_e, m_i = solve_balance(k_e, k_i, p)
    lim = integrate_limit(MacroState(m_e, m_i, k_e, k_i), p, T, h)
    vT, viT = lim.v_e[-1], lim.v_i[-1]
    keT, kiT = lim.K_e[-1], lim.K_i[-1]

    def one(n: int, seed: int) -> ConvergenceRow:
        pn = p.replace(n=int(n))
        init = init_micro(m_e, m_i, k_e, k_i, pn, seed)
        cfg = SimConfig(method=method, T=T, seed=seed, dt=dt,
                        record_stride=record_stride)
        traj: Trajectory = simulate(init, pn, cfg)
        errs = sup_error(empirical_trajectory(traj), lim)
        return ConvergenceRow(
            n=int(n), seed=int(seed),
            sup_err_v_e=errs.v_e, sup_err_v_i=errs.v_i,
            sup_err_K_e=errs.K_e, sup_err_K_i=errs.K_i,
            w1_e_final=wasserstein1_to_gaussian(traj.final_micro.u_e, vT, keT),
            w1_i_final=wasserstein1_to_gaussian(traj.final_micro.u_i, viT, kiT),
        )

    jobs = [(int(n), int(s)) for n in ns for s in seeds]
    rows = []
    failures = []
    workers = max_workers if max_workers is not None else min(thread_count(), len(jobs))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futs = {pool.submit(one, n, s): (n, s) for (n, s) in jobs}
        for fut, (n, s) in futs.items():
            try:
                rows.append(fut.result())
            except Exception as exc:  # noqa: BLE001 - sweep continues per row
                warnings.warn(f"convergence row (n={n}, seed={s}) failed: {exc}",
                              RuntimeWarning, stacklevel=2)
                failures.append((n, s, exc))
    rows.sort(key=lambda r: (r.n, r.seed))

    medians = {}
    medians_ve = {}
    for n in ns:
        vals = [r.combined for r in rows if r.n == n]
        vals_ve = [r.sup_err_v_e for r in rows if r.n == n]
        if vals:
            medians[int(n)] = float(np.median(vals))
            medians_ve[int(n)] = float(np.median(vals_ve))
    ordered = [medians[int(n)] for n in sorted(medians)]
    monotone = all(a >= b for a, b in zip(ordered, ordered[1:]))
    ratio = ordered[0] / ordered[-1] if len(ordered) >= 2 and ordered[-1] > 0 else math.nan
    return ConvergenceStudy(rows=rows, ns=[int(n) for n in ns], medians=medians,
                            medians_v_e=medians_ve, monotone=monotone,
                            ratio_first_last=ratio, limit=lim, failures=failures)
