"""Core model types: firing-rate families, network parameters, and the
micro/macro state containers shared by the simulators and the limit solver.

Conventions: populations are labelled 'e' (excitatory) and 'i' (inhibitory);
a synaptic channel is a (target, source) pair, always iterated in the fixed
order ee, ei, ie, ii.  Channel 'ei' is the inhibitory-to-excitatory channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import rng

CHANNELS = ("ee", "ei", "ie", "ii")


def channel_target(ch: str) -> str:
    return ch[0]


def channel_source(ch: str) -> str:
    return ch[1]


def _stable_sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class TanhAffine:
    """Firing rate x -> scale * (tanh(gain * x) + offset).

    Requires offset >= 1 so the rate stays positive everywhere (strictly
    positive pointwise; a positive uniform lower bound needs offset > 1).
    Evaluation goes through a stable sigmoid form so the rate never rounds
    to zero on the tails for arguments of practical size.
    """

    scale: float
    offset: float
    gain: float

    def __post_init__(self):
        if self.scale <= 0 or self.gain <= 0:
            raise ValueError("TanhAffine requires scale > 0 and gain > 0")
        if self.offset < 1:
            raise ValueError("TanhAffine requires offset >= 1 (rate must stay positive)")

    @property
    def bound(self) -> float:
        """Supremum of the rate: scale * (1 + offset)."""
        return self.scale * (1.0 + self.offset)

    @property
    def lipschitz(self) -> float:
        return self.scale * self.gain

    def __call__(self, x):
        s = _stable_sigmoid(2.0 * self.gain * np.asarray(x, dtype=np.float64))
        out = self.scale * (self.offset - 1.0) + 2.0 * self.scale * s
        return float(out) if np.ndim(x) == 0 else out

    def deriv(self, x):
        s = _stable_sigmoid(2.0 * self.gain * np.asarray(x, dtype=np.float64))
        out = 4.0 * self.scale * self.gain * s * (1.0 - s)
        return float(out) if np.ndim(x) == 0 else out

    def deriv2(self, x):
        s = _stable_sigmoid(2.0 * self.gain * np.asarray(x, dtype=np.float64))
        out = -8.0 * self.scale * self.gain ** 2 * (2.0 * s - 1.0) * s * (1.0 - s)
        return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class CustomRate:
    """User-supplied firing rate with an explicit bound.

    ``func`` must accept numpy arrays.  Derivatives are optional; the
    quadrature layer falls back to finite differences when they are absent.
    ``const_value`` marks rates that are constant, which the simulator
    kernels handle natively.
    """

    bound: float
    lipschitz: float
    func: Callable
    deriv: Optional[Callable] = None
    deriv2: Optional[Callable] = None
    const_value: Optional[float] = None

    def __call__(self, x):
        return self.func(x)


FiringRate = Union[TanhAffine, CustomRate]


def constant_rate(value: float, bound: Optional[float] = None) -> CustomRate:
    """Constant firing rate (zero derivatives); ``bound`` may exceed the value
    to exercise thinning rejection in the event-driven simulator."""
    if value <= 0:
        raise ValueError("constant rate must be positive")
    b = float(value if bound is None else bound)
    if b < value:
        raise ValueError("bound must be >= value")
    return CustomRate(
        bound=b,
        lipschitz=0.0,
        func=lambda x, _v=float(value): np.full_like(np.asarray(x, dtype=np.float64), _v)
        if np.ndim(x) else _v,
        deriv=lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)) if np.ndim(x) else 0.0,
        deriv2=lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)) if np.ndim(x) else 0.0,
        const_value=float(value),
    )


def firing_rate_eval(f: FiringRate, x):
    """Evaluate a firing rate; result lies in (0, f.bound]."""
    return f(x)


@dataclass(frozen=True)
class NetworkParams:
    """Coupling magnitudes, time constants, per-population size and the four
    channel firing rates."""

    c_ee: float
    c_ei: float
    c_ie: float
    c_ii: float
    tau_e: float
    tau_i: float
    n: int
    f_ee: FiringRate
    f_ei: FiringRate
    f_ie: FiringRate
    f_ii: FiringRate

    def __post_init__(self):
        for ch in CHANNELS:
            if self.coupling(ch) < 0:
                raise ValueError(f"coupling C_{ch} must be non-negative")
        if not (self.tau_e > 0 and self.tau_i > 0):
            raise ValueError("time constants must be positive")
        if self.n < 1:
            raise ValueError("population size must be at least 1")

    def coupling(self, ch: str) -> float:
        return getattr(self, f"c_{ch}")

    def rate(self, ch: str) -> FiringRate:
        return getattr(self, f"f_{ch}")

    def tau(self, pop: str) -> float:
        return self.tau_e if pop == "e" else self.tau_i

    def replace(self, **kw) -> "NetworkParams":
        from dataclasses import replace
        return replace(self, **kw)


@dataclass(frozen=True)
class MacroState:
    """Population means and variances (v_e, v_i, K_e, K_i)."""

    v_e: float
    v_i: float
    K_e: float
    K_i: float

    def __post_init__(self):
        if self.K_e < 0 or self.K_i < 0:
            raise ValueError("variances must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.v_e, self.v_i, self.K_e, self.K_i])


@dataclass
class MicroState:
    """Per-neuron synaptic potentials with lazy-decay timestamps.

    ``last_e[j] <= t`` always; after a sync every timestamp equals ``t``.
    """

    t: float
    u_e: np.ndarray
    u_i: np.ndarray
    last_e: np.ndarray = field(default=None)
    last_i: np.ndarray = field(default=None)

    def __post_init__(self):
        self.u_e = np.asarray(self.u_e, dtype=np.float64)
        self.u_i = np.asarray(self.u_i, dtype=np.float64)
        if self.last_e is None:
            self.last_e = np.full(self.u_e.shape, self.t)
        if self.last_i is None:
            self.last_i = np.full(self.u_i.shape, self.t)

    @property
    def n(self) -> int:
        return self.u_e.shape[0]

    def synced(self, atol: float = 0.0) -> bool:
        return (np.all(np.abs(self.last_e - self.t) <= atol)
                and np.all(np.abs(self.last_i - self.t) <= atol))

    def copy(self) -> "MicroState":
        return MicroState(self.t, self.u_e.copy(), self.u_i.copy(),
                          self.last_e.copy(), self.last_i.copy())


def macro_of_micro(s: MicroState) -> MacroState:
    """Empirical means and population variances (divisor n) of a synced state."""
    if not s.synced(atol=1e-12):
        raise ValueError("micro state must be synced before measuring moments")
    return MacroState(
        v_e=float(np.mean(s.u_e)),
        v_i=float(np.mean(s.u_i)),
        K_e=float(np.var(s.u_e)),
        K_i=float(np.var(s.u_i)),
    )


def init_micro(m_e: float, m_i: float, k_e: float, k_i: float,
               p: NetworkParams, seed: int) -> MicroState:
    """Gaussian initial conditions u_a[j] = m_a + sqrt(k_a) * z_j at t = 0.

    The normal draws come from per-population counter streams, so the result
    is a pure function of (seed, n, moments).
    """
    if k_e < 0 or k_i < 0:
        raise ValueError("initial variances must be non-negative")
    key_e = rng.derive_key(seed, rng.STREAM_INIT, 0)
    key_i = rng.derive_key(seed, rng.STREAM_INIT, 1)
    u_e = m_e + math.sqrt(k_e) * rng.standard_normal_block(key_e, p.n)
    u_i = m_i + math.sqrt(k_i) * rng.standard_normal_block(key_i, p.n)
    return MicroState(t=0.0, u_e=u_e, u_i=u_i)
