"""Hot-kernel backend selection.

The event-driven and fixed-step simulators and the path-statistics scans
exist twice: numba-JIT scalar kernels and a pure-numpy fallback.  The env
variable BALANCED_NET_BACKEND ("numba" or "numpy") forces one; the default
is numba when importable.  Both backends draw from the same counter-based
integer streams, so they agree statistically; trajectories are bit-identical
only within a backend (summation order and libm rounding differ across them).

BALANCED_NET_THREADS caps the worker count used by parameter sweeps.
"""

from __future__ import annotations

import os


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def active_backend() -> str:
    forced = os.environ.get("BALANCED_NET_BACKEND", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "numba":
        if not numba_available():
            raise RuntimeError("BALANCED_NET_BACKEND=numba but numba is not importable")
        return "numba"
    if forced:
        raise ValueError(f"unknown BALANCED_NET_BACKEND value: {forced!r}")
    return "numba" if numba_available() else "numpy"


def kernels(backend: str | None = None):
    """Return the kernel module for ``backend`` (default: active backend)."""
    name = backend or active_backend()
    if name == "numba":
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod


def thread_count() -> int:
    env = os.environ.get("BALANCED_NET_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
