"""Numba kernels for the hot inner loops.

Scalar re-implementation of the counter-based streams from ``rng`` (same
splitmix64 mixing, same counter layout) plus the two network simulators and
the exact modulus-of-continuity scan.  ``_kernels_numpy`` carries the
vectorized fallbacks with identical signatures.

Channel order everywhere: 0=ee, 1=ei, 2=ie, 3=ii (target, source); sources
e for channels 0 and 2.  Firing-rate encoding: kind 0 is tanh-affine with
params (scale, offset, gain); kind 1 is a constant rate with params
(value, -, -) and a separate thinning bound.
"""

import math

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S12 = U64(12)
_ONE = U64(1)
_INV_2_52 = 2.0 ** -52


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _child(key, v):
    return _mix(key ^ (v + _GOLDEN))


@njit(cache=True, inline="always")
def _u01(key, ctr):
    r = _mix(key + (ctr + _ONE) * _GOLDEN)
    return (np.float64(r >> _S12) + 0.5) * _INV_2_52


@njit(cache=True, inline="always")
def _poisson(key, lam):
    # unit-exponential arrivals before lam; exact for any lam, O(lam) uniforms
    if lam <= 0.0:
        return 0
    acc = -math.log(_u01(key, U64(0)))
    cnt = 0
    while acc < lam:
        cnt += 1
        acc += -math.log(_u01(key, U64(cnt)))
    return cnt


@njit(cache=True)
def u01_at(key, ctr):
    return _u01(U64(key), U64(ctr))


@njit(cache=True)
def child_key(key, v):
    return _child(U64(key), U64(v))


@njit(cache=True)
def poisson_at(key, lam):
    return _poisson(U64(key), lam)


@njit(cache=True, inline="always")
def _record_macro(u_e, u_i, idx, rec_ve, rec_vi, rec_ke, rec_ki):
    n = u_e.shape[0]
    me = 0.0
    mi = 0.0
    for j in range(n):
        me += u_e[j]
    for j in range(n):
        mi += u_i[j]
    me /= n
    mi /= n
    ke = 0.0
    ki = 0.0
    for j in range(n):
        d = u_e[j] - me
        ke += d * d
    for j in range(n):
        d = u_i[j] - mi
        ki += d * d
    rec_ve[idx] = me
    rec_vi[idx] = mi
    rec_ke[idx] = ke / n
    rec_ki[idx] = ki / n


@njit(cache=True, inline="always")
def _sync_pop(u, last, t, tau):
    for j in range(u.shape[0]):
        dt = t - last[j]
        if dt > 0.0:
            u[j] *= math.exp(-dt / tau)
            last[j] = t


@njit(cache=True, nogil=True)
def fixed_step_sim(u_e, u_i, kinds, pa, pb, pc, C4, tau_e, tau_i, dt, n_steps,
                   rec_every, keys4, inv_sqrt_n,
                   rec_ve, rec_vi, rec_ke, rec_ki):
    """Tau-leap stepper: decay, freeze channel intensity sums, then one
    Poisson kick per (channel, target) from a per-site stream.  Mutates the
    potential arrays in place and fills the record arrays; returns the
    largest per-site Poisson mean encountered."""
    n = u_e.shape[0]
    de = math.exp(-dt / tau_e)
    di = math.exp(-dt / tau_i)
    kick = np.empty(4)
    kick[0] = C4[0] * inv_sqrt_n
    kick[1] = -C4[1] * inv_sqrt_n
    kick[2] = C4[2] * inv_sqrt_n
    kick[3] = -C4[3] * inv_sqrt_n
    S = np.empty(4)
    _record_macro(u_e, u_i, 0, rec_ve, rec_vi, rec_ke, rec_ki)
    ridx = 1
    max_lam = 0.0
    for step in range(n_steps):
        for j in range(n):
            u_e[j] *= de
        for j in range(n):
            u_i[j] *= di
        for ch in range(4):
            src = u_e if ch == 0 or ch == 2 else u_i
            if kinds[ch] == 0:
                a = pa[ch]
                b = pb[ch]
                c = pc[ch]
                acc = 0.0
                for j in range(n):
                    acc += a * (math.tanh(c * src[j]) + b)
                S[ch] = acc
            else:
                S[ch] = pa[ch] * n
        su = U64(step)
        for ch in range(4):
            lam = S[ch] * dt
            if lam > max_lam:
                max_lam = lam
            tgt = u_e if ch < 2 else u_i
            kk = kick[ch]
            skey = _child(keys4[ch], su)
            for j in range(n):
                cnt = _poisson(_child(skey, U64(j)), lam)
                if cnt > 0:
                    tgt[j] += kk * cnt
        if (step + 1) % rec_every == 0:
            _record_macro(u_e, u_i, ridx, rec_ve, rec_vi, rec_ke, rec_ki)
            ridx += 1
    return max_lam


@njit(cache=True, nogil=True)
def exact_sim(u_e, u_i, last_e, last_i, kinds, pa, pb, pc, cf, C4,
              tau_e, tau_i, T, rec_times, keys4, inv_sqrt_n, counts,
              rec_ve, rec_vi, rec_ke, rec_ki, ev_t, ev_ch, ev_tgt, ev_acc):
    """Event-driven thinning simulator.

    Per channel, candidates arrive at constant rate n^2 * bound; a candidate
    picks target and source uniformly, decays the source lazily to the event
    time, and is accepted with probability f(u_source)/bound.  Channel clocks
    consume four uniforms per candidate (gap, target, source, accept) at
    counters 4i..4i+3 of the channel stream.  Accepted spikes per
    (channel, target) are tallied into ``counts``; the event log is filled
    while capacity lasts.  Returns the number of candidates processed.
    """
    n = u_e.shape[0]
    ev_cap = ev_t.shape[0]
    rate = np.empty(4)
    kick = np.empty(4)
    for ch in range(4):
        rate[ch] = cf[ch] * n * n
    kick[0] = C4[0] * inv_sqrt_n
    kick[1] = -C4[1] * inv_sqrt_n
    kick[2] = C4[2] * inv_sqrt_n
    kick[3] = -C4[3] * inv_sqrt_n
    nxt = np.empty(4)
    pidx = np.zeros(4, dtype=np.int64)
    for ch in range(4):
        nxt[ch] = -math.log(_u01(keys4[ch], U64(0))) / rate[ch]
    nrec = rec_times.shape[0]
    ridx = 0
    nev = 0
    while True:
        ch = 0
        tn = nxt[0]
        for c in range(1, 4):
            if nxt[c] < tn:
                tn = nxt[c]
                ch = c
        lim = tn if tn < T else T
        while ridx < nrec and rec_times[ridx] <= lim:
            rt = rec_times[ridx]
            _sync_pop(u_e, last_e, rt, tau_e)
            _sync_pop(u_i, last_i, rt, tau_i)
            _record_macro(u_e, u_i, ridx, rec_ve, rec_vi, rec_ke, rec_ki)
            ridx += 1
        if tn > T:
            break
        i = pidx[ch]
        base = U64(4 * i)
        j = int(_u01(keys4[ch], base + _ONE) * n)
        k = int(_u01(keys4[ch], base + U64(2)) * n)
        ua = _u01(keys4[ch], base + U64(3))
        if ch == 0 or ch == 2:
            su = u_e
            sl = last_e
            stau = tau_e
        else:
            su = u_i
            sl = last_i
            stau = tau_i
        dtk = tn - sl[k]
        if dtk > 0.0:
            su[k] *= math.exp(-dtk / stau)
            sl[k] = tn
        if kinds[ch] == 0:
            fval = pa[ch] * (math.tanh(pc[ch] * su[k]) + pb[ch])
        else:
            fval = pa[ch]
        accepted = ua * cf[ch] < fval
        if accepted:
            if ch < 2:
                tu = u_e
                tl = last_e
                ttau = tau_e
            else:
                tu = u_i
                tl = last_i
                ttau = tau_i
            dtj = tn - tl[j]
            if dtj > 0.0:
                tu[j] *= math.exp(-dtj / ttau)
                tl[j] = tn
            tu[j] += kick[ch]
            counts[ch, j] += 1
        if nev < ev_cap:
            ev_t[nev] = tn
            ev_ch[nev] = ch
            ev_tgt[nev] = j
            ev_acc[nev] = 1 if accepted else 0
        nev += 1
        pidx[ch] = i + 1
        nxt[ch] = tn + (-math.log(_u01(keys4[ch], U64(4 * (i + 1)))) / rate[ch])
    _sync_pop(u_e, last_e, T, tau_e)
    _sync_pop(u_i, last_i, T, tau_i)
    return nev


@njit(cache=True, nogil=True)
def moc_exact(times, n, S, eps):
    """Exact modulus of continuity of w(t) = (#events <= t) - n*t over [0, S].

    Increments are maximized by windows ending at an event and starting just
    before one; decrements by windows starting at an event (or 0) and ending
    just before an event or at the window edge.  Both scans use a monotone
    deque over the pre-jump values h(p) = p - n*t_p, O(N) total.
    """
    N = times.shape[0]
    drift = float(n)
    width = eps if eps < S else S
    # increments: max over q of (q+1) - n t_q - min_{t_p in (t_q-eps, t_q]} h(p)
    inc = 0.0
    if N > 0:
        dq = np.empty(N, dtype=np.int64)
        head = 0
        tail = 0
        for q in range(N):
            hq = q - drift * times[q]
            while tail > head and (dq[tail - 1] - drift * times[dq[tail - 1]]) >= hq:
                tail -= 1
            dq[tail] = q
            tail += 1
            while times[dq[head]] <= times[q] - eps:
                head += 1
            hmin = dq[head] - drift * times[dq[head]]
            val = (q + 1.0) - drift * times[q] - hmin
            if val > inc:
                inc = val
    # decrements: max over starts (0 or post-jump) of w(start) - inf over window
    dec = drift * width  # drift-only window from t = 0
    if N > 0:
        dq = np.empty(N, dtype=np.int64)
        head = 0
        tail = 0
        hi = 0
        for p in range(-1, N):
            if p < 0:
                ts = 0.0
                ws = 0.0
            else:
                ts = times[p]
                ws = (p + 1.0) - drift * times[p]
            we = ts + eps
            if we > S:
                we = S
            while hi < N and times[hi] <= we:
                hv = hi - drift * times[hi]
                while tail > head and (dq[tail - 1] - drift * times[dq[tail - 1]]) >= hv:
                    tail -= 1
                dq[tail] = hi
                tail += 1
                hi += 1
            while tail > head and times[dq[head]] <= ts:
                head += 1
            mn = hi - drift * we  # value at the window edge
            if tail > head:
                hfront = dq[head] - drift * times[dq[head]]
                if hfront < mn:
                    mn = hfront
            val = ws - mn
            if val > dec:
                dec = val
    return inc if inc > dec else dec
