"""Pure-numpy fallback kernels.

Same call signatures and the same counter-based integer streams as
``_kernels_numba``; the fixed-step simulator is fully vectorized, while the
event-driven simulator pre-generates every candidate event per channel and
replays them through a Python loop (exactness over speed — the benchmark
quantifies the gap).  Trajectories agree with the numba backend
statistically but not bit for bit (summation order, libm rounding).
"""

import math

import numpy as np

from . import rng

_U1 = np.uint64(1)
_U4 = np.uint64(4)


def u01_at(key, ctr):
    return rng.uniform_at(int(key), int(ctr))


def child_key(key, v):
    return rng.child_key(int(key), int(v))


def poisson_at(key, lam):
    return int(rng.poisson_per_key(np.array([key], dtype=np.uint64), lam)[0])


def _record_macro(u_e, u_i, idx, rec_ve, rec_vi, rec_ke, rec_ki):
    rec_ve[idx] = np.mean(u_e)
    rec_vi[idx] = np.mean(u_i)
    rec_ke[idx] = np.var(u_e)
    rec_ki[idx] = np.var(u_i)


def _rate_sum(kind, a, b, c, src):
    if kind == 0:
        return float(np.sum(a * (np.tanh(c * src) + b)))
    return float(a * src.shape[0])


def fixed_step_sim(u_e, u_i, kinds, pa, pb, pc, C4, tau_e, tau_i, dt, n_steps,
                   rec_every, keys4, inv_sqrt_n,
                   rec_ve, rec_vi, rec_ke, rec_ki):
    n = u_e.shape[0]
    de = math.exp(-dt / tau_e)
    di = math.exp(-dt / tau_i)
    kick = (C4[0] * inv_sqrt_n, -C4[1] * inv_sqrt_n,
            C4[2] * inv_sqrt_n, -C4[3] * inv_sqrt_n)
    targets = np.arange(n, dtype=np.uint64)
    _record_macro(u_e, u_i, 0, rec_ve, rec_vi, rec_ke, rec_ki)
    ridx = 1
    max_lam = 0.0
    for step in range(n_steps):
        u_e *= de
        u_i *= di
        S = [_rate_sum(kinds[ch], pa[ch], pb[ch], pc[ch],
                       u_e if ch in (0, 2) else u_i) for ch in range(4)]
        for ch in range(4):
            lam = S[ch] * dt
            max_lam = max(max_lam, lam)
            skey = rng.child_key(int(keys4[ch]), step)
            site_keys = rng.child_key_array(skey, targets)
            cnt = rng.poisson_per_key(site_keys, lam)
            tgt = u_e if ch < 2 else u_i
            tgt += kick[ch] * cnt
        if (step + 1) % rec_every == 0:
            _record_macro(u_e, u_i, ridx, rec_ve, rec_vi, rec_ke, rec_ki)
            ridx += 1
    return max_lam


def _channel_proposals(key, rate, T, n):
    """All candidate events of one channel clock on [0, T]: times, targets,
    sources and acceptance uniforms, consuming counters 4i..4i+3."""
    key = int(key)
    t = np.empty(0)
    start = 0
    offset = 0.0
    est = int(rate * T + 10.0 * math.sqrt(rate * T) + 64)
    while True:
        ctrs = _U4 * np.arange(start, start + est, dtype=np.uint64)
        gaps = -np.log(rng.uniform_array(key, ctrs)) / rate
        block = offset + np.cumsum(gaps)
        t = np.concatenate([t, block])
        if t[-1] > T:
            break
        start += est
        offset = t[-1]
        est = max(64, est // 4)
    m = int(np.searchsorted(t, T, side="right"))
    idx = np.arange(m, dtype=np.uint64)
    tgt = (rng.uniform_array(key, _U4 * idx + _U1) * n).astype(np.int64)
    src = (rng.uniform_array(key, _U4 * idx + np.uint64(2)) * n).astype(np.int64)
    ua = rng.uniform_array(key, _U4 * idx + np.uint64(3))
    return t[:m], tgt, src, ua


def exact_sim(u_e, u_i, last_e, last_i, kinds, pa, pb, pc, cf, C4,
              tau_e, tau_i, T, rec_times, keys4, inv_sqrt_n, counts,
              rec_ve, rec_vi, rec_ke, rec_ki, ev_t, ev_ch, ev_tgt, ev_acc):
    n = u_e.shape[0]
    ev_cap = ev_t.shape[0]
    kick = (C4[0] * inv_sqrt_n, -C4[1] * inv_sqrt_n,
            C4[2] * inv_sqrt_n, -C4[3] * inv_sqrt_n)
    parts = [_channel_proposals(keys4[ch], cf[ch] * n * n, T, n) for ch in range(4)]
    times = np.concatenate([p[0] for p in parts])
    chans = np.concatenate([np.full(p[0].shape[0], ch, dtype=np.int64)
                            for ch, p in enumerate(parts)])
    tgts = np.concatenate([p[1] for p in parts])
    srcs = np.concatenate([p[2] for p in parts])
    uas = np.concatenate([p[3] for p in parts])
    order = np.argsort(times, kind="stable")

    def sync(rt):
        np.multiply(u_e, np.exp(-(rt - last_e) / tau_e), out=u_e)
        last_e[:] = rt
        np.multiply(u_i, np.exp(-(rt - last_i) / tau_i), out=u_i)
        last_i[:] = rt

    nrec = rec_times.shape[0]
    ridx = 0
    nev = 0
    for pos in order:
        tn = float(times[pos])
        while ridx < nrec and rec_times[ridx] <= tn:
            sync(rec_times[ridx])
            _record_macro(u_e, u_i, ridx, rec_ve, rec_vi, rec_ke, rec_ki)
            ridx += 1
        ch = int(chans[pos])
        j = int(tgts[pos])
        k = int(srcs[pos])
        if ch in (0, 2):
            su, sl, stau = u_e, last_e, tau_e
        else:
            su, sl, stau = u_i, last_i, tau_i
        dtk = tn - sl[k]
        if dtk > 0.0:
            su[k] *= math.exp(-dtk / stau)
            sl[k] = tn
        if kinds[ch] == 0:
            fval = pa[ch] * (math.tanh(pc[ch] * su[k]) + pb[ch])
        else:
            fval = pa[ch]
        accepted = uas[pos] * cf[ch] < fval
        if accepted:
            if ch < 2:
                tu, tl, ttau = u_e, last_e, tau_e
            else:
                tu, tl, ttau = u_i, last_i, tau_i
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
    while ridx < nrec and rec_times[ridx] <= T:
        sync(rec_times[ridx])
        _record_macro(u_e, u_i, ridx, rec_ve, rec_vi, rec_ke, rec_ki)
        ridx += 1
    sync(T)
    return nev


def moc_exact(times, n, S, eps):
    """Python mirror of the numba scan (see _kernels_numba.moc_exact)."""
    N = times.shape[0]
    drift = float(n)
    width = eps if eps < S else S
    inc = 0.0
    if N > 0:
        dq = np.empty(N, dtype=np.int64)
        head = tail = 0
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
    dec = drift * width
    if N > 0:
        dq = np.empty(N, dtype=np.int64)
        head = tail = 0
        hi = 0
        for p in range(-1, N):
            if p < 0:
                ts, ws = 0.0, 0.0
            else:
                ts = times[p]
                ws = (p + 1.0) - drift * times[p]
            we = min(ts + eps, S)
            while hi < N and times[hi] <= we:
                hv = hi - drift * times[hi]
                while tail > head and (dq[tail - 1] - drift * times[dq[tail - 1]]) >= hv:
                    tail -= 1
                dq[tail] = hi
                tail += 1
                hi += 1
            while tail > head and times[dq[head]] <= ts:
                head += 1
            mn = hi - drift * we
            if tail > head:
                hfront = dq[head] - drift * times[dq[head]]
                if hfront < mn:
                    mn = hfront
            val = ws - mn
            if val > dec:
                dec = val
    return inc if inc > dec else dec
