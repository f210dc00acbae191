"""Pure NumPy/Python reference kernels.

Same contracts as :mod:`phylab.backend_numba`.  The trellis search is
vectorized across states; the sample-by-sample adaptive loops fall back
to scalar Python, which is slow but dependency-free.  Select this
backend by setting ``PHYLAB_NO_NUMBA=1`` before import.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def viterbi_forward(bm, prev_state, prev_label):
    """Add-compare-select over the whole block.

    bm          (T, n_labels) branch metric per step and output label
    prev_state  (S, 2) predecessors of each state, ascending
    prev_label  (S, 2) output label on the edge from each predecessor

    Returns (survivors (T, S) uint8, anchors (T+1,) int64).  Ties keep
    the lower-numbered predecessor; anchors[t] is the best state after
    t steps, lowest index winning ties.  The search starts pinned to
    state 0.
    """
    T = bm.shape[0]
    S = prev_state.shape[0]
    metric = np.full(S, np.inf)
    metric[0] = 0.0
    surv = np.empty((T, S), dtype=np.uint8)
    anchors = np.empty(T + 1, dtype=np.int64)
    anchors[0] = 0
    ps0 = prev_state[:, 0]
    ps1 = prev_state[:, 1]
    pl0 = prev_label[:, 0]
    pl1 = prev_label[:, 1]
    for t in range(T):
        row = bm[t]
        c0 = metric[ps0] + row[pl0]
        c1 = metric[ps1] + row[pl1]
        take1 = c1 < c0
        metric = np.where(take1, c1, c0)
        surv[t] = take1
        anchors[t + 1] = int(np.argmin(metric))
    return surv, anchors


def viterbi_traceback(surv, anchors, prev_state, prev_bit, depth):
    """Windowed traceback: the decision at step j is read off the best
    path anchored ``depth`` steps ahead (or at the block end)."""
    T = surv.shape[0]
    D = int(depth)
    bits = np.empty(T, dtype=np.uint8)
    main = T - D + 1  # steps whose anchor lies strictly inside the block
    if main > 0:
        j = np.arange(main)
        s = anchors[j + D]
        for k in range(D - 1, 0, -1):
            rows = j + k
            s = prev_state[s, surv[rows, s]]
        bits[:main] = prev_bit[s, surv[j, s]]
    start_tail = max(main, 0)
    s = int(anchors[T])
    for t in range(T - 1, start_tail - 1, -1):
        e = surv[t, s]
        bits[t] = prev_bit[s, e]
        s = int(prev_state[s, e])
    return bits


def lms_equalize(rx, known, points, n_ff, n_fb, mu, ref_delay, train_len):
    """Complex LMS with optional decision feedback.

    Taps start as a unit spike at the reference tap.  The output at
    time t estimates the input at t - ref_delay; updates use training
    symbols while available, sliced decisions afterwards.  Returns
    (estimates, taps, diverged_at) with diverged_at = -1 when the tap
    norm stayed below the runaway threshold.
    """
    T = rx.shape[0]
    M = points.shape[0]
    w = [0j] * (n_ff + n_fb)
    w[ref_delay] = 1.0 + 0j
    fb = [0j] * n_fb
    est = np.empty(T, dtype=np.complex128)
    rxl = [complex(v) for v in rx]
    ptl = [complex(v) for v in points]
    knl = [complex(v) for v in known]
    mu = float(mu)
    for t in range(T):
        y = 0j
        for i in range(n_ff):
            ti = t - i
            if ti >= 0:
                y += w[i] * rxl[ti]
        for i in range(n_fb):
            y += w[n_ff + i] * fb[i]
        est[t] = y
        r = t - ref_delay
        if 0 <= r < train_len:
            d = knl[r]
        else:
            best = 0
            dv = y - ptl[0]
            bd = dv.real * dv.real + dv.imag * dv.imag
            for p in range(1, M):
                dv = y - ptl[p]
                dd = dv.real * dv.real + dv.imag * dv.imag
                if dd < bd:
                    bd = dd
                    best = p
            d = ptl[best]
        if r >= 0:
            e = d - y
            me = mu * e
            for i in range(n_ff):
                ti = t - i
                if ti >= 0:
                    w[i] += me * rxl[ti].conjugate()
            for i in range(n_fb):
                w[n_ff + i] += me * fb[i].conjugate()
            nrm = 0.0
            for i in range(n_ff + n_fb):
                wi = w[i]
                nrm += wi.real * wi.real + wi.imag * wi.imag
            if nrm > 1e12:  # tap norm > 1e6
                return est, np.array(w, dtype=np.complex128), t
        if n_fb:
            fb[1:] = fb[:-1]
            fb[0] = d
    return est, np.array(w, dtype=np.complex128), -1


def mlse_detect(rx, taps, points, memory, depth):
    """Trellis search over channel states; returns symbol indices.

    States encode the last ``memory`` symbol indices, newest in the
    highest base-M digit; pre-history is all-zero symbols (silence).
    Branch metric is |rx[t] - sum(taps[i] * s[t-i])|^2.  Ties keep the
    lower predecessor digit; traceback is windowed like the decoder's.
    """
    T = rx.shape[0]
    M = points.shape[0]
    L = int(memory)
    D = int(depth)
    S = M**L
    Mpow = M ** (L - 1)
    tapl = [complex(v) for v in taps]
    ptl = [complex(v) for v in points]
    rxl = [complex(v) for v in rx]

    # contribution of the stored symbols to each state's branch output
    pred_sum = [0j] * S
    for p in range(S):
        acc = 0j
        for i in range(1, L + 1):
            digit = (p // (M ** (L - i))) % M
            acc += tapl[i] * ptl[digit]
        pred_sum[p] = acc

    # exact handling of the zero pre-history: enumerate all prefixes
    metric = [0.0] * S
    for c in range(S):
        acc = 0.0
        for t in range(L):
            y = 0j
            for i in range(t + 1):
                digit = (c // (M ** (t - i))) % M
                y += tapl[i] * ptl[digit]
            dv = rxl[t] - y
            acc += dv.real * dv.real + dv.imag * dv.imag
        metric[c] = acc

    n_steps = T - L
    surv = np.empty((n_steps, S), dtype=np.uint8)
    anchors = np.empty(n_steps + 1, dtype=np.int64)
    anchors[0] = int(np.argmin(metric))
    for step in range(n_steps):
        t = L + step
        r = rxl[t]
        new_metric = [0.0] * S
        for q in range(S):
            j = q // Mpow
            base = (q % Mpow) * M
            bj = tapl[0] * ptl[j]
            best_m = 0
            p = base
            dv = r - bj - pred_sum[p]
            best = metric[p] + dv.real * dv.real + dv.imag * dv.imag
            for m in range(1, M):
                p = base + m
                dv = r - bj - pred_sum[p]
                cand = metric[p] + dv.real * dv.real + dv.imag * dv.imag
                if cand < best:
                    best = cand
                    best_m = m
            new_metric[q] = best
            surv[step, q] = best_m
        metric = new_metric
        best_q = 0
        best = metric[0]
        for q in range(1, S):
            if metric[q] < best:
                best = metric[q]
                best_q = q
        anchors[step + 1] = best_q

    sym = np.empty(T, dtype=np.int64)
    for j in range(L, T):
        a = j + D
        if a > T:
            a = T
        s = int(anchors[a - L])
        t = a - 1
        while t >= j + 1:
            s = (s % Mpow) * M + int(surv[t - L, s])
            t -= 1
        sym[j] = s // Mpow
    a0 = min(L + D, T)
    s = int(anchors[a0 - L])
    t = a0 - 1
    while t >= L:
        s = (s % Mpow) * M + int(surv[t - L, s])
        t -= 1
    for u in range(L):
        sym[u] = (s // (M**u)) % M
    return sym
