"""Numba-accelerated kernels for the per-sample hot loops.

Contracts mirror :mod:`phylab.backend_numpy`; arithmetic runs in the
same order (no fastmath) so results track the reference kernels.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _viterbi_forward(bm, prev_state, prev_label):
    T = bm.shape[0]
    S = prev_state.shape[0]
    metric = np.full(S, np.inf)
    metric[0] = 0.0
    new_metric = np.empty(S)
    surv = np.empty((T, S), dtype=np.uint8)
    anchors = np.empty(T + 1, dtype=np.int64)
    anchors[0] = 0
    for t in range(T):
        best_state = 0
        best_val = np.inf
        for s in range(S):
            c0 = metric[prev_state[s, 0]] + bm[t, prev_label[s, 0]]
            c1 = metric[prev_state[s, 1]] + bm[t, prev_label[s, 1]]
            if c1 < c0:
                new_metric[s] = c1
                surv[t, s] = 1
            else:
                new_metric[s] = c0
                surv[t, s] = 0
            if new_metric[s] < best_val:
                best_val = new_metric[s]
                best_state = s
        for s in range(S):
            metric[s] = new_metric[s]
        anchors[t + 1] = best_state
    return surv, anchors


def viterbi_forward(bm, prev_state, prev_label):
    return _viterbi_forward(
        np.ascontiguousarray(bm),
        np.ascontiguousarray(prev_state),
        np.ascontiguousarray(prev_label),
    )


@njit(**_JIT)
def _viterbi_traceback(surv, anchors, prev_state, prev_bit, depth):
    T = surv.shape[0]
    bits = np.empty(T, dtype=np.uint8)
    for j in range(T):
        a = j + depth
        if a > T:
            a = T
        s = anchors[a]
        k = a - 1
        while k > j:
            s = prev_state[s, surv[k, s]]
            k -= 1
        bits[j] = prev_bit[s, surv[j, s]]
    return bits


def viterbi_traceback(surv, anchors, prev_state, prev_bit, depth):
    return _viterbi_traceback(
        surv, anchors, np.ascontiguousarray(prev_state),
        np.ascontiguousarray(prev_bit), int(depth),
    )


@njit(**_JIT)
def _lms_equalize(rx, known, points, n_ff, n_fb, mu, ref_delay, train_len):
    T = rx.shape[0]
    M = points.shape[0]
    n_taps = n_ff + n_fb
    w = np.zeros(n_taps, dtype=np.complex128)
    w[ref_delay] = 1.0 + 0j
    fb = np.zeros(n_fb, dtype=np.complex128)
    est = np.empty(T, dtype=np.complex128)
    diverged_at = -1
    for t in range(T):
        y = 0j
        for i in range(n_ff):
            ti = t - i
            if ti >= 0:
                y += w[i] * rx[ti]
        for i in range(n_fb):
            y += w[n_ff + i] * fb[i]
        est[t] = y
        r = t - ref_delay
        if 0 <= r < train_len:
            d = known[r]
        else:
            best = 0
            dv = y - points[0]
            bd = dv.real * dv.real + dv.imag * dv.imag
            for p in range(1, M):
                dv = y - points[p]
                dd = dv.real * dv.real + dv.imag * dv.imag
                if dd < bd:
                    bd = dd
                    best = p
            d = points[best]
        if r >= 0:
            e = d - y
            me = mu * e
            for i in range(n_ff):
                ti = t - i
                if ti >= 0:
                    w[i] += me * np.conj(rx[ti])
            for i in range(n_fb):
                w[n_ff + i] += me * np.conj(fb[i])
            nrm = 0.0
            for i in range(n_taps):
                nrm += w[i].real * w[i].real + w[i].imag * w[i].imag
            if nrm > 1e12:  # tap norm > 1e6
                diverged_at = t
                break
        if n_fb > 0:
            for i in range(n_fb - 1, 0, -1):
                fb[i] = fb[i - 1]
            fb[0] = d
    return est, w, diverged_at


def lms_equalize(rx, known, points, n_ff, n_fb, mu, ref_delay, train_len):
    return _lms_equalize(
        np.ascontiguousarray(rx, dtype=np.complex128),
        np.ascontiguousarray(known, dtype=np.complex128),
        np.ascontiguousarray(points, dtype=np.complex128),
        int(n_ff), int(n_fb), float(mu), int(ref_delay), int(train_len),
    )


@njit(**_JIT)
def _mlse_detect(rx, taps, points, L, depth):
    T = rx.shape[0]
    M = points.shape[0]
    S = M**L
    Mpow = M ** (L - 1)

    pred_sum = np.zeros(S, dtype=np.complex128)
    for p in range(S):
        acc = 0j
        for i in range(1, L + 1):
            digit = (p // (M ** (L - i))) % M
            acc += taps[i] * points[digit]
        pred_sum[p] = acc

    metric = np.zeros(S)
    for c in range(S):
        acc = 0.0
        for t in range(L):
            y = 0j
            for i in range(t + 1):
                digit = (c // (M ** (t - i))) % M
                y += taps[i] * points[digit]
            dv = rx[t] - y
            acc += dv.real * dv.real + dv.imag * dv.imag
        metric[c] = acc

    n_steps = T - L
    surv = np.empty((n_steps, S), dtype=np.uint8)
    anchors = np.empty(n_steps + 1, dtype=np.int64)
    best_q = 0
    best = metric[0]
    for q in range(1, S):
        if metric[q] < best:
            best = metric[q]
            best_q = q
    anchors[0] = best_q
    new_metric = np.empty(S)
    for step in range(n_steps):
        t = L + step
        r = rx[t]
        best_q = 0
        best_all = np.inf
        for q in range(S):
            j = q // Mpow
            base = (q % Mpow) * M
            bj = taps[0] * points[j]
            p = base
            dv = r - bj - pred_sum[p]
            bq = metric[p] + dv.real * dv.real + dv.imag * dv.imag
            bm_ix = 0
            for m in range(1, M):
                p = base + m
                dv = r - bj - pred_sum[p]
                cand = metric[p] + dv.real * dv.real + dv.imag * dv.imag
                if cand < bq:
                    bq = cand
                    bm_ix = m
            new_metric[q] = bq
            surv[step, q] = bm_ix
            if bq < best_all:
                best_all = bq
                best_q = q
        for q in range(S):
            metric[q] = new_metric[q]
        anchors[step + 1] = best_q

    sym = np.empty(T, dtype=np.int64)
    for j in range(L, T):
        a = j + depth
        if a > T:
            a = T
        s = anchors[a - L]
        t = a - 1
        while t >= j + 1:
            s = (s % Mpow) * M + surv[t - L, s]
            t -= 1
        sym[j] = s // Mpow
    a0 = L + depth
    if a0 > T:
        a0 = T
    s = anchors[a0 - L]
    t = a0 - 1
    while t >= L:
        s = (s % Mpow) * M + surv[t - L, s]
        t -= 1
    for u in range(L):
        sym[u] = (s // (M**u)) % M
    return sym


def mlse_detect(rx, taps, points, memory, depth):
    return _mlse_detect(
        np.ascontiguousarray(rx, dtype=np.complex128),
        np.ascontiguousarray(taps, dtype=np.complex128),
        np.ascontiguousarray(points, dtype=np.complex128),
        int(memory), int(depth),
    )
