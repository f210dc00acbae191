"""Benchmark the accelerated kernels against the pure-numpy fallback.

Runs each hot kernel (Viterbi forward/traceback, LMS equalization, MLSE
detection) on identical inputs through both backends, reports wall time
and speedup, and checks the outputs agree.

Usage: python3 benchmarks/bench_backends.py [--steps N] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from phylab import backend_numba, backend_numpy
from phylab.channel import awgn, fir_channel, fir_apply, DEFAULT_MULTIPATH_TAPS
from phylab.fec_conv import build_trellis, conv_encode, metrics_from_hard_bits
from phylab.fec_conv import _branch_metric_table  # noqa: use internal table builder
from phylab.modem import constellation_by_name, modulate
from phylab.rng import bits as rng_bits


def _time(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_viterbi(steps, repeats):
    trellis = build_trellis(7, ("133", "171"))
    info = rng_bits(1, steps - trellis.constraint_length + 1)
    coded = conv_encode(info, trellis)
    m = metrics_from_hard_bits(coded).astype(np.float64)
    bm = _branch_metric_table(m.reshape(-1, trellis.n_out), trellis.n_out, "soft")
    depth = 35

    rows = []
    outs = {}
    for name, mod in (("numba", backend_numba), ("numpy", backend_numpy)):
        def run(mod=mod):
            surv, anchors = mod.viterbi_forward(
                bm, trellis.prev_state, trellis.prev_label
            )
            return mod.viterbi_traceback(
                surv, anchors, trellis.prev_state, trellis.prev_bit, depth
            )
        run()  # warm-up (JIT compile on the numba path)
        t, out = _time(run, repeats)
        rows.append((name, t))
        outs[name] = out
    exact = bool(np.array_equal(outs["numba"], outs["numpy"]))
    return "viterbi fwd+traceback", rows, f"outputs identical: {exact}"


def bench_lms(steps, repeats):
    const = constellation_by_name("bpsk")
    tx = modulate(rng_bits(2, steps), const)
    rx = awgn(fir_apply(tx, fir_channel()), 12.0, seed=3)
    known = tx[:500]

    rows = []
    outs = {}
    for name, mod in (("numba", backend_numba), ("numpy", backend_numpy)):
        def run(mod=mod):
            return mod.lms_equalize(rx, known, const.points, 11, 3, 0.005, 5, 500)
        run()
        t, out = _time(run, repeats)
        rows.append((name, t))
        outs[name] = out
    est_a, est_b = outs["numba"][0], outs["numpy"][0]
    diff = float(np.max(np.abs(est_a - est_b))) if est_a.size else 0.0
    return "lms equalize (dfe taps)", rows, f"max |est diff|: {diff:.3g}"


def bench_mlse(steps, repeats):
    const = constellation_by_name("bpsk")
    tx = modulate(rng_bits(4, steps), const)
    channel = fir_channel(DEFAULT_MULTIPATH_TAPS)
    taps = channel.taps
    rx = awgn(fir_apply(tx, channel), 8.0, seed=5)

    rows = []
    outs = {}
    for name, mod in (("numba", backend_numba), ("numpy", backend_numpy)):
        def run(mod=mod):
            return mod.mlse_detect(rx, taps, const.points, 2, 24)
        run()
        t, out = _time(run, repeats)
        rows.append((name, t))
        outs[name] = out
    exact = bool(np.array_equal(outs["numba"], outs["numpy"]))
    return "mlse detect (4 states)", rows, f"outputs identical: {exact}"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=50_000,
                        help="workload size per kernel (default 50000)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions, best-of (default 3)")
    args = parser.parse_args()

    print(f"workload: {args.steps} steps, best of {args.repeats}")
    print(f"{'kernel':28s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}  agreement")
    for bench in (bench_viterbi, bench_lms, bench_mlse):
        title, rows, agree = bench(args.steps, args.repeats)
        times = dict(rows)
        speedup = times["numpy"] / times["numba"] if times["numba"] > 0 else float("inf")
        print(
            f"{title:28s} {times['numba']*1e3:9.1f}ms {times['numpy']*1e3:9.1f}ms "
            f"{speedup:7.1f}x  {agree}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
