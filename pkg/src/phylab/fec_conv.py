"""Convolutional coding: trellis, puncturing, Viterbi decoding, and the
union bound on post-decoding bit error rate.

Conventions
-----------
* Generators are written in octal, e.g. ``133`` means taps ``1011011``.
* The shift register holds the newest bit at the highest-order tap; a
  step computes one parity per generator, serialized per input bit as
  ``g1(t), g2(t), g1(t+1), ...``.
* Puncture masks apply to that serialized stream, first element first,
  repeating with the mask period.  Deleted positions reappear on the
  receive side as zero-valued metrics meaning "no information".
* Soft metrics are positive when bit 0 is the more likely coded bit
  (BPSK polarity: bit 0 -> +1).  Hard decisions ride the same stream as
  +/-1 values so erasures stay representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import erfc

from . import _backend
from .errors import ConfigError, AlignmentError, EmptySpectrumError


@dataclass(frozen=True, eq=False)
class Trellis:
    constraint_length: int
    generators: tuple[int, ...]  # decoded tap masks, high bit = newest
    num_states: int
    n_out: int
    next_state: np.ndarray  # (S, 2) int64
    output_label: np.ndarray  # (S, 2) int64, bits packed g1 high
    prev_state: np.ndarray  # (S, 2) int64, ascending predecessors
    prev_bit: np.ndarray  # (S, 2) uint8
    prev_label: np.ndarray  # (S, 2) int64


@dataclass(frozen=True)
class PuncturePattern:
    mask: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.mask)

    @property
    def kept(self) -> int:
        return sum(self.mask)

    @property
    def keep_fraction(self) -> Fraction:
        return Fraction(self.kept, self.period)

    def code_rate(self, n_out: int = 2) -> Fraction:
        """Overall rate of a rate-1/n mother code under this mask."""
        return Fraction(self.period // n_out, self.kept)


@dataclass(frozen=True)
class WeightSpectrum:
    d_free: int
    weights: dict[int, float]  # distance -> total information-bit weight


def _decode_octal(gen) -> int:
    if isinstance(gen, str):
        text = gen.strip()
    else:
        text = str(int(gen))
    try:
        value = int(text, 8)
    except ValueError as exc:
        raise ConfigError(f"invalid octal generator {gen!r}") from exc
    return value


def build_trellis(constraint_length: int, generators) -> Trellis:
    """Tabulate the state machine of a rate-1/n feedforward encoder.

    The register update is ``full = (bit << (K-1)) | state`` followed by
    ``state = full >> 1``; output bit j is the parity of
    ``full & generator_j``, so the current input enters at the
    high-order end of every generator.
    """
    K = int(constraint_length)
    if K < 2:
        raise ConfigError("constraint_length must be at least 2")
    masks = tuple(_decode_octal(g) for g in generators)
    if len(masks) < 1:
        raise ConfigError("need at least one generator")
    if len(masks) > 8:
        raise ConfigError("too many generators (max 8)")
    for g, m in zip(generators, masks):
        if not 0 < m < (1 << K):
            raise ConfigError(
                f"generator {g!r} does not fit constraint length {K}"
            )
    n = len(masks)
    S = 1 << (K - 1)
    next_state = np.empty((S, 2), dtype=np.int64)
    output_label = np.empty((S, 2), dtype=np.int64)
    for s in range(S):
        for b in (0, 1):
            full = (b << (K - 1)) | s
            label = 0
            for m in masks:
                label = (label << 1) | (bin(full & m).count("1") & 1)
            next_state[s, b] = full >> 1
            output_label[s, b] = label
    prev_state = np.empty((S, 2), dtype=np.int64)
    prev_bit = np.empty((S, 2), dtype=np.uint8)
    prev_label = np.empty((S, 2), dtype=np.int64)
    for sp in range(S):
        # the two predecessors come from full = 2*sp and 2*sp + 1
        for e, full in enumerate((2 * sp, 2 * sp + 1)):
            b = full >> (K - 1)
            s = full & (S - 1)
            prev_state[sp, e] = s
            prev_bit[sp, e] = b
            prev_label[sp, e] = output_label[s, b]
    return Trellis(
        constraint_length=K,
        generators=masks,
        num_states=S,
        n_out=n,
        next_state=next_state,
        output_label=output_label,
        prev_state=prev_state,
        prev_bit=prev_bit,
        prev_label=prev_label,
    )


def conv_encode(bits, trellis: Trellis, terminate: bool = True) -> np.ndarray:
    """Encode a bit vector; termination appends K-1 zeros so the path
    remerges with state 0 (callers drop the matching tail decisions)."""
    b = np.asarray(bits)
    if b.ndim != 1:
        raise AlignmentError("bits must be one-dimensional")
    b = b.astype(np.uint8)
    if b.size and b.max() > 1:
        raise ConfigError("bits must be 0/1 valued")
    K = trellis.constraint_length
    if terminate:
        b = np.concatenate([b, np.zeros(K - 1, dtype=np.uint8)])
    T = b.size
    out = np.zeros((T, trellis.n_out), dtype=np.uint8)
    if T == 0:
        return out.reshape(-1)
    padded = np.concatenate([np.zeros(K - 1, dtype=np.uint8), b])
    for j, g in enumerate(trellis.generators):
        acc = np.zeros(T, dtype=np.uint8)
        for i in range(K):  # delay i taps generator bit K-1-i
            if (g >> (K - 1 - i)) & 1:
                acc ^= padded[K - 1 - i : K - 1 - i + T]
        out[:, j] = acc
    return out.reshape(-1)


def puncture_pattern(mask) -> PuncturePattern:
    """Accept a "111001"-style string or an iterable of 0/1."""
    if isinstance(mask, PuncturePattern):
        return mask
    if isinstance(mask, str):
        if not mask or set(mask) - {"0", "1"}:
            raise ConfigError(f"invalid puncture mask {mask!r}")
        bits = tuple(int(c) for c in mask)
    else:
        bits = tuple(int(v) for v in mask)
        if not bits or any(v not in (0, 1) for v in bits):
            raise ConfigError(f"invalid puncture mask {mask!r}")
    if sum(bits) == 0:
        raise ConfigError("puncture mask must keep at least one position")
    return PuncturePattern(mask=bits)


def puncture(stream, pattern) -> np.ndarray:
    """Drop masked positions from a serialized coded stream."""
    pat = puncture_pattern(pattern)
    x = np.asarray(stream)
    if x.ndim != 1:
        raise AlignmentError("stream must be one-dimensional")
    if x.size % pat.period:
        raise AlignmentError(
            f"stream length {x.size} not divisible by mask period "
            f"{pat.period}; pad before puncturing"
        )
    keep = np.tile(np.asarray(pat.mask, dtype=bool), x.size // pat.period)
    return x[keep]


def depuncture(stream, pattern, erasure=0.0) -> np.ndarray:
    """Re-expand a punctured metric stream, erasures at deleted slots."""
    pat = puncture_pattern(pattern)
    x = np.asarray(stream, dtype=np.float64)
    if x.ndim != 1:
        raise AlignmentError("stream must be one-dimensional")
    if x.size % pat.kept:
        raise AlignmentError(
            f"stream length {x.size} not divisible by kept count {pat.kept}"
        )
    periods = x.size // pat.kept
    out = np.full(periods * pat.period, float(erasure), dtype=np.float64)
    keep = np.tile(np.asarray(pat.mask, dtype=bool), periods)
    out[keep] = x
    return out


def metrics_from_hard_bits(bits) -> np.ndarray:
    """Map hard bits onto the metric convention (bit 0 -> +1.0)."""
    b = np.asarray(bits, dtype=np.float64)
    return 1.0 - 2.0 * b


def default_traceback_depth(constraint_length: int, punctured: bool = False) -> int:
    """5(K-1) plain; 12(K-1) punctured, since erasures stretch error
    events."""
    factor = 12 if punctured else 5
    return factor * (int(constraint_length) - 1)


def _branch_metric_table(metrics2d: np.ndarray, n_out: int, mode: str) -> np.ndarray:
    labels = np.arange(1 << n_out)
    shifts = np.arange(n_out - 1, -1, -1)
    lab_bits = (labels[:, None] >> shifts[None, :]) & 1
    signs = (1.0 - 2.0 * lab_bits).astype(np.float64)  # (2^n, n)
    if mode == "soft":
        return -(metrics2d @ signs.T)
    # hard: count coded-bit disagreements; zero metrics vote for neither
    prod = metrics2d[:, None, :] * signs[None, :, :]
    return (prod < 0).sum(axis=2).astype(np.float64)


def viterbi_decode(
    trellis: Trellis,
    metrics,
    mode: str = "hard",
    traceback_depth: int | None = None,
) -> np.ndarray:
    """Maximum-likelihood sequence decisions over the coded metrics.

    Branch metrics are Hamming distance (hard) or negative correlation
    (soft); ties prefer the lower-numbered predecessor state.  Each
    decision is read off the winning path anchored ``traceback_depth``
    steps later (the block end for the final window), so a terminated
    stream decodes exactly when the depth is sufficient.
    """
    if mode not in ("hard", "soft"):
        raise ConfigError(f"unknown decode mode {mode!r}")
    m = np.asarray(metrics, dtype=np.float64)
    if m.ndim != 1:
        raise AlignmentError("metrics must be one-dimensional")
    n = trellis.n_out
    if m.size % n:
        raise AlignmentError(
            f"metric count {m.size} not divisible by outputs per step {n}"
        )
    depth = (
        default_traceback_depth(trellis.constraint_length)
        if traceback_depth is None
        else int(traceback_depth)
    )
    if depth < 1:
        raise ConfigError("traceback depth must be at least 1")
    T = m.size // n
    if T == 0:
        return np.empty(0, dtype=np.uint8)
    bm = _branch_metric_table(m.reshape(T, n), n, mode)
    surv, anchors = _backend.viterbi_forward(
        bm, trellis.prev_state, trellis.prev_label
    )
    return _backend.viterbi_traceback(
        surv, anchors, trellis.prev_state, trellis.prev_bit, depth
    )


def _label_weights(trellis: Trellis, mask: tuple[int, ...]) -> np.ndarray:
    """Punctured output weight of every (state, input) edge per input
    phase; shape (P_in, S, 2)."""
    n = trellis.n_out
    p_in = len(mask) // n
    S = trellis.num_states
    shifts = np.arange(n - 1, -1, -1)
    out_bits = (trellis.output_label[None, :, :] >> shifts[:, None, None]) & 1
    w = np.empty((p_in, S, 2), dtype=np.int64)
    for ph in range(p_in):
        keep = np.asarray(mask[ph * n : (ph + 1) * n], dtype=np.int64)
        w[ph] = (out_bits * keep[:, None, None]).sum(axis=0)
    return w


def distance_spectrum(
    trellis: Trellis, d_max: int | None = None, pattern=None
) -> WeightSpectrum:
    """Information-bit weight of every simple error event, by punctured
    output distance, summed over mask start phases.

    An event diverges from the zero state, never revisits it until the
    final remerge, and is truncated at ``d_max``; ``None`` probes the
    free distance first and tabulates up to d_free + 10.  A mask
    admitting a weight-free loop never drains its active paths and is
    rejected.
    """
    if d_max is None:
        probe = 2
        while True:
            try:
                shallow = distance_spectrum(trellis, probe, pattern)
                return distance_spectrum(trellis, shallow.d_free + 10, pattern)
            except EmptySpectrumError as exc:
                if exc.d_free is not None:
                    return distance_spectrum(trellis, exc.d_free + 10, pattern)
                probe *= 4
                if probe > 4096:
                    raise
    if d_max < 1:
        raise ConfigError("d_max must be at least 1")
    n = trellis.n_out
    if pattern is None:
        mask = tuple([1] * n)
    else:
        mask = puncture_pattern(pattern).mask
        if len(mask) % n:
            raise ConfigError(
                f"mask period {len(mask)} not a multiple of outputs per "
                f"step {n}"
            )
    omega = _spectrum_search(trellis, d_max, mask)
    if not omega:
        probe = d_max
        d_free = None
        while probe < 4 * d_max + 64:
            probe *= 2
            deeper = _spectrum_search(trellis, probe, mask)
            if deeper:
                d_free = min(deeper)
                break
        raise EmptySpectrumError(
            f"no error events at distance <= {d_max}"
            + (f"; free distance is {d_free}" if d_free else ""),
            d_free=d_free,
        )
    return WeightSpectrum(d_free=min(omega), weights=dict(sorted(omega.items())))


def _spectrum_search(trellis: Trellis, d_max: int, mask) -> dict[int, float]:
    S = trellis.num_states
    p_in = len(mask) // trellis.n_out
    w_edge = _label_weights(trellis, mask)
    ns = trellis.next_state
    omega: dict[int, float] = {}
    max_steps = p_in * S * (d_max + 3)
    for phase0 in range(p_in):
        # counts[s, d], wsum[s, d] for live paths currently in state s
        counts = np.zeros((S, d_max + 1))
        wsum = np.zeros((S, d_max + 1))
        s1 = ns[0, 1]
        w1 = w_edge[phase0, 0, 1]
        if w1 <= d_max:
            counts[s1, w1] = 1.0
            wsum[s1, w1] = 1.0
        step = 1
        while counts.any():
            if step > max_steps:
                raise ConfigError(
                    "puncture mask admits a weight-free loop; distance "
                    "spectrum does not converge"
                )
            ph = (phase0 + step) % p_in
            new_counts = np.zeros_like(counts)
            new_wsum = np.zeros_like(wsum)
            for b in (0, 1):
                shifted_w = w_edge[ph, 1:, b]  # from states 1..S-1
                tgt = ns[1:, b]
                for s in range(1, S):
                    row_c = counts[s]
                    if not row_c.any():
                        continue
                    w = int(shifted_w[s - 1])
                    t = int(tgt[s - 1])
                    hi = d_max + 1 - w
                    if hi <= 0:
                        continue
                    add_c = row_c[:hi]
                    add_w = wsum[s, :hi] + b * add_c
                    if t == 0:
                        dists = np.nonzero(add_c)[0]
                        for d in dists:
                            key = int(d + w)
                            omega[key] = omega.get(key, 0.0) + float(add_w[d])
                    else:
                        new_counts[t, w:] += add_c
                        new_wsum[t, w:] += add_w
            counts = new_counts
            wsum = new_wsum
            step += 1
    return omega


def punctured_bound_ber(
    spectrum: WeightSpectrum, rate_num: int, rate_den: int, ebn0_db
) -> np.ndarray:
    """Union bound on decoded BER for a rate (n-1)/n code, truncated at
    the spectrum's largest tabulated distance and clamped into [0, 1].
    """
    if rate_den != rate_num + 1:
        raise ConfigError(
            f"rate must have the (n-1)/n form, got {rate_num}/{rate_den}"
        )
    if rate_num < 1:
        raise ConfigError("rate numerator must be positive")
    if not spectrum.weights:
        raise ConfigError("empty weight spectrum")
    ebn0 = np.asarray(ebn0_db, dtype=np.float64)
    scalar = ebn0.ndim == 0
    ebn0_lin = 10.0 ** (np.atleast_1d(ebn0) / 10.0)
    r = rate_num / rate_den
    total = np.zeros_like(ebn0_lin)
    for d, w in spectrum.weights.items():
        total += w * erfc(np.sqrt(r * d * ebn0_lin))
    pb = np.clip(total / (2.0 * rate_num), 0.0, 1.0)
    return float(pb[0]) if scalar else pb
