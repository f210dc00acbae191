"""Channel estimation and equalization.

Three receivers for dispersive channels: an adaptive linear
transversal filter, a decision-feedback equalizer (both complex LMS,
trained on a known preamble and decision-directed afterwards), and a
maximum-likelihood sequence detector running a Viterbi search over
the channel trellis built from a least-squares channel estimate.

Alignment convention: an equalizer output at index i estimates the
transmitted symbol at index i; internally the filters run with a
reference-tap delay and the wrapper shifts it away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConfigError, AlignmentError, DivergenceError, IllConditionedError
from .modem import Constellation, make_constellation

_MLSE_STATE_LIMIT = 4096
_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    taps: np.ndarray          # complex128 estimates h_0 ... h_L
    freq_response: np.ndarray  # complex response on a uniform grid
    residual: float            # training mean-squared error

    @property
    def memory(self) -> int:
        return self.taps.size - 1


def freq_response(taps, n_grid: int = 256) -> np.ndarray:
    """Complex frequency response of a tap vector on n_grid points."""
    h = np.asarray(taps, dtype=np.complex128).reshape(-1)
    if n_grid < h.size:
        raise ConfigError(f"n_grid {n_grid} smaller than tap count {h.size}")
    return np.fft.fft(h, n=int(n_grid))


def estimate_channel_ls(tx_training, rx_training, order: int,
                        n_grid: int = 256) -> ChannelEstimate:
    """Least-squares FIR fit of rx ~= conv(tx, h) with memory ``order``.

    Uses only the rows where the filter is fully loaded (no edge
    zeros), so degenerate training (e.g. a constant preamble) is
    detected as rank deficiency rather than fitted through the edges.
    """
    tx = np.asarray(tx_training, dtype=np.complex128).reshape(-1)
    rx = np.asarray(rx_training, dtype=np.complex128).reshape(-1)
    L = int(order)
    if L < 0:
        raise ConfigError(f"channel order must be >= 0, got {order}")
    if tx.size != rx.size:
        raise AlignmentError(
            f"training sequences differ in length ({tx.size} vs {rx.size})"
        )
    if tx.size < 4 * (L + 1):
        raise ConfigError(
            f"training length {tx.size} below required {4 * (L + 1)} for order {L}"
        )
    rows = np.arange(L, tx.size)
    cols = np.arange(L + 1)
    X = tx[rows[:, None] - cols[None, :]]
    y = rx[L:]
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > _COND_LIMIT:
        raise IllConditionedError(
            "training sequence is rank deficient; use a varied preamble"
        )
    taps, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.mean(np.abs(y - X @ taps) ** 2))
    return ChannelEstimate(
        taps=taps, freq_response=freq_response(taps, n_grid), residual=resid
    )


@dataclass(frozen=True, eq=False)
class EqualizerConfig:
    kind: str
    ff_taps: int = 11
    fb_taps: int = 0
    step_size: float = 0.01
    traceback: int = 32
    training_len: int = 500
    reference_tap: int | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "dfe", "mlse"):
            raise ConfigError(f"unknown equalizer kind {self.kind!r}")
        if self.ff_taps < 1:
            raise ConfigError("ff_taps must be >= 1")
        if self.fb_taps < 0:
            raise ConfigError("fb_taps must be >= 0")
        if not 0.0 <= self.step_size < 1.0:
            raise ConfigError("step_size must lie in [0, 1)")
        if self.traceback < 1:
            raise ConfigError("traceback must be >= 1")
        if self.training_len < 0:
            raise ConfigError("training_len must be >= 0")
        ref = self.ff_taps // 2 if self.reference_tap is None else self.reference_tap
        if not 0 <= ref < self.ff_taps:
            raise ConfigError("reference_tap must lie inside the forward filter")
        object.__setattr__(self, "reference_tap", int(ref))


def _run_lms(rx, training, cfg: EqualizerConfig, constellation, n_fb: int):
    x = np.ascontiguousarray(np.asarray(rx, dtype=np.complex128).reshape(-1))
    known = np.ascontiguousarray(np.asarray(training, dtype=np.complex128).reshape(-1))
    c = constellation if constellation is not None else make_constellation("psk", 2)
    train_len = min(cfg.training_len, known.size)
    est, _taps, diverged_at = _backend.lms_equalize(
        x, known, np.ascontiguousarray(c.points), cfg.ff_taps, n_fb,
        float(cfg.step_size), cfg.reference_tap, train_len,
    )
    if diverged_at >= 0:
        raise DivergenceError(
            f"tap norm exceeded 1e6 at sample {diverged_at}; reduce step_size"
        )
    return est[cfg.reference_tap:]


def equalize_linear(rx, training, cfg: EqualizerConfig,
                    constellation: Constellation | None = None) -> np.ndarray:
    """LMS transversal filter; output i estimates transmitted symbol i."""
    if cfg.kind != "linear":
        raise ConfigError(f"config kind {cfg.kind!r} is not 'linear'")
    return _run_lms(rx, training, cfg, constellation, 0)


def equalize_dfe(rx, training, cfg: EqualizerConfig,
                 constellation: Constellation | None = None) -> np.ndarray:
    """Decision-feedback LMS; with fb_taps=0 this degenerates to the
    linear equalizer output exactly."""
    if cfg.kind != "dfe":
        raise ConfigError(f"config kind {cfg.kind!r} is not 'dfe'")
    return _run_lms(rx, training, cfg, constellation, cfg.fb_taps)


def equalize_mlse(rx, est: ChannelEstimate, constellation: Constellation,
                  traceback: int = 32) -> np.ndarray:
    """Sequence detection over the channel trellis; returns bits."""
    x = np.ascontiguousarray(np.asarray(rx, dtype=np.complex128).reshape(-1))
    taps = np.ascontiguousarray(np.asarray(est.taps, dtype=np.complex128).reshape(-1))
    L = taps.size - 1
    M = constellation.order
    if taps.size == 0:
        raise ConfigError("channel estimate has no taps")
    if M**L > _MLSE_STATE_LIMIT:
        raise ConfigError(
            f"trellis would need {M**L} states (limit {_MLSE_STATE_LIMIT})"
        )
    if int(traceback) < max(L, 1):
        raise ConfigError(f"traceback {traceback} below channel memory {L}")
    k = constellation.bits_per_symbol
    shifts = np.arange(k - 1, -1, -1)
    if L == 0:
        if taps[0] == 0:
            raise ConfigError("single-tap channel estimate is zero")
        from .modem import demodulate_hard

        return demodulate_hard(x / taps[0], constellation)
    if x.size < L + 1:
        raise AlignmentError(
            f"need at least {L + 1} samples for memory {L}, got {x.size}"
        )
    sym = _backend.mlse_detect(
        x, taps, np.ascontiguousarray(constellation.points), L, int(traceback)
    )
    return ((sym[:, None] >> shifts[None, :]) & 1).astype(np.uint8).reshape(-1)
