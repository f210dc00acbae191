"""BER accounting, error-vector magnitude, and spectrum estimation.

EVM compares a received symbol grid R against its known reference S:

    evm_ratio = sqrt(sum |R - S|^2) / sqrt(sum |S|^2)
    evm_db    = 20 * log10(evm_ratio)

A perfect match yields ratio 0, reported as -inf dB (serialized as
null in JSON and "-inf" in text) and always compliant.  The
periodogram is a Welch average over Hann-windowed segments with 50%
overlap, scaled to dBW/Hz, so unit-power noise sampled at rate fs
sits at 10*log10(1/fs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, AlignmentError


@dataclass(frozen=True)
class BerRecord:
    bits: int
    errors: int
    seed: int = 0
    label: str = ""
    snr_db: float | None = None
    ebn0_db: float | None = None
    chain: str = ""
    modulation: str = ""
    family: str = ""
    code_rate: str = ""

    def __post_init__(self):
        if self.bits <= 0:
            raise ConfigError(f"bits must be positive, got {self.bits}")
        if not 0 <= self.errors <= self.bits:
            raise ConfigError(
                f"errors {self.errors} outside [0, bits={self.bits}]"
            )

    @property
    def ber(self) -> float:
        return self.errors / self.bits


def count_errors(tx_bits, rx_bits, label: str = "", seed: int = 0) -> BerRecord:
    """Exact Hamming distance between two equal-length bit streams."""
    a = np.asarray(tx_bits).reshape(-1)
    b = np.asarray(rx_bits).reshape(-1)
    if a.size != b.size:
        raise AlignmentError(f"bit streams differ in length ({a.size} vs {b.size})")
    if a.size == 0:
        raise AlignmentError("cannot count errors over zero bits")
    return BerRecord(bits=int(a.size), errors=int(np.count_nonzero(a != b)),
                     label=label, seed=seed)


def merge_records(first: BerRecord, *others: BerRecord) -> BerRecord:
    """Sum bits and errors across shards of the same sweep point."""
    bits = first.bits
    errors = first.errors
    for r in others:
        for field in ("label", "snr_db", "ebn0_db", "chain", "modulation",
                      "family", "code_rate"):
            if getattr(r, field) != getattr(first, field):
                raise ConfigError(
                    f"cannot merge records differing in {field}: "
                    f"{getattr(first, field)!r} vs {getattr(r, field)!r}"
                )
        bits += r.bits
        errors += r.errors
    return replace(first, bits=bits, errors=errors)


@dataclass(frozen=True)
class EvmReport:
    evm_ratio: float
    evm_db: float
    limit_db: float
    compliant: bool


def evm(received, reference, limit_db: float) -> EvmReport:
    """Error-vector magnitude of R against reference S (see module doc)."""
    r = np.asarray(received, dtype=np.complex128)
    s = np.asarray(reference, dtype=np.complex128)
    if r.shape != s.shape:
        raise AlignmentError(f"shape mismatch {r.shape} vs {s.shape}")
    if r.size == 0:
        raise ConfigError("empty symbol grid")
    ref_energy = float(np.sum(np.abs(s) ** 2))
    if ref_energy == 0.0:
        raise ConfigError("EVM undefined for an all-zero reference")
    ratio = math.sqrt(float(np.sum(np.abs(r - s) ** 2)) / ref_energy)
    db = 20.0 * math.log10(ratio) if ratio > 0.0 else float("-inf")
    return EvmReport(evm_ratio=ratio, evm_db=db, limit_db=float(limit_db),
                     compliant=db <= float(limit_db))


def periodogram(samples, sample_rate_hz: float, fft_len: int = 256):
    """Welch PSD: Hann-windowed segments with 50% overlap.

    Returns (freqs_hz, psd_dbw_per_hz), both centered (DC in the
    middle).  Scaling: mean |FFT(w*x)|^2 / (sample_rate * sum(w^2))
    per bin, so the integral over frequency equals the time-domain
    mean power and unit-power noise reads 10*log10(1/sample_rate).
    """
    x = np.asarray(samples, dtype=np.complex128).reshape(-1)
    n = int(fft_len)
    if n < 2 or n & (n - 1):
        raise ConfigError(f"fft_len must be a power of two >= 2, got {fft_len}")
    fs = float(sample_rate_hz)
    if fs <= 0:
        raise ConfigError(f"sample rate must be positive, got {sample_rate_hz}")
    if x.size < n:
        raise AlignmentError(f"need at least {n} samples, got {x.size}")
    hop = n // 2
    n_seg = 1 + (x.size - n) // hop
    window = np.hanning(n)
    scale = fs * float(np.sum(window**2))
    starts = hop * np.arange(n_seg)
    segs = x[starts[:, None] + np.arange(n)[None, :]] * window[None, :]
    psd = np.mean(np.abs(np.fft.fft(segs, axis=1)) ** 2, axis=0) / scale
    freqs = np.fft.fftshift(np.fft.fftfreq(n, d=1.0 / fs))
    with np.errstate(divide="ignore"):
        psd_db = 10.0 * np.log10(np.fft.fftshift(psd))
    return freqs, psd_db
