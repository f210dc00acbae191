"""AWGN and FIR multipath channels with explicit SNR bookkeeping.

The signal-to-noise ratio and the per-information-bit ratio Eb/N0 are
related through the spectral efficiency n = bits_per_symbol x
code_rate:

    snr_db = ebn0_db + 10*log10(n)

Noise is circularly symmetric complex Gaussian with the stated total
variance split evenly between the real and imaginary parts, generated
from the package's counter-based stream so that a seed fully fixes the
sequence.  Real-valued constellations see only the in-phase half of
that variance, which is exactly the convention that reproduces the
closed-form BPSK error rate 0.5*erfc(sqrt(Eb/N0)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng as _rng
from .errors import ConfigError

#: default 3-tap dispersive channel for equalizer experiments
#: (unit-energy normalized at construction)
DEFAULT_MULTIPATH_TAPS = (0.8, 0.5, 0.3)


def _efficiency(bits_per_symbol: int, code_rate) -> float:
    k = int(bits_per_symbol)
    r = float(Fraction(code_rate)) if not isinstance(code_rate, float) else code_rate
    if k < 1:
        raise ConfigError(f"bits_per_symbol must be >= 1, got {bits_per_symbol}")
    if not 0.0 < r <= 1.0:
        raise ConfigError(f"code_rate must lie in (0, 1], got {code_rate}")
    return k * r


def ebn0_to_snr(ebn0_db: float, bits_per_symbol: int, code_rate) -> float:
    """snr_db = ebn0_db + 10*log10(bits_per_symbol * code_rate)."""
    return float(ebn0_db) + 10.0 * math.log10(_efficiency(bits_per_symbol, code_rate))


def snr_to_ebn0(snr_db: float, bits_per_symbol: int, code_rate) -> float:
    """Exact inverse of :func:`ebn0_to_snr`."""
    return float(snr_db) - 10.0 * math.log10(_efficiency(bits_per_symbol, code_rate))


@dataclass(frozen=True, eq=False)
class LinkBudget:
    ebn0_db: float
    bits_per_symbol: int
    code_rate: Fraction
    spectral_efficiency: float
    snr_db: float


def link_budget(bits_per_symbol: int, code_rate, *, ebn0_db: float | None = None,
                snr_db: float | None = None) -> LinkBudget:
    """Fill in the missing one of (ebn0_db, snr_db); exactly one given."""
    if (ebn0_db is None) == (snr_db is None):
        raise ConfigError("specify exactly one of ebn0_db or snr_db")
    rate = Fraction(code_rate).limit_denominator(10**9)
    eff = _efficiency(bits_per_symbol, rate)
    if ebn0_db is None:
        ebn0_db = snr_to_ebn0(snr_db, bits_per_symbol, rate)
    else:
        snr_db = ebn0_to_snr(ebn0_db, bits_per_symbol, rate)
    return LinkBudget(
        ebn0_db=float(ebn0_db),
        bits_per_symbol=int(bits_per_symbol),
        code_rate=rate,
        spectral_efficiency=eff,
        snr_db=float(snr_db),
    )


def noise_variance(snr_db: float, signal_power_w: float) -> float:
    """Total complex noise variance for the given SNR and signal power."""
    if not signal_power_w > 0.0:
        raise ConfigError(f"signal power must be positive, got {signal_power_w}")
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return float(signal_power_w) / 10.0 ** (float(snr_db) / 10.0)


def awgn(symbols, snr_db: float, signal_power_w: float | None = None,
         seed: int = 0) -> np.ndarray:
    """Add seeded circular complex Gaussian noise at the given SNR.

    ``signal_power_w`` fixes the reference signal power; when omitted
    it is measured from the input.  ``snr_db = +inf`` bypasses noise
    injection entirely.
    """
    x = np.asarray(symbols, dtype=np.complex128)
    if math.isinf(float(snr_db)) and float(snr_db) > 0:
        return x.copy()
    if signal_power_w is None:
        signal_power_w = float(np.mean(np.abs(x) ** 2)) if x.size else 0.0
    nv = noise_variance(float(snr_db), float(signal_power_w))
    noise = _rng.complex_gaussians(_rng.substream(int(seed), _rng.TAG_NOISE), x.size)
    return x + noise.reshape(x.shape) * math.sqrt(nv)


@dataclass(frozen=True, eq=False)
class FirChannel:
    taps: np.ndarray  # complex128, h_0 ... h_L

    @property
    def memory(self) -> int:
        return self.taps.size - 1


def fir_channel(taps=None, normalize: bool = True) -> FirChannel:
    """Build a FIR channel; default is the 3-tap dispersive profile
    scaled to unit energy."""
    raw = DEFAULT_MULTIPATH_TAPS if taps is None else taps
    h = np.asarray(raw, dtype=np.complex128).reshape(-1)
    if h.size == 0 or not np.any(h != 0):
        raise ConfigError("channel needs at least one nonzero tap")
    if normalize:
        h = h / np.sqrt(np.sum(np.abs(h) ** 2))
    return FirChannel(taps=h)


def fir_apply(symbols, ch: FirChannel) -> np.ndarray:
    """Linear convolution truncated to the input length."""
    x = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    if x.size == 0:
        return x.copy()
    return np.convolve(x, ch.taps)[: x.size]
