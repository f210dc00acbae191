"""Bit/symbol mapping for M-PSK and square M-QAM.

Constellations carry unit average symbol energy and Gray labels:
circularly reflected for PSK, binary-reflected per axis for QAM (the
first half of each k-bit group selects the in-phase level, the second
half the quadrature level).  Points are indexed by label value, so
``points[label]`` is the transmitted symbol for that bit pattern.

Documented conventions: BPSK maps bit 0 to +1; QPSK is the unit
circle at odd multiples of 45 degrees; hard decisions break exact
ties toward the lowest label; soft metrics are max-log likelihood
ratios scaled by 1/noise_var with positive values favouring bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, AlignmentError

_PSK_ORDERS = (2, 4, 8, 16, 32, 64, 128, 256)
_QAM_ORDERS = (4, 16, 64, 256)

# symbols processed per block when searching nearest points, bounds
# the (block x M) distance matrix to a few megabytes
_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class Constellation:
    family: str
    order: int
    points: np.ndarray  # complex128, points[label]
    norm: float

    @property
    def bits_per_symbol(self) -> int:
        return int(self.order).bit_length() - 1


def _gray(v: np.ndarray) -> np.ndarray:
    return v ^ (v >> 1)


def _gray_decode(g: np.ndarray) -> np.ndarray:
    v = g.copy()
    s = v >> 1
    while s.any():
        v ^= s
        s >>= 1
    return v


def make_constellation(family: str, order: int) -> Constellation:
    """Unit-average-energy constellation with Gray labeling."""
    fam = str(family).lower()
    m = int(order)
    if fam == "psk":
        if m not in _PSK_ORDERS:
            raise ConfigError(f"unsupported PSK order {m}")
        k = m.bit_length() - 1
        ring = np.arange(m)
        labels = _gray(ring)
        phase0 = np.pi / 4 if m == 4 else 0.0
        ring_points = np.exp(1j * (2.0 * np.pi * ring / m + phase0))
        points = np.empty(m, dtype=np.complex128)
        points[labels] = ring_points
        if m == 2:
            points = np.array([1.0 + 0.0j, -1.0 + 0.0j])
        return Constellation(family="psk", order=m, points=points, norm=1.0)
    if fam == "qam":
        if m not in _QAM_ORDERS:
            raise ConfigError(f"unsupported QAM order {m} (square orders only)")
        k = m.bit_length() - 1
        half = k // 2
        side = 1 << half
        lab = np.arange(m)
        i_bits = lab >> half
        q_bits = lab & (side - 1)
        i_level = 2 * _gray_decode(i_bits) - (side - 1)
        q_level = 2 * _gray_decode(q_bits) - (side - 1)
        raw = i_level.astype(np.float64) + 1j * q_level.astype(np.float64)
        norm = 1.0 / np.sqrt(np.mean(np.abs(raw) ** 2))
        return Constellation(family="qam", order=m, points=raw * norm,
                             norm=float(norm))
    raise ConfigError(f"unknown constellation family {family!r}")


_BY_NAME = {
    "bpsk": ("psk", 2),
    "qpsk": ("psk", 4),
    "8psk": ("psk", 8),
    "4qam": ("qam", 4),
    "16qam": ("qam", 16),
    "64qam": ("qam", 64),
    "256qam": ("qam", 256),
}


def constellation_by_name(name: str) -> Constellation:
    """Resolve a short scheme name like "bpsk" or "64qam"."""
    key = str(name).lower()
    if key not in _BY_NAME:
        raise ConfigError(
            f"unknown modulation {name!r}; choose from {sorted(_BY_NAME)}"
        )
    return make_constellation(*_BY_NAME[key])


def modulate(bits, c: Constellation) -> np.ndarray:
    """Map bits (MSB of each k-bit group first) onto labeled points."""
    b = np.asarray(bits, dtype=np.int64)
    k = c.bits_per_symbol
    if b.ndim != 1:
        raise AlignmentError("bits must be one-dimensional")
    if b.size % k:
        raise AlignmentError(
            f"bit count {b.size} not a multiple of {k} (order {c.order})"
        )
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = (b.reshape(-1, k) * weights).sum(axis=1)
    return c.points[labels]


def _nearest_labels(symbols: np.ndarray, c: Constellation) -> np.ndarray:
    out = np.empty(symbols.size, dtype=np.int64)
    pts = c.points
    for lo in range(0, symbols.size, _CHUNK):
        blk = symbols[lo : lo + _CHUNK]
        dr = blk.real[:, None] - pts.real[None, :]
        di = blk.imag[:, None] - pts.imag[None, :]
        # argmin returns the first minimum, i.e. the lowest label on ties
        out[lo : lo + _CHUNK] = np.argmin(dr * dr + di * di, axis=1)
    return out


def demodulate_hard(symbols, c: Constellation) -> np.ndarray:
    """Nearest-point labels unpacked to bits (ties toward lowest label)."""
    sym = np.ascontiguousarray(np.asarray(symbols, dtype=np.complex128).reshape(-1))
    labels = _nearest_labels(sym, c)
    k = c.bits_per_symbol
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8).reshape(-1)


def demodulate_soft(symbols, c: Constellation, noise_var: float) -> np.ndarray:
    """Max-log LLR per bit: (min dist^2 with bit=1 - min with bit=0)
    over noise_var; positive values favour bit 0."""
    nv = float(noise_var)
    if not nv > 0.0:
        raise ConfigError(f"noise_var must be positive, got {noise_var}")
    sym = np.ascontiguousarray(np.asarray(symbols, dtype=np.complex128).reshape(-1))
    k = c.bits_per_symbol
    pts = c.points
    labels = np.arange(c.order)
    shifts = np.arange(k - 1, -1, -1)
    bit_of = ((labels[:, None] >> shifts[None, :]) & 1).astype(bool)  # (M, k)
    out = np.empty(sym.size * k, dtype=np.float64)
    for lo in range(0, sym.size, _CHUNK):
        blk = sym[lo : lo + _CHUNK]
        dr = blk.real[:, None] - pts.real[None, :]
        di = blk.imag[:, None] - pts.imag[None, :]
        d2 = dr * dr + di * di  # (B, M)
        llr = np.empty((blk.size, k), dtype=np.float64)
        for j in range(k):
            ones = bit_of[:, j]
            llr[:, j] = d2[:, ones].min(axis=1) - d2[:, ~ones].min(axis=1)
        out[lo * k : lo * k + blk.size * k] = (llr / nv).reshape(-1)
    return out
