"""OFDM subcarrier planning, modulation, and demodulation.

A grid splits the FFT bins (viewed with DC at the center) into a
low-side guard of G bins, an occupied band, and a high-side guard of
G - 1 bins, with the DC bin inside the occupied band always null:

    G = (n_fft - n_used - n_pilot) / 2

Pilots sit at fixed, symmetric positions inside the occupied band and
carry (1+1j)/sqrt(2); an ideal receiver discards them.  All
transforms are unitary (1/sqrt(N) each direction) so time- and
frequency-domain powers agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, AlignmentError


def _require_pow2(n: int, what: str) -> None:
    if n < 2 or n & (n - 1):
        raise ConfigError(f"{what} must be a power of two >= 2, got {n}")


@dataclass(frozen=True, eq=False)
class OfdmGrid:
    n_fft: int
    n_used: int
    n_pilot: int
    guard_lo: int
    guard_hi: int
    dc_null: int
    cp_len: int
    data_indices: np.ndarray   # centered bin positions, DC at n_fft/2
    pilot_indices: np.ndarray
    pilot_value: complex

    @property
    def symbol_len(self) -> int:
        return self.n_fft + self.cp_len


def plan_grid(n_fft: int, n_used: int, n_pilot: int, cp_len: int = 16) -> OfdmGrid:
    """Plan the bin layout; the two guards differ by exactly one bin."""
    n_fft, n_used, n_pilot, cp_len = map(int, (n_fft, n_used, n_pilot, cp_len))
    _require_pow2(n_fft, "n_fft")
    if n_used < 1 or n_pilot < 0:
        raise ConfigError("need n_used >= 1 and n_pilot >= 0")
    if cp_len < 0 or cp_len > n_fft:
        raise ConfigError(f"cp_len must be in [0, n_fft], got {cp_len}")
    spare = n_fft - n_used - n_pilot
    if spare % 2:
        raise ConfigError(
            f"n_fft - n_used - n_pilot = {spare} must be even (guard split)"
        )
    guard_lo = spare // 2
    guard_hi = guard_lo - 1
    if guard_hi < 0:
        raise ConfigError("grid leaves no room for guards and the DC null")
    dc = n_fft // 2
    occupied = [b for b in range(guard_lo, n_fft - guard_lo + 1) if b != dc]
    assert len(occupied) == n_used + n_pilot
    span = len(occupied)
    pilot_slots = sorted({(2 * j + 1) * span // (2 * n_pilot) for j in range(n_pilot)})
    if len(pilot_slots) != n_pilot:
        raise ConfigError(f"cannot place {n_pilot} distinct pilots in {span} bins")
    pilot_idx = np.array([occupied[s] for s in pilot_slots], dtype=np.int64)
    data_idx = np.array(
        [b for i, b in enumerate(occupied) if i not in set(pilot_slots)],
        dtype=np.int64,
    )
    return OfdmGrid(
        n_fft=n_fft,
        n_used=n_used,
        n_pilot=n_pilot,
        guard_lo=guard_lo,
        guard_hi=guard_hi,
        dc_null=1,
        cp_len=cp_len,
        data_indices=data_idx,
        pilot_indices=pilot_idx,
        pilot_value=complex(1.0, 1.0) / np.sqrt(2.0),
    )


def fft(samples, direction: str = "forward") -> np.ndarray:
    """Unitary DFT; ``direction`` is "forward" or "inverse"."""
    x = np.asarray(samples, dtype=np.complex128)
    n = x.shape[-1]
    _require_pow2(n, "transform length")
    if direction == "forward":
        return np.fft.fft(x, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft(x, norm="ortho")
    raise ConfigError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def ofdm_modulate(symbols, grid: OfdmGrid) -> np.ndarray:
    """Data symbols -> cyclic-prefixed time-domain sample stream."""
    sym = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    if sym.size == 0 or sym.size % grid.n_used:
        raise AlignmentError(
            f"symbol count {sym.size} not a positive multiple of {grid.n_used}"
        )
    n_blocks = sym.size // grid.n_used
    freq = np.zeros((n_blocks, grid.n_fft), dtype=np.complex128)
    freq[:, grid.data_indices] = sym.reshape(n_blocks, grid.n_used)
    freq[:, grid.pilot_indices] = grid.pilot_value
    time = np.fft.ifft(np.fft.ifftshift(freq, axes=1), norm="ortho", axis=1)
    if grid.cp_len:
        time = np.concatenate([time[:, -grid.cp_len :], time], axis=1)
    return time.reshape(-1)


def ofdm_demodulate(samples, grid: OfdmGrid) -> np.ndarray:
    """Strip prefixes, transform, and return data bins in planning order."""
    x = np.asarray(samples, dtype=np.complex128).reshape(-1)
    blk = grid.symbol_len
    if x.size == 0 or x.size % blk:
        raise AlignmentError(
            f"sample count {x.size} not a positive multiple of {blk}"
        )
    time = x.reshape(-1, blk)[:, grid.cp_len :]
    freq = np.fft.fftshift(np.fft.fft(time, norm="ortho", axis=1), axes=1)
    return freq[:, grid.data_indices].reshape(-1)
