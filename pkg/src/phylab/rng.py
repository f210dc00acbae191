"""Deterministic counter-based random streams.

Every stochastic quantity in the toolkit (payload bits, noise samples)
is a pure function of a 64-bit seed and a counter, so identical seeds
reproduce identical streams on any machine, any thread count, and both
compute backends.

Word k of a stream is the SplitMix64 finalizer applied to
``seed + (k + 1) * GOLDEN`` (all arithmetic mod 2**64):

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Uniforms take the top 53 bits of a word; ``uniform_open`` maps into
(0, 1] so it is safe under ``log``.  Gaussians come from the Box-Muller
transform: words (2i, 2i+1) produce the pair

    r  = sqrt(-2 ln u1),  z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2).

Sub-streams for different purposes are derived by remixing the seed
with a small tag, so e.g. payload bits and noise never share words.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)

# purpose tags for sub-stream derivation
TAG_BITS = 0x42495453  # payload bit generator
TAG_NOISE = 0x4E4F4953  # channel noise generator


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a python int, returns a python int."""
    mask = 0xFFFFFFFFFFFFFFFF
    z &= mask
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & mask
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & mask
    z ^= z >> 31
    return z


def derive_seed(master_seed: int, *indices: int) -> int:
    """Mix a master seed with integer indices into an independent seed.

    Successive finalizer applications keep distinct index tuples on
    distinct streams; used for (point_index, shard_index) trial seeds.
    """
    s = mix64(master_seed)
    for ix in indices:
        s = mix64(s ^ mix64(0x470E5D2F ^ ix))
    return s


def substream(seed: int, tag: int) -> int:
    """Seed for an independent purpose-tagged stream."""
    return mix64(seed ^ mix64(tag))


def words(seed: int, count: int, start: int = 0) -> np.ndarray:
    """``count`` raw 64-bit words starting at counter ``start``."""
    if count < 0:
        raise ValueError("word count must be nonnegative")
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * GOLDEN) & _MASK64
    z ^= z >> np.uint64(30)
    z = (z * _MIX1) & _MASK64
    z ^= z >> np.uint64(27)
    z = (z * _MIX2) & _MASK64
    z ^= z >> np.uint64(31)
    return z


def uniform_open(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Uniforms in (0, 1], safe as a log argument."""
    w = words(seed, count, start)
    return ((w >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def uniform_halfopen(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Uniforms in [0, 1)."""
    w = words(seed, count, start)
    return (w >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussians(seed: int, count: int) -> np.ndarray:
    """Standard normal samples via Box-Muller, two per word pair."""
    if count < 0:
        raise ValueError("sample count must be nonnegative")
    pairs = (count + 1) // 2
    u1 = uniform_open(seed, pairs, start=0)
    u2 = uniform_halfopen(seed, pairs, start=pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * np.pi) * u2
    out = np.empty(2 * pairs, dtype=np.float64)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def complex_gaussians(seed: int, count: int) -> np.ndarray:
    """Unit-variance circularly-symmetric complex normals.

    Real and imaginary parts each carry variance 1/2.
    """
    g = gaussians(seed, 2 * count)
    z = np.empty(count, dtype=np.complex128)
    z.real = g[0::2]
    z.imag = g[1::2]
    return z * np.sqrt(0.5)


def bits(seed: int, count: int) -> np.ndarray:
    """Equiprobable bits, 64 per word, MSB first within each word."""
    if count < 0:
        raise ValueError("bit count must be nonnegative")
    nwords = (count + 63) // 64
    w = words(seed, nwords)
    b = np.unpackbits(w.view(np.uint8).reshape(-1, 8)[:, ::-1], axis=1)
    return b.reshape(-1)[:count]
