"""Reed-Solomon block codes over GF(2^m).

Systematic encoding by generator-polynomial division and bounded
distance decoding via syndromes, Berlekamp-Massey, a Chien root
search, and Forney magnitudes.  Codewords are symbol sequences laid
out message first, parity last; within a symbol, bits pack MSB first.

The field is built from a fixed primitive polynomial per width (the
conventional ones, e.g. x^3 + x + 1 for GF(8)); generator roots start
at alpha^0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, AlignmentError, DecodeFailure

# conventional primitive polynomials, index = field width m
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


@dataclass(frozen=True, eq=False)
class GaloisField:
    m: int
    prim_poly: int
    exp: np.ndarray  # alpha^i for i in [0, 2*(q-1)), doubled for wrap
    log: np.ndarray  # discrete log, log[0] unused

    @property
    def q(self) -> int:
        return 1 << self.m

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero field element")
        if a == 0:
            return 0
        return int(self.exp[self.log[a] - self.log[b] + (self.q - 1)])

    def pow(self, a: int, p: int) -> int:
        if a == 0:
            return 0 if p > 0 else 1
        return int(self.exp[(self.log[a] * p) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.exp[(self.q - 1) - self.log[a]])


def galois_field(m: int, prim_poly: int | None = None) -> GaloisField:
    if m not in PRIMITIVE_POLYS and prim_poly is None:
        raise ConfigError(f"no default primitive polynomial for m={m}")
    if not 2 <= m <= 8:
        raise ConfigError("field width m must be in [2, 8]")
    poly = PRIMITIVE_POLYS[m] if prim_poly is None else int(prim_poly)
    q = 1 << m
    exp = np.zeros(2 * (q - 1), dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & q:
            x ^= poly
    if x != 1:
        raise ConfigError(f"polynomial {poly:#o} is not primitive for m={m}")
    exp[q - 1 :] = exp[: q - 1]
    return GaloisField(m=m, prim_poly=poly, exp=exp, log=log)


def _poly_mul(gf: GaloisField, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] ^= gf.mul(ai, bj)
    return out


def _poly_eval(gf: GaloisField, poly, x: int) -> int:
    # coefficients highest degree first (Horner)
    y = 0
    for c in poly:
        y = gf.mul(y, x) ^ c
    return y


@dataclass(frozen=True, eq=False)
class RsCode:
    field: GaloisField
    n: int
    k: int
    t: int
    generator: tuple[int, ...]  # highest degree first, monic


def rs_code(m: int, n: int, k: int, prim_poly: int | None = None) -> RsCode:
    """Parameter check and generator construction for RS(n, k) symbols
    of m bits; corrects up to t = (n - k) // 2 symbol errors."""
    gf = galois_field(m, prim_poly)
    if n > gf.q - 1:
        raise ConfigError(f"block length {n} exceeds field limit {gf.q - 1}")
    if not 0 < k < n:
        raise ConfigError(f"message length {k} must sit inside (0, {n})")
    if (n - k) % 2:
        raise ConfigError(
            f"parity count n - k must be even for an integer correction "
            f"radius, got {n - k}"
        )
    n_par = n - k
    gen = [1]
    for i in range(n_par):
        gen = _poly_mul(gf, gen, [1, gf.exp[i]])
    return RsCode(field=gf, n=n, k=k, t=n_par // 2, generator=tuple(gen))


def rs_encode(message, code: RsCode) -> np.ndarray:
    """Systematic codeword: message symbols followed by the remainder
    of message * x^(n-k) divided by the generator."""
    msg = np.asarray(message, dtype=np.int64)
    if msg.ndim != 1 or msg.size != code.k:
        raise AlignmentError(
            f"message must hold exactly {code.k} symbols, got {msg.size}"
        )
    gf = code.field
    if msg.size and (msg.min() < 0 or msg.max() >= gf.q):
        raise ConfigError(f"symbols must lie in [0, {gf.q - 1}]")
    n_par = code.n - code.k
    rem = [0] * n_par
    gen = code.generator
    for s in msg:
        feedback = int(s) ^ rem[0]
        rem = rem[1:] + [0]
        if feedback:
            for j in range(n_par):
                rem[j] ^= gf.mul(feedback, gen[j + 1])
    return np.concatenate([msg, np.asarray(rem, dtype=np.int64)])


def _syndromes(code: RsCode, word) -> list[int]:
    gf = code.field
    poly = [int(v) for v in word]  # index 0 = highest degree
    return [_poly_eval(gf, poly, int(gf.exp[i])) for i in range(code.n - code.k)]


def rs_decode(received, code: RsCode) -> tuple[np.ndarray, int]:
    """Correct up to t symbol errors; returns (message, corrected_count).

    Raises DecodeFailure when the received word lies outside every
    decoding sphere (locator degree > t, locator roots missing, or
    residual syndromes after correction).
    """
    word = np.asarray(received, dtype=np.int64)
    if word.ndim != 1 or word.size != code.n:
        raise AlignmentError(
            f"received word must hold exactly {code.n} symbols, got {word.size}"
        )
    gf = code.field
    if word.size and (word.min() < 0 or word.max() >= gf.q):
        raise ConfigError(f"symbols must lie in [0, {gf.q - 1}]")
    synd = _syndromes(code, word)
    if not any(synd):
        return word[: code.k].copy(), 0

    # Berlekamp-Massey, locator coefficients lowest degree first
    loc = [1]
    prev = [1]
    shift = 1
    b = 1
    for i, s in enumerate(synd):
        delta = s
        for j in range(1, len(loc)):
            if j <= i:
                delta ^= gf.mul(loc[j], synd[i - j])
        if delta == 0:
            shift += 1
        elif 2 * (len(loc) - 1) <= i:
            tmp = loc[:]
            scale = gf.div(delta, b)
            loc = loc + [0] * (len(prev) + shift - len(loc))
            for j, c in enumerate(prev):
                loc[j + shift] ^= gf.mul(scale, c)
            prev = tmp
            b = delta
            shift = 1
        else:
            scale = gf.div(delta, b)
            for j, c in enumerate(prev):
                loc[j + shift] ^= gf.mul(scale, c)
            shift += 1
    while loc and loc[-1] == 0:
        loc.pop()
    n_err = len(loc) - 1
    if n_err > code.t:
        raise DecodeFailure(f"{n_err} errors exceed correction radius {code.t}")

    # Chien search: roots of the locator are inverses of error locators
    positions = []
    for pos in range(code.n):
        x_inv = gf.pow(int(gf.exp[code.n - 1 - pos]), gf.q - 2)
        if _poly_eval(gf, loc[::-1], x_inv) == 0:
            positions.append(pos)
    if len(positions) != n_err:
        raise DecodeFailure("error locator roots do not match its degree")

    # Forney magnitudes from the evaluator Omega = S * Lambda mod x^2t
    n_par = code.n - code.k
    omega_full = _poly_mul(gf, synd, loc)  # lowest degree first
    omega = omega_full[:n_par]
    corrected = word.copy()
    count = 0
    for pos in positions:
        x = int(gf.exp[code.n - 1 - pos])
        x_inv = gf.inv(x)
        num = _poly_eval(gf, omega[::-1], x_inv)
        den = 0
        # formal derivative of Lambda keeps odd-power terms only
        for j in range(1, len(loc), 2):
            den ^= gf.mul(loc[j], gf.pow(x_inv, j - 1))
        if den == 0:
            raise DecodeFailure("degenerate locator derivative")
        mag = gf.mul(x, gf.div(num, den))
        if mag:
            corrected[pos] ^= mag
            count += 1
    if any(_syndromes(code, corrected)):
        raise DecodeFailure("syndromes persist after correction")
    return corrected[: code.k], count


def bits_to_symbols(bits, m: int) -> np.ndarray:
    """Pack bits MSB-first into m-bit symbols."""
    b = np.asarray(bits, dtype=np.int64)
    if b.size % m:
        raise AlignmentError(f"bit count {b.size} not divisible by m={m}")
    weights = 1 << np.arange(m - 1, -1, -1)
    return (b.reshape(-1, m) * weights).sum(axis=1)


def symbols_to_bits(symbols, m: int) -> np.ndarray:
    """Unpack m-bit symbols MSB-first."""
    s = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1)
    return ((s[:, None] >> shifts[None, :]) & 1).astype(np.uint8).reshape(-1)
