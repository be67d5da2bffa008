"""Pure-numpy kernel backend.

Vectorized counterparts of the numba kernels; selected by setting
SOMOS_BACKEND=numpy or when numba is unavailable.  Every function here
must produce results identical to numba_impl at the integer level
(digits, counts, fixed-point sums) - only khinchin_partial, a float
reduction, is allowed to differ in the last ulps.

Batches are capped at 2^20 elements so the exact integer accumulations
below stay inside int64 partials; callers chunk above that.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import PHILOX_M0, PHILOX_M1, PHILOX_W0, PHILOX_W1

BACKEND_NAME = "numpy"
MAX_BATCH = 1 << 20

_U = np.uint64
_M0 = _U(PHILOX_M0)
_M1 = _U(PHILOX_M1)
_MASK32 = _U(0xFFFFFFFF)
_SH32 = _U(32)
_TOP = _U(1 << 63)


def _round_keys(key0: int, key1: int) -> tuple[np.ndarray, np.ndarray]:
    k0 = [(key0 + r * PHILOX_W0) % (1 << 64) for r in range(10)]
    k1 = [(key1 + r * PHILOX_W1) % (1 << 64) for r in range(10)]
    return np.array(k0, dtype=np.uint64), np.array(k1, dtype=np.uint64)


def _mulhi(a: np.ndarray, b) -> np.ndarray:
    """High 64 bits of a 64x64 product, by 32-bit limbs."""
    a_lo = a & _MASK32
    a_hi = a >> _SH32
    b_lo = b & _MASK32
    b_hi = b >> _SH32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    lo_hi = a_lo * b_hi
    cross = (lo_lo >> _SH32) + (hi_lo & _MASK32) + lo_hi
    return a_hi * b_hi + (hi_lo >> _SH32) + (cross >> _SH32)


def _philox(x0, x1, x2, x3, key0: int, key1: int):
    """Ten Philox rounds on broadcastable uint64 arrays."""
    k0s, k1s = _round_keys(key0, key1)
    for r in range(10):
        p0_hi = _mulhi(x0, _M0)
        p0_lo = x0 * _M0
        p1_hi = _mulhi(x2, _M1)
        p1_lo = x2 * _M1
        x0, x1, x2, x3 = p1_hi ^ x1 ^ k0s[r], p1_lo, p0_hi ^ x3 ^ k1s[r], p0_lo
    return x0, x1, x2, x3


def stream_word0(seed: int, idx: np.ndarray, tag: int) -> np.ndarray:
    """Chunk 0 of each element's substream: word 0 of block (0, idx, tag, 0)."""
    idx = np.ascontiguousarray(idx, dtype=np.uint64)
    zero = np.zeros_like(idx)
    w0, _, _, _ = _philox(zero, idx, np.full_like(idx, _U(tag)), zero, seed, 0)
    return w0


def stream_blocks(seed: int, block_lo: int, nblocks: int, tag: int,
                  element: int = 0) -> np.ndarray:
    """All four words of blocks (block_lo+i, element, tag, 0), interleaved."""
    c0 = np.arange(block_lo, block_lo + nblocks, dtype=np.uint64)
    ones = np.full(nblocks, _U(element), dtype=np.uint64)
    w0, w1, w2, w3 = _philox(
        c0, ones, np.full(nblocks, _U(tag)), np.zeros(nblocks, np.uint64), seed, 0
    )
    out = np.empty(4 * nblocks, dtype=np.uint64)
    out[0::4], out[1::4], out[2::4], out[3::4] = w0, w1, w2, w3
    return out


def map_words_to_digits(words: np.ndarray, yes_s: np.ndarray,
                        amb_s: np.ndarray, amb_ok: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Geometric digits from uniform words by exact threshold comparison.

    Tables are in the sign-shifted int64 domain (u XOR 2^63 viewed as
    int64 preserves unsigned order) and in depth order: index k holds
    depth k+1.  yes_s is strictly descending, so the digit is
    D = #{thresholds > u} + 1.  A word equal to an ambiguous boundary
    value - possible only at depth D-1, and only where 2^64 mod b^(D-1)
    is nonzero (amb_ok) - or one past the deepest tabled threshold
    cannot be decided by one word: it is flagged slow and left 0 for the
    exact big-integer resolver.
    """
    n = words.shape[0]
    if n > MAX_BATCH:
        raise ValueError(f"batch of {n} exceeds {MAX_BATCH}")
    imax = yes_s.shape[0]
    u_s = (words ^ _TOP).view(np.int64)
    d = imax - np.searchsorted(yes_s[::-1], u_s, side="right") + 1
    slow = d > imax
    cand = np.clip(d - 2, 0, imax - 1)
    slow |= (d >= 2) & amb_ok[cand].astype(bool) & (u_s == amb_s[cand])
    digits = np.where(slow, 0, d).astype(np.int64)
    return digits, slow


def digit_stats(digits: np.ndarray, l48: np.ndarray, tmax: int
                ) -> tuple[np.ndarray, int, int]:
    """Counts plus exact fixed-point sums of L and L^2 over one batch.

    L = l48[digit] is the 2^48-scaled quantized log.  Sums are exact:
    32-bit limb decompositions keep every partial inside int64, and the
    limb totals recombine into Python ints.  Zero digits (slow-path
    sentinels) and digits above tmax contribute nothing here; the
    caller patches them in exactly.
    """
    n = digits.shape[0]
    if n > MAX_BATCH:
        raise ValueError(f"batch of {n} exceeds {MAX_BATCH}")
    live = digits > 0
    counts = np.bincount(
        np.minimum(digits[live], tmax + 1), minlength=tmax + 2
    ).astype(np.int64)
    sel = digits[live & (digits <= tmax)]
    lv = l48[sel]
    sum_fix = int(np.sum(lv & 0xFFFFFFFF)) + (int(np.sum(lv >> 32)) << 32)
    ul = lv.astype(np.uint64)
    sq_hi = _mulhi(ul, ul)
    sq_lo = ul * ul
    sq_fix = (
        (int(np.sum(sq_hi.view(np.int64))) << 64)
        + int(np.sum((sq_lo & _MASK32).view(np.int64)))
        + (int(np.sum((sq_lo >> _SH32).view(np.int64))) << 32)
    )
    return counts, sum_fix, sq_fix


def bitstream_digits(words: np.ndarray, carry: int
                     ) -> tuple[np.ndarray, int]:
    """Run lengths between 1 bits of a word stream, LSB-first per word.

    carry is the number of 0 bits already seen in the current run; the
    updated carry is returned for the next batch, so digit output is
    independent of how the stream was chunked.
    """
    if words.shape[0] > MAX_BATCH:
        raise ValueError("batch too large")
    bits = np.unpackbits(
        np.ascontiguousarray(words, dtype="<u8").view(np.uint8), bitorder="little"
    )
    ones = np.flatnonzero(bits)
    total = bits.shape[0]
    if ones.size == 0:
        return np.empty(0, dtype=np.int64), carry + total
    digits = np.empty(ones.size, dtype=np.int64)
    digits[0] = carry + ones[0] + 1
    digits[1:] = np.diff(ones)
    return digits, int(total - 1 - ones[-1])


def khinchin_partial(i_start: int, i_end: int) -> float:
    """sum of log(i) * log1p(1/(i(i+2))) over i_start <= i < i_end."""
    parts = []
    chunk = 1 << 20
    for lo in range(i_start, i_end, chunk):
        hi = min(i_end, lo + chunk)
        i = np.arange(lo, hi, dtype=np.float64)
        parts.append(float(np.sum(np.log(i) * np.log1p(1.0 / (i * (i + 2.0))))))
    return math.fsum(parts)
