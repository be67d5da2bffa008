"""Numba kernel backend.

Scalar loops under @njit; the default backend when numba imports.  The
integer-domain functions (words, digits, counts, fixed-point sums) are
bit-identical to numpy_impl by construction and by test; only the float
reduction khinchin_partial may differ in the last ulps (Kahan here,
chunked pairwise there).

All Philox arithmetic stays in np.uint64 locals; constants are uint64
module globals so no operation ever promotes to a float.  Stats batches
are capped at 2^20 so the 2^62-unit spill accumulation cannot overflow.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..rng import PHILOX_M0, PHILOX_M1, PHILOX_W0, PHILOX_W1

BACKEND_NAME = "numba"
MAX_BATCH = 1 << 20

_U = np.uint64
_M0 = _U(PHILOX_M0)
_M1 = _U(PHILOX_M1)
_W0 = _U(PHILOX_W0)
_W1 = _U(PHILOX_W1)
_MASK32 = _U(0xFFFFFFFF)
_SH32 = _U(32)
_TOP = _U(1 << 63)
_U0 = _U(0)
_MASK62 = np.int64((1 << 62) - 1)
_LIM62 = np.int64(1 << 62)
_SH62 = _U(62)


@njit(cache=True, inline="always")
def _mulhi(a, b):
    a_lo = a & _MASK32
    a_hi = a >> _SH32
    b_lo = b & _MASK32
    b_hi = b >> _SH32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    cross = (lo_lo >> _SH32) + (hi_lo & _MASK32) + a_lo * b_hi
    return a_hi * b_hi + (hi_lo >> _SH32) + (cross >> _SH32)


@njit(cache=True, inline="always")
def _philox_block(x0, x1, x2, x3, k0, k1):
    for _ in range(10):
        p0_hi = _mulhi(x0, _M0)
        p0_lo = x0 * _M0
        p1_hi = _mulhi(x2, _M1)
        p1_lo = x2 * _M1
        x0 = p1_hi ^ x1 ^ k0
        x1 = p1_lo
        nx2 = p0_hi ^ x3 ^ k1
        x3 = p0_lo
        x2 = nx2
        k0 = k0 + _W0
        k1 = k1 + _W1
    return x0, x1, x2, x3


@njit(cache=True)
def _stream_word0(seed, idx, tag):
    n = idx.shape[0]
    out = np.empty(n, dtype=np.uint64)
    for i in range(n):
        w0, _, _, _ = _philox_block(_U0, idx[i], tag, _U0, seed, _U0)
        out[i] = w0
    return out


def stream_word0(seed: int, idx: np.ndarray, tag: int) -> np.ndarray:
    """Chunk 0 of each element's substream: word 0 of block (0, idx, tag, 0)."""
    return _stream_word0(_U(seed), np.ascontiguousarray(idx, dtype=np.uint64),
                         _U(tag))


@njit(cache=True)
def _stream_blocks(seed, block_lo, nblocks, tag, element):
    out = np.empty(4 * nblocks, dtype=np.uint64)
    for i in range(nblocks):
        w0, w1, w2, w3 = _philox_block(
            block_lo + _U(i), element, tag, _U0, seed, _U0
        )
        out[4 * i] = w0
        out[4 * i + 1] = w1
        out[4 * i + 2] = w2
        out[4 * i + 3] = w3
    return out


def stream_blocks(seed: int, block_lo: int, nblocks: int, tag: int,
                  element: int = 0) -> np.ndarray:
    """All four words of blocks (block_lo+i, element, tag, 0), interleaved."""
    return _stream_blocks(_U(seed), _U(block_lo), nblocks, _U(tag), _U(element))


@njit(cache=True)
def _map_words(words, yes_s, amb_s, amb_ok):
    n = words.shape[0]
    imax = yes_s.shape[0]
    digits = np.empty(n, dtype=np.int64)
    slow = np.zeros(n, dtype=np.bool_)
    for j in range(n):
        u = np.int64(words[j] ^ _TOP)
        d = 0
        for i in range(1, imax + 1):
            if u >= yes_s[i - 1]:
                d = i
                break
            if amb_ok[i - 1] != 0 and u == amb_s[i - 1]:
                break  # boundary word: one chunk cannot decide depth i
        if d == 0:
            digits[j] = 0
            slow[j] = True
        else:
            digits[j] = d
    return digits, slow


def map_words_to_digits(words: np.ndarray, yes_s: np.ndarray,
                        amb_s: np.ndarray, amb_ok: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Geometric digits from uniform words; see numpy_impl for the contract."""
    if words.shape[0] > MAX_BATCH:
        raise ValueError(f"batch of {words.shape[0]} exceeds {MAX_BATCH}")
    return _map_words(words, yes_s, amb_s, amb_ok)


@njit(cache=True)
def _digit_stats(digits, l48, tmax):
    counts = np.zeros(tmax + 2, dtype=np.int64)
    s_hi = np.int64(0)
    s_lo = np.int64(0)
    q_hi = np.int64(0)
    q_lo = np.int64(0)
    for j in range(digits.shape[0]):
        d = digits[j]
        if d == 0:
            continue
        if d > tmax:
            counts[tmax + 1] += 1
            continue
        counts[d] += 1
        lv = l48[d]
        s_lo += lv
        if s_lo >= _LIM62:
            s_hi += s_lo >> 62
            s_lo &= _MASK62
        ul = _U(lv)
        hi64 = _mulhi(ul, ul)
        lo64 = ul * ul
        q_hi += np.int64(hi64 << np.uint64(2)) + np.int64(lo64 >> _SH62)
        q_lo += np.int64(lo64) & _MASK62
        if q_lo >= _LIM62:
            q_hi += q_lo >> 62
            q_lo &= _MASK62
    return counts, s_hi, s_lo, q_hi, q_lo


def digit_stats(digits: np.ndarray, l48: np.ndarray, tmax: int
                ) -> tuple[np.ndarray, int, int]:
    """Counts plus exact fixed-point sums; see numpy_impl for the contract."""
    if digits.shape[0] > MAX_BATCH:
        raise ValueError(f"batch of {digits.shape[0]} exceeds {MAX_BATCH}")
    counts, s_hi, s_lo, q_hi, q_lo = _digit_stats(digits, l48, tmax)
    return counts, (int(s_hi) << 62) + int(s_lo), (int(q_hi) << 62) + int(q_lo)


@njit(cache=True)
def _bitstream(words, carry):
    n = words.shape[0]
    out = np.empty(64 * n, dtype=np.int64)
    k = 0
    run = carry
    for j in range(n):
        w = words[j]
        for bit in range(64):
            if (w >> _U(bit)) & _U(1):
                out[k] = run + 1
                k += 1
                run = 0
            else:
                run += 1
    return out[:k], run


def bitstream_digits(words: np.ndarray, carry: int
                     ) -> tuple[np.ndarray, int]:
    """Run lengths between 1 bits, LSB-first; see numpy_impl."""
    if words.shape[0] > MAX_BATCH:
        raise ValueError("batch too large")
    digits, run = _bitstream(words, carry)
    return digits, int(run)


@njit(cache=True)
def _khinchin_partial(i_start, i_end):
    s = 0.0
    c = 0.0
    for i in range(i_start, i_end):
        fi = float(i)
        t = math.log(fi) * math.log1p(1.0 / (fi * (fi + 2.0)))
        y = t - c
        tt = s + y
        c = (tt - s) - y
        s = tt
    return s


def khinchin_partial(i_start: int, i_end: int) -> float:
    """Kahan-compensated sum of log(i) * log1p(1/(i(i+2)))."""
    return float(_khinchin_partial(i_start, i_end))
