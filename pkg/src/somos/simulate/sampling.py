"""Exact geometric digit sampling driven by counter-mode randomness.

Digit index n of stream (seed, base b) is a pure function of
(seed, n): no generator state, so any slice of a trajectory can be
recomputed independently and ensembles parallelize trivially.

The digit law is P(D = i) = (b-1) * b**-i, realized as
D = min i with U >= b**-i for U uniform on [0, 1).  U is read as an
infinite bit stream (64 bits per counter chunk).  The first chunk
decides D outright unless the word lands exactly on a floor(2^64/b^i)
boundary, in which case a big-integer resolver consumes further chunks
until the comparison is certain.  The fast path is therefore not an
approximation of the law; boundary words are the only ones deferred,
and they are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import ResourceLimitError, UnsupportedBaseError
from ..rng import DIGIT_STREAM_TAG, stream_chunk

__all__ = [
    "LOG_SCALE_BITS",
    "TABLE_MAX_DIGIT",
    "DigitTables",
    "tables_for",
    "quantize_log",
    "resolve_digit_exact",
    "sample_digit_batch",
    "DigitStream",
    "sample_digit",
]

_TWO64 = 1 << 64
_SIGN = 1 << 63

# log-digit values are accumulated as integers in units of 2**-48;
# quantization error per digit is < 2**-49, far below statistical noise
# at any feasible step count, and integer sums are exactly associative.
LOG_SCALE_BITS = 48
LOG_SCALE = 1 << LOG_SCALE_BITS

# digits above this are rare enough (P < 3**-80) that per-digit Python
# handling costs nothing; the kernel buckets them into one overflow slot
TABLE_MAX_DIGIT = 80


def quantize_log(d: int) -> int:
    """log(d) in fixed-point units of 2**-48 (round to nearest)."""
    if d < 1:
        raise ValueError("digit must be >= 1")
    return round(math.log(d) * LOG_SCALE)


@dataclass(frozen=True, eq=False)
class DigitTables:
    """Precomputed threshold and log tables for one base."""

    b: int
    imax: int               # largest i with b**i <= 2**64
    yes_s: np.ndarray       # int64, sign-shifted ceil(2^64 / b^i), i = 1..imax
    amb_s: np.ndarray       # int64, sign-shifted floor(2^64 / b^i)
    amb_ok: np.ndarray      # uint8, 1 where 2^64 % b^i != 0
    l48: np.ndarray         # int64, quantize_log(d) for d = 0..TABLE_MAX_DIGIT
    tmax: int


_TABLE_CACHE: dict[int, DigitTables] = {}


def tables_for(b: int) -> DigitTables:
    if not isinstance(b, int) or b < 2:
        raise UnsupportedBaseError(f"base must be an integer >= 2, got {b!r}")
    cached = _TABLE_CACHE.get(b)
    if cached is not None:
        return cached
    yes, amb, ok = [], [], []
    p = b
    while p <= _TWO64:
        q, r = divmod(_TWO64, p)
        yes.append(q + (1 if r else 0))
        amb.append(q if r else 0)
        ok.append(1 if r else 0)
        p *= b

    def shifted(vals: list[int]) -> np.ndarray:
        return np.array([v - _SIGN for v in vals], dtype=np.int64)

    l48 = np.zeros(TABLE_MAX_DIGIT + 1, dtype=np.int64)
    for d in range(1, TABLE_MAX_DIGIT + 1):
        l48[d] = quantize_log(d)
    tbl = DigitTables(
        b=b,
        imax=len(yes),
        yes_s=shifted(yes),
        amb_s=shifted(amb),
        amb_ok=np.array(ok, dtype=np.uint8),
        l48=l48,
        tmax=TABLE_MAX_DIGIT,
    )
    _TABLE_CACHE[b] = tbl
    return tbl


def resolve_digit_exact(seed: int, element: int, b: int, *,
                        tag: int = DIGIT_STREAM_TAG,
                        max_chunks: int = 64) -> int:
    """Digit of stream element decided by exact big-integer comparison.

    Reads counter chunks of the element's substream until the interval
    [A/S, (A+1)/S) known to contain U lies entirely on one side of the
    next threshold b**-i.  Every extra chunk is needed with probability
    about 2**-64, so two chunks are nearly always enough; the chunk cap
    exists only to turn a (probability ~2**-4000) stall into an error.
    """
    a = stream_chunk(seed, element, 0, tag)
    s = _TWO64
    chunks = 1
    i = 1
    p = b
    while True:
        if a * p >= s:
            return i
        if (a + 1) * p <= s:
            i += 1
            p *= b
            continue
        if chunks >= max_chunks:
            raise ResourceLimitError(
                f"digit undecided after {max_chunks} chunks "
                f"(seed={seed}, element={element}, base={b})"
            )
        a = (a << 64) | stream_chunk(seed, element, chunks, tag)
        s <<= 64
        chunks += 1


def sample_digit_batch(b: int, seed: int, start: int, count: int,
                       impl=None) -> np.ndarray:
    """Digits start..start+count-1 of stream (seed, b), as int64 >= 1."""
    if impl is None:
        impl = _kernels.impl
    if count < 0:
        raise ValueError("count must be >= 0")
    if count > impl.MAX_BATCH:
        raise ValueError(f"batch of {count} exceeds {impl.MAX_BATCH}")
    tbl = tables_for(b)
    idx = np.arange(start, start + count, dtype=np.uint64)
    words = impl.stream_word0(seed, idx, DIGIT_STREAM_TAG)
    digits, slow = impl.map_words_to_digits(
        words, tbl.yes_s, tbl.amb_s, tbl.amb_ok
    )
    if slow.any():
        for j in np.flatnonzero(slow):
            digits[j] = resolve_digit_exact(seed, start + int(j), b)
    return digits


class DigitStream:
    """Sequential reader over one (seed, base) digit stream."""

    def __init__(self, b: int, seed: int, *, impl=None):
        self.tables = tables_for(b)
        self.b = b
        self.seed = int(seed)
        self.position = 0
        self._impl = impl if impl is not None else _kernels.impl

    def draw(self, count: int) -> np.ndarray:
        """Next `count` digits, advancing the stream."""
        out = np.empty(count, dtype=np.int64)
        done = 0
        while done < count:
            n = min(count - done, self._impl.MAX_BATCH)
            out[done:done + n] = sample_digit_batch(
                self.b, self.seed, self.position, n, impl=self._impl
            )
            self.position += n
            done += n
        return out

    def next_digit(self) -> int:
        return int(self.draw(1)[0])


def sample_digit(stream: DigitStream) -> int:
    """One digit with law P(D=i) = (b-1) b**-i, advancing the stream."""
    return stream.next_digit()
