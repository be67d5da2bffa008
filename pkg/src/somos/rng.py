"""Counter-based randomness: Philox4x64-10 plus a 64-bit seed mixer.

Philox is a keyed bijection of a 256-bit counter, so every 64-bit word
of the stream is a pure function of (key, counter): randomness becomes
random access.  This package exploits that heavily; the counter layout

    (chunk, element, stream_tag, 0)

gives each sampled digit (element = digit index) its own independent
substream of chunks (chunk c lives in word c & 3 of block c >> 4 >> ...,
see stream_chunk), so a rare slow-path digit can consume extra words
without shifting anything else.  Different uses of the generator carry
different stream tags.

This module is the scalar reference implementation; the hot paths in
somos._kernels reproduce it word for word (and are tested to).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

PHILOX_M0 = 0xD2E7470EE14C6C93
PHILOX_M1 = 0xCA5A826395121157
PHILOX_W0 = 0x9E3779B97F4A7C15
PHILOX_W1 = 0xBB67AE8584CAA73B

DIGIT_STREAM_TAG = 1
BITSTREAM_TAG = 2

__all__ = [
    "MASK64",
    "DIGIT_STREAM_TAG",
    "BITSTREAM_TAG",
    "philox4x64",
    "mix64",
    "trajectory_seed",
    "stream_chunk",
]


def philox4x64(ctr: tuple[int, int, int, int], key: tuple[int, int],
               rounds: int = 10) -> tuple[int, int, int, int]:
    """One Philox4x64 block: 256-bit counter -> four 64-bit words."""
    x0, x1, x2, x3 = (c & MASK64 for c in ctr)
    k0, k1 = key[0] & MASK64, key[1] & MASK64
    for _ in range(rounds):
        p0 = PHILOX_M0 * x0
        p1 = PHILOX_M1 * x2
        x0, x1, x2, x3 = (
            ((p1 >> 64) ^ x1 ^ k0) & MASK64,
            p1 & MASK64,
            ((p0 >> 64) ^ x3 ^ k1) & MASK64,
            p0 & MASK64,
        )
        k0 = (k0 + PHILOX_W0) & MASK64
        k1 = (k1 + PHILOX_W1) & MASK64
    return x0, x1, x2, x3


def mix64(x: int) -> int:
    """One splitmix64 step: add the golden gamma, then finalize.

    mix64(0) = 0xE220A8397B1DCDAF, the well-known first splitmix64
    output from seed 0.
    """
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trajectory_seed(base_seed: int, index: int) -> int:
    """Per-trajectory key: mix the ensemble seed with the trajectory index.

    XOR would correlate nearby trajectories; the mixer makes the derived
    keys behave as unrelated Philox keys.
    """
    return mix64((base_seed ^ index) & MASK64)


def stream_chunk(seed: int, element: int, chunk: int, tag: int) -> int:
    """64-bit chunk c of the substream owned by (seed, element, tag).

    Chunk c is word c & 3 of the Philox block with counter
    (c >> 2, element, tag, 0) under key (seed, 0).  The hot kernels only
    ever compute chunk 0; deeper chunks feed the exact slow path.
    """
    block = philox4x64((chunk >> 2, element & MASK64, tag, 0), (seed & MASK64, 0))
    return block[chunk & 3]
