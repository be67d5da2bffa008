"""Counter-mode randomness: the Philox block function is validated
against numpy's independent implementation, the seed mixer against the
published splitmix64 vectors, and the substream layout against direct
block computation."""

import numpy as np
import pytest
from numpy.random import Generator, Philox

from somos.rng import (
    BITSTREAM_TAG,
    DIGIT_STREAM_TAG,
    mix64,
    philox4x64,
    stream_chunk,
    trajectory_seed,
)

GOLDEN = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1


class TestPhilox:
    @pytest.mark.parametrize("key", [0, 1, 987654321, 2 ** 64 - 1])
    def test_matches_numpy_sequential(self, key):
        # numpy's Philox pre-increments: its block n uses counter n+1
        # (key as uint64 array: a plain int list goes through float64)
        gen = Generator(Philox(key=np.array([key, 0], dtype=np.uint64)))
        raw = [int(x) for x in
               gen.integers(0, 1 << 64, size=16, dtype=np.uint64)]
        mine = []
        n = 1
        while len(mine) < 16:
            mine.extend(philox4x64((n, 0, 0, 0), (key, 0)))
            n += 1
        assert mine[:16] == raw

    @pytest.mark.parametrize("ctr,key", [
        ((1, 9, 2, 0), (77, 0)),
        ((12345, 0, 0, 77), (3, 4)),
        ((2 ** 64 - 1, 2 ** 64 - 1, 0, 1), (2 ** 63, 5)),
    ])
    def test_matches_numpy_at_counter(self, ctr, key):
        bg = Philox(key=np.array(key, dtype=np.uint64))
        state = bg.state
        # rewind one block so the pre-increment lands exactly on ctr
        state["state"]["counter"] = np.array(
            [(ctr[0] - 1) & MASK, ctr[1], ctr[2], ctr[3]], dtype=np.uint64
        )
        bg.state = state
        raw = [int(x) for x in
               Generator(bg).integers(0, 1 << 64, size=4, dtype=np.uint64)]
        assert list(philox4x64(ctr, key)) == raw

    def test_word_range_and_determinism(self):
        w = philox4x64((5, 6, 7, 8), (9, 10))
        assert len(w) == 4
        assert all(0 <= x <= MASK for x in w)
        assert w == philox4x64((5, 6, 7, 8), (9, 10))

    def test_rounds_parameter(self):
        full = philox4x64((1, 2, 3, 4), (5, 6), rounds=10)
        short = philox4x64((1, 2, 3, 4), (5, 6), rounds=7)
        assert full != short

    def test_counter_sensitivity(self):
        base = philox4x64((0, 0, 0, 0), (0, 0))
        for pos in range(4):
            ctr = [0, 0, 0, 0]
            ctr[pos] = 1
            assert philox4x64(tuple(ctr), (0, 0)) != base


class TestMix64:
    def test_splitmix64_published_vectors(self):
        # outputs of splitmix64 seeded with 0
        assert mix64(0) == 0xE220A8397B1DCDAF
        assert mix64(GOLDEN) == 0x6E789E6AA1B965F4
        assert mix64((2 * GOLDEN) & MASK) == 0x06C45D188009454F

    def test_bijective_on_samples(self):
        xs = [0, 1, 2, GOLDEN, MASK, 12345678901234567]
        assert len({mix64(x) for x in xs}) == len(xs)


class TestStreams:
    def test_trajectory_seed_distinct(self):
        seeds = {trajectory_seed(42, i) for i in range(20000)}
        assert len(seeds) == 20000

    def test_trajectory_seed_base_sensitivity(self):
        assert trajectory_seed(1, 0) != trajectory_seed(2, 0)

    def test_chunk_layout(self):
        # chunk c of (seed, element, tag) is word c%4 of block c//4
        for c in [0, 1, 2, 3, 4, 5, 8, 1023]:
            block = philox4x64((c >> 2, 9, DIGIT_STREAM_TAG, 0), (31337, 0))
            assert stream_chunk(31337, 9, c, DIGIT_STREAM_TAG) == block[c & 3]

    def test_tags_separate_streams(self):
        a = stream_chunk(1, 0, 0, DIGIT_STREAM_TAG)
        b = stream_chunk(1, 0, 0, BITSTREAM_TAG)
        assert a != b

    def test_elements_separate_streams(self):
        ws = {stream_chunk(7, e, 0, DIGIT_STREAM_TAG) for e in range(100)}
        assert len(ws) == 100
