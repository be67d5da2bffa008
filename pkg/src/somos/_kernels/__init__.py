"""Hot-kernel backend selection.

Two interchangeable implementations of the same kernel API live here:
numba_impl (scalar @njit loops, the default) and numpy_impl (pure
vectorized numpy).  Set SOMOS_BACKEND=numpy or SOMOS_BACKEND=numba to
force one; unset, numba is used when importable, numpy otherwise.

The two backends are bit-identical on every integer-valued kernel
(words, digits, counts, fixed-point sums) - the test suite enforces it -
so switching backends never changes sampled digits or trajectory
statistics, only speed.  The lone float kernel, khinchin_partial, may
differ in the last ulps between backends; its consumers carry a rounding
allowance that covers either.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SOMOS_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"SOMOS_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import numpy_impl as impl
else:
    try:
        from . import numba_impl as impl
    except ImportError:
        if _requested == "numba":
            raise
        from . import numpy_impl as impl

BACKEND = impl.BACKEND_NAME
MAX_BATCH = impl.MAX_BATCH

stream_word0 = impl.stream_word0
stream_blocks = impl.stream_blocks
map_words_to_digits = impl.map_words_to_digits
digit_stats = impl.digit_stats
bitstream_digits = impl.bitstream_digits
khinchin_partial = impl.khinchin_partial

__all__ = [
    "BACKEND",
    "MAX_BATCH",
    "active_backend",
    "implementations",
    "warmup",
    "stream_word0",
    "stream_blocks",
    "map_words_to_digits",
    "digit_stats",
    "bitstream_digits",
    "khinchin_partial",
]


def active_backend() -> str:
    return BACKEND


def implementations() -> dict:
    """All importable backends, keyed by name (for tests and benchmarks)."""
    from . import numpy_impl

    impls = {"numpy": numpy_impl}
    try:
        from . import numba_impl

        impls["numba"] = numba_impl
    except ImportError:
        pass
    return impls


def warmup(backend=None) -> None:
    """Run every kernel once on tiny inputs (pays numba JIT cost upfront)."""
    import numpy as np

    mod = implementations()[backend] if backend else impl
    idx = np.arange(4, dtype=np.uint64)
    words = mod.stream_word0(1, idx, 1)
    mod.stream_blocks(1, 0, 2, 2)
    yes = np.array([1 << 62, 1 << 61], dtype=np.int64)
    amb = np.zeros(2, dtype=np.int64)
    ok = np.zeros(2, dtype=np.uint8)
    digits, _ = mod.map_words_to_digits(words, yes, amb, ok)
    l48 = np.arange(4, dtype=np.int64) << 40
    mod.digit_stats(np.abs(digits) % 3, l48, 2)
    mod.bitstream_digits(words, 0)
    mod.khinchin_partial(2, 64)
