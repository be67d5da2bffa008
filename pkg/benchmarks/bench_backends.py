"""Throughput comparison of the two kernel backends.

Times the three hot paths (counter-stream word generation, word to
digit mapping with exact-threshold classification, and fused digit
statistics) against every available backend and prints digits/second
plus the speedup of each backend over the slowest.

Usage:
    python3 benchmarks/bench_backends.py [--batch N] [--repeats R]
"""

import argparse
import time

import numpy as np

from somos._kernels import MAX_BATCH, implementations
from somos.simulate.sampling import DIGIT_STREAM_TAG, tables_for


def bench(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--batch", type=int, default=MAX_BATCH,
                    help="elements per call (default %(default)s)")
    ap.add_argument("--repeats", type=int, default=7,
                    help="timing repeats, best-of (default %(default)s)")
    ap.add_argument("--base", type=int, default=2)
    args = ap.parse_args()
    if not 1 <= args.batch <= MAX_BATCH:
        ap.error(f"--batch must be in [1, {MAX_BATCH}]")

    impls = implementations()
    tbl = tables_for(args.base)
    seed = 0x5EED
    idx = np.arange(args.batch, dtype=np.uint64)
    words = {}
    rows = []
    for name, impl in impls.items():
        # warm the JIT before timing
        w = impl.stream_word0(seed, idx, DIGIT_STREAM_TAG)
        d = impl.map_words_to_digits(w, tbl.yes_s, tbl.amb_s,
                                     tbl.amb_ok)[0]
        impl.digit_stats(d, tbl.l48, tbl.tmax)
        words[name] = w

        t_stream = bench(
            lambda: impl.stream_word0(seed, idx, DIGIT_STREAM_TAG),
            args.repeats)
        t_map = bench(
            lambda: impl.map_words_to_digits(
                words[name], tbl.yes_s, tbl.amb_s, tbl.amb_ok),
            args.repeats)
        t_stats = bench(
            lambda: impl.digit_stats(d, tbl.l48, tbl.tmax),
            args.repeats)
        rows.append((name, t_stream, t_map, t_stats))

    n = args.batch
    slowest = {
        "stream": max(r[1] for r in rows),
        "map": max(r[2] for r in rows),
        "stats": max(r[3] for r in rows),
    }
    print(f"batch={n}  base={args.base}  best of {args.repeats} runs")
    header = (f"{'backend':<8} {'stream Mw/s':>12} {'map Md/s':>12} "
              f"{'stats Md/s':>12} {'speedup':>8}")
    print(header)
    print("-" * len(header))
    for name, t_stream, t_map, t_stats in rows:
        total = t_stream + t_map + t_stats
        total_slow = sum(slowest.values())
        print(f"{name:<8} {n / t_stream / 1e6:>12.1f} "
              f"{n / t_map / 1e6:>12.1f} {n / t_stats / 1e6:>12.1f} "
              f"{total_slow / total:>7.1f}x")

    # cross-check: both backends must produce identical digits
    names = list(impls)
    if len(names) == 2:
        a, b = names
        da = impls[a].map_words_to_digits(
            words[a], tbl.yes_s, tbl.amb_s, tbl.amb_ok)[0]
        db = impls[b].map_words_to_digits(
            words[b], tbl.yes_s, tbl.amb_s, tbl.amb_ok)[0]
        assert np.array_equal(da, db), "backend outputs diverge"
        print(f"\ncross-check: {a} and {b} digits identical "
              f"on {n} elements")


if __name__ == "__main__":
    main()
