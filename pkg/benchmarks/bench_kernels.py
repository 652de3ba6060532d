#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--words N] [--seed S]
"""

import argparse
import time

import numpy as np

from positres._kernels import _pykernels


def load_backends():
    backends = [("python", _pykernels)]
    try:
        from positres._kernels import _cykernels

        backends.insert(0, ("cython", _cykernels))
    except ImportError:
        print("compiled backend not available; benchmarking the fallback only")
    return backends


def bench(label, fn, n_items):
    t0 = time.perf_counter()
    fn()
    elapsed = time.perf_counter() - t0
    rate = n_items / elapsed
    print(f"  {label:24s} {elapsed:8.3f}s  {rate:12,.0f} items/s")
    return elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--words", type=int, default=50_000, help="corpus size for the sweep benchmark")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    sweep_words = rng.integers(0, 1 << 32, args.words, dtype=np.uint32)
    roundtrip_words = rng.integers(0, 1 << 32, 20 * args.words, dtype=np.uint32)
    draws = 100 * args.words

    results = {}
    for name, backend in load_backends():
        print(f"{name} backend:")
        results[name, "sweep"] = bench(
            f"sweep_chunk ({args.words:,} words)",
            lambda b=backend: b.sweep_chunk(sweep_words, 0, True, args.seed, 1),
            args.words,
        )
        results[name, "roundtrip"] = bench(
            f"roundtrip ({len(roundtrip_words):,} words)",
            lambda b=backend: b.roundtrip_failures(roundtrip_words),
            len(roundtrip_words),
        )
        results[name, "second_bit"] = bench(
            f"second_bit ({draws:,} draws)",
            lambda b=backend: b.second_bit_histogram(args.seed, 7, draws),
            draws,
        )

    if ("cython", "sweep") in results:
        print("speedup (cython over python):")
        for key in ("sweep", "roundtrip", "second_bit"):
            ratio = results["python", key] / results["cython", key]
            print(f"  {key:24s} {ratio:6.1f}x")


if __name__ == "__main__":
    main()
