#!/usr/bin/env python3
"""Time the compiled kernels against the NumPy fallback.

Runs each kernel on identical inputs through both backends, checks they
agree, and prints per-op timings with the speedup factor. Usage:

    python3 benchmarks/bench_kernels.py [--repeats 200] [--size 512]

The compiled extension must be importable for a two-column comparison;
otherwise only the pure timings print.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from forgeline.kernels import pure

try:
    from forgeline.kernels import _fast as compiled
except ImportError:  # pragma: no cover - depends on the build
    compiled = None


def _inputs(size: int, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0, 2 * np.pi, 12))
    xs = size / 2 + (size / 3) * np.cos(angles)
    ys = size / 2 + (size / 3) * np.sin(angles)
    bits = (rng.random((size, size)) < 0.35).astype(np.uint8)
    runs = pure.rle_encode(bits)
    pred = (rng.random((size, size)) < 0.5).astype(np.uint8)
    gt = (rng.random((size, size)) < 0.5).astype(np.uint8)
    tokens_a = rng.integers(0, 50, 1000).astype(np.int64)
    tokens_b = rng.integers(0, 50, 1000).astype(np.int64)
    return {
        "fill_polygon": (xs, ys, size, size),
        "rle_encode": (bits,),
        "rle_decode": (runs, bits.size),
        "confusion_counts": (pred, gt),
        "lcs_length": (tokens_a, tokens_b),
    }


def _check_agreement(args_by_op: dict) -> None:
    for op, call_args in args_by_op.items():
        a = getattr(pure, op)(*call_args)
        b = getattr(compiled, op)(*call_args)
        if isinstance(a, np.ndarray):
            np.testing.assert_array_equal(a, b)
        else:
            assert tuple(np.atleast_1d(a)) == tuple(np.atleast_1d(b)), op


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200,
                        help="timing iterations per op (default 200)")
    parser.add_argument("--size", type=int, default=512,
                        help="square canvas / mask edge length (default 512)")
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args()

    args_by_op = _inputs(opts.size, opts.seed)
    if compiled is not None:
        _check_agreement(args_by_op)
        print(f"backends agree on all ops at size {opts.size}\n")
        header = f"{'op':18s} {'pure (ms)':>12s} {'compiled (ms)':>14s} {'speedup':>9s}"
    else:
        print("compiled extension not importable; timing the fallback only\n")
        header = f"{'op':18s} {'pure (ms)':>12s}"
    print(header)
    print("-" * len(header))

    for op, call_args in args_by_op.items():
        pure_fn = getattr(pure, op)
        t_pure = timeit.timeit(lambda: pure_fn(*call_args), number=opts.repeats)
        ms_pure = 1000.0 * t_pure / opts.repeats
        if compiled is None:
            print(f"{op:18s} {ms_pure:12.3f}")
            continue
        fast_fn = getattr(compiled, op)
        t_fast = timeit.timeit(lambda: fast_fn(*call_args), number=opts.repeats)
        ms_fast = 1000.0 * t_fast / opts.repeats
        ratio = ms_pure / ms_fast if ms_fast > 0 else float("inf")
        print(f"{op:18s} {ms_pure:12.3f} {ms_fast:14.3f} {ratio:8.1f}x")


if __name__ == "__main__":
    main()
