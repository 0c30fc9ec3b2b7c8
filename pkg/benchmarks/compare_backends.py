#!/usr/bin/env python3
"""Time the compiled kernel against the pure-Python fallback.

Runs the full sieve-and-accumulate pipeline at a few schedule sizes plus the
two kernels in isolation, and checks that the backends agree to the last bit.

    python benchmarks/compare_backends.py [--max-exp 26]
"""

import argparse
import time

import numpy as np

from twinsum.accumulate import Schedule, run
from twinsum.backend import available_backends, get_kernel
from twinsum.sieve import iter_twin_arrays, small_primes


def time_pipeline(end_exp: int, backend: str) -> tuple[float, list]:
    started = time.perf_counter()
    checkpoints = run(Schedule(min(end_exp, 22), end_exp), backend=backend)
    return time.perf_counter() - started, checkpoints


def time_kernels(backend: str) -> tuple[float, float]:
    kern = get_kernel(backend)
    base = small_primes(1 << 16).odd_primes()
    started = time.perf_counter()
    for _ in range(8):
        kern.sieve_odd_flags(3, 1 << 18, base)
    sieve_s = (time.perf_counter() - started) / 8

    ps = np.concatenate(list(iter_twin_arrays(3, 1 << 24)))
    started = time.perf_counter()
    kern.log_weighted_sum(ps, 0.0, 0.0)
    accumulate_s = time.perf_counter() - started
    return sieve_s, accumulate_s


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-exp", type=int, default=26,
                        help="largest pipeline endpoint to time (default 26)")
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("warning: compiled kernel not built; timing the fallback only")

    print(f"{'pipeline':>24} " + " ".join(f"{b:>12}" for b in backends) + "  identical")
    for end_exp in range(18, args.max_exp + 1, 2):
        times, runs = [], []
        for backend in backends:
            elapsed, checkpoints = time_pipeline(end_exp, backend)
            times.append(elapsed)
            runs.append(checkpoints)
        same = all(
            a.n == b.n and a.value == b.value and a.compensation == b.compensation
            for a, b in zip(runs[0], runs[-1])
        )
        cells = " ".join(f"{t:>11.3f}s" for t in times)
        print(f"{'run to 2^' + str(end_exp):>24} {cells}  {same}")

    print(f"\n{'kernel':>24} " + " ".join(f"{b:>12}" for b in backends))
    rows = [time_kernels(b) for b in backends]
    for label, idx in (("sieve 2^18 odds", 0), ("accumulate pi2(2^24)", 1)):
        cells = " ".join(f"{r[idx]:>11.4f}s" for r in rows)
        print(f"{label:>24} {cells}")

    if len(backends) == 2:
        full = [time_pipeline(args.max_exp, b)[0] for b in backends]
        print(f"\npipeline speedup at 2^{args.max_exp}: {full[1] / full[0]:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
