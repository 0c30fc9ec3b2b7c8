"""Pure-Python kernels: numpy strided marking plus a scalar compensated loop.

The accumulation loop deliberately mirrors the compiled kernel operation for
operation so both backends produce bit-identical sums.
"""

from __future__ import annotations

import math

import numpy as np


def sieve_odd_flags(lo: int, n_odd: int, primes: np.ndarray) -> np.ndarray:
    """Flags over the odd values lo, lo+2, ...: 1 where no base prime divides.

    ``lo`` must be odd and >= 3; ``primes`` holds the odd base primes in
    ascending order. A flagged entry is prime provided the base covers
    sqrt(lo + 2*n_odd).
    """
    flags = np.ones(n_odd, dtype=np.uint8)
    hi = lo + 2 * n_odd
    for p in primes.tolist():
        pp = p * p
        if pp >= hi:
            break
        if pp >= lo:
            start = pp
        else:
            start = lo + (-lo) % p
            if start % 2 == 0:
                start += p
        if start < hi:
            # consecutive odd multiples of p are 2p apart: index stride p
            flags[(start - lo) >> 1 :: p] = 0
    return flags


def log_weighted_sum(ps: np.ndarray, value: float, compensation: float) -> tuple[float, float]:
    """Advance a Neumaier-compensated sum by log(p)*log(p+2) for each p."""
    log = math.log
    for p in ps.tolist():
        term = log(p) * log(p + 2)
        t = value + term
        if abs(value) >= abs(term):
            compensation += (value - t) + term
        else:
            compensation += (term - t) + value
        value = t
    return value, compensation
