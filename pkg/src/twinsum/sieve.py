"""Segmented, bit-packed prime sieve streaming primes and twin pairs.

Segments cover odd integers only (2 is handled separately); each segment is
an independent work unit, so ranges up to 2**64 stream in bounded memory and
can be sieved by several workers while the consumer still observes segments
in ascending order.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Callable, Iterable, Iterator, NamedTuple

import numpy as np

from .backend import get_kernel

DEFAULT_SEGMENT_ODDS = 1 << 18  # odd entries per segment; ~256 KiB of flags


class InsufficientBaseError(ValueError):
    """The base primes do not cover the square root of the requested range."""


class TwinPair(NamedTuple):
    """A twin-prime pair identified by its lower member p (p and p+2 prime)."""

    p: int

    @property
    def upper(self) -> int:
        return self.p + 2


@dataclass(frozen=True)
class BasePrimes:
    """All primes <= limit, ascending, as a uint64 array."""

    limit: int
    primes: np.ndarray

    def odd_primes(self) -> np.ndarray:
        """The base primes without 2, as consumed by the segment kernels."""
        if self.primes.size and self.primes[0] == 2:
            return self.primes[1:]
        return self.primes


@dataclass(frozen=True)
class Segment:
    """Primality flags for the odd integers in [lo, hi), packed LSB-first.

    Bit k of ``bits`` corresponds to the odd value lo + 2k.
    """

    lo: int
    hi: int
    bits: bytes

    @property
    def n_odd(self) -> int:
        return max(0, (self.hi - self.lo + 1) // 2)

    def odd_flags(self) -> np.ndarray:
        """Unpacked boolean flags, one per odd value in [lo, hi)."""
        packed = np.frombuffer(self.bits, dtype=np.uint8)
        return np.unpackbits(packed, count=self.n_odd, bitorder="little").astype(bool)

    def primes(self) -> np.ndarray:
        """The primes marked in this segment, ascending, as uint64."""
        idx = np.flatnonzero(self.odd_flags()).astype(np.uint64)
        return np.uint64(self.lo) + np.uint64(2) * idx


def small_primes(limit: int) -> BasePrimes:
    """Sieve of Eratosthenes over the full range [2, limit]."""
    if limit < 2:
        raise ValueError(f"prime limit must be >= 2, got {limit}")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return BasePrimes(limit=limit, primes=np.flatnonzero(flags).astype(np.uint64))


def sieve_segment(lo: int, hi: int, base: BasePrimes, backend: str | None = None) -> Segment:
    """Sieve the odd integers in [lo, hi); an even lo is bumped to lo+1.

    Requires base.limit**2 >= hi so every composite in range has a base
    factor.
    """
    if lo < 3:
        raise ValueError(f"segment must start at 3 or above, got lo={lo}")
    if hi < lo:
        raise ValueError(f"segment bounds out of order: [{lo}, {hi})")
    if base.limit * base.limit < hi:
        raise InsufficientBaseError(
            f"base primes up to {base.limit} cannot sieve up to {hi}; "
            f"need limit**2 >= {hi}"
        )
    start = lo if lo % 2 else lo + 1
    n_odd = max(0, (hi - start + 1) // 2)
    kern = get_kernel(backend)
    flags = kern.sieve_odd_flags(start, n_odd, base.odd_primes())
    bits = np.packbits(flags, bitorder="little").tobytes()
    return Segment(lo=start, hi=hi, bits=bits)


def _auto_base(stop: int) -> BasePrimes:
    # limit = isqrt(stop+1)+1 gives limit**2 >= stop+2, covering the one-odd
    # overlap read past a twin range
    return small_primes(max(2, math.isqrt(stop + 1) + 1))


def _segment_spans(start: int, stop: int, segment_odds: int) -> Iterator[tuple[int, int]]:
    """Split the odd values of [start, stop) into (lo, n_odd) spans."""
    lo = start if start % 2 else start + 1
    while lo < stop:
        n = min(segment_odds, (stop - lo + 1) // 2)
        yield lo, n
        lo += 2 * n


def _ordered_map(fn: Callable, specs: Iterable, workers: int) -> Iterator:
    """Map fn over specs, preserving order; parallel when workers > 1."""
    if workers <= 1:
        for spec in specs:
            yield fn(spec)
        return
    it = iter(specs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending = deque(pool.submit(fn, spec) for spec in islice(it, workers + 2))
        while pending:
            done = pending.popleft()
            for spec in islice(it, 1):
                pending.append(pool.submit(fn, spec))
            yield done.result()


def iter_prime_arrays(
    lo: int,
    hi: int,
    base: BasePrimes | None = None,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
    backend: str | None = None,
) -> Iterator[np.ndarray]:
    """Yield uint64 arrays that together hold every prime in [lo, hi), ascending."""
    if hi <= lo:
        return
    if base is None:
        base = _auto_base(hi - 1) if hi > 2 else small_primes(2)
    elif base.limit * base.limit < hi:
        raise InsufficientBaseError(
            f"base primes up to {base.limit} cannot sieve up to {hi}"
        )
    if lo <= 2 < hi:
        yield np.array([2], dtype=np.uint64)
    start = max(lo, 3)
    kern = get_kernel(backend)
    odd_base = base.odd_primes()

    def job(spec: tuple[int, int]) -> np.ndarray:
        seg_lo, n = spec
        flags = kern.sieve_odd_flags(seg_lo, n, odd_base)
        idx = np.flatnonzero(flags).astype(np.uint64)
        return np.uint64(seg_lo) + np.uint64(2) * idx

    yield from _ordered_map(job, _segment_spans(start, hi, segment_odds), workers)


def primes_in_range(
    lo: int,
    hi: int,
    base: BasePrimes | None = None,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
) -> np.ndarray:
    """All primes in [lo, hi) as one array; convenience for modest ranges."""
    chunks = list(iter_prime_arrays(lo, hi, base, segment_odds=segment_odds, workers=workers))
    if not chunks:
        return np.array([], dtype=np.uint64)
    return np.concatenate(chunks)


def iter_twin_arrays(
    lo: int,
    hi: int,
    base: BasePrimes | None = None,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
    backend: str | None = None,
) -> Iterator[np.ndarray]:
    """Yield uint64 arrays of twin lower members p in [lo, hi), ascending.

    Each segment is sieved with one extra odd entry so a pair whose partner
    falls in the following segment is still emitted exactly once.
    """
    start = max(lo, 3)
    if hi <= start:
        return
    if base is None:
        base = _auto_base(hi)
    elif base.limit * base.limit < hi + 2:
        raise InsufficientBaseError(
            f"base primes up to {base.limit} cannot resolve partners up to {hi + 1}; "
            f"need limit**2 >= {hi + 2}"
        )
    kern = get_kernel(backend)
    odd_base = base.odd_primes()

    def job(spec: tuple[int, int]) -> np.ndarray:
        seg_lo, n = spec
        flags = kern.sieve_odd_flags(seg_lo, n + 1, odd_base)
        idx = np.flatnonzero(flags[:-1] & flags[1:]).astype(np.uint64)
        return np.uint64(seg_lo) + np.uint64(2) * idx

    yield from _ordered_map(job, _segment_spans(start, hi, segment_odds), workers)


def twin_pairs(
    lo: int,
    hi: int,
    base: BasePrimes | None = None,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
) -> Iterator[TwinPair]:
    """Stream TwinPair records with lower member in [lo, hi), ascending."""
    for ps in iter_twin_arrays(lo, hi, base, segment_odds=segment_odds, workers=workers):
        for p in ps.tolist():
            yield TwinPair(p)


def count_twins(
    n: int,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
) -> int:
    """Number of twin lower members p < n."""
    if n < 3:
        raise ValueError(f"count_twins needs n >= 3, got {n}")
    return sum(
        ps.size for ps in iter_twin_arrays(3, n, segment_odds=segment_odds, workers=workers)
    )
