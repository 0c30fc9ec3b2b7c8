"""Twin-prime constant, Brun partial sums, and the 1/log(x) extrapolation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sieve import DEFAULT_SEGMENT_ODDS, iter_prime_arrays, iter_twin_arrays

# 2 * prod_{p>2} (1 - 1/(p-1)^2), the Hardy-Littlewood twin-prime constant,
# correctly rounded well past double precision.
C2_REFERENCE_DIGITS = "1.32032363169373914785562"
C2_REFERENCE = float(C2_REFERENCE_DIGITS)

# Per-pair density constant: twin pairs near u occur with density
# 2*C2_PAIR_DENSITY/log(u)^2, so the tail of the Brun sum (two reciprocals
# per pair) is 4*C2_PAIR_DENSITY/log(x). Feeding the doubled constant into
# the 4c/log(x) correction overshoots the tail by a factor of two and the
# extrapolation no longer settles; see the stability tests.
C2_PAIR_DENSITY = C2_REFERENCE / 2.0


@dataclass(frozen=True)
class C2Estimate:
    """Truncated Euler product for the twin constant with a tail bound."""

    value: float
    tail_bound: float
    prime_limit: int


@dataclass(frozen=True)
class BrunEstimate:
    """Partial Brun sum at x and its extrapolated limit."""

    x: int
    partial: float
    extrapolated: float


def twin_constant(
    prime_limit: int,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
) -> C2Estimate:
    """2 * prod over odd primes p <= prime_limit of (1 - 1/(p-1)^2).

    The product is accumulated in log space (exact per-segment summation of
    log1p terms), so millions of factors lose no precision. The tail bound
    2/(P log P) dominates sum_{p>P} 1/(p-1)^2 with a safety factor of ~2.
    """
    if prime_limit < 3:
        raise ValueError(f"prime limit must be >= 3, got {prime_limit}")
    partials = []
    for ps in iter_prime_arrays(
        3, prime_limit + 1, segment_odds=segment_odds, workers=workers
    ):
        pf = ps.astype(np.float64)
        terms = np.log1p(-1.0 / np.square(pf - 1.0))
        partials.append(math.fsum(terms.tolist()))
    log_product = math.fsum(partials)
    return C2Estimate(
        value=2.0 * math.exp(log_product),
        tail_bound=2.0 / (prime_limit * math.log(prime_limit)),
        prime_limit=prime_limit,
    )


def brun_partial(
    x: int,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
) -> float:
    """Sum of 1/p + 1/(p+2) over twin pairs with lower member p <= x.

    1/5 enters twice, once from (3,5) and once from (5,7).
    """
    if x < 5:
        raise ValueError(f"need x >= 5 (first complete twin pair), got {x}")
    partials = []
    for ps in iter_twin_arrays(3, x + 1, segment_odds=segment_odds, workers=workers):
        pf = ps.astype(np.float64)
        terms = 1.0 / pf + 1.0 / (pf + 2.0)
        partials.append(math.fsum(terms.tolist()))
    return math.fsum(partials)


def brun_extrapolate(x: int, partial: float, c2: float) -> float:
    """Extrapolated Brun limit: partial + 4*c2/log(x)."""
    if x < 5:
        raise ValueError(f"need x >= 5, got {x}")
    if c2 <= 0:
        raise ValueError(f"need c2 > 0, got {c2}")
    return partial + 4.0 * c2 / math.log(x)


def brun_estimate(
    x: int,
    c2: float = C2_PAIR_DENSITY,
    *,
    segment_odds: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
) -> BrunEstimate:
    """Partial Brun sum at x together with its extrapolated limit.

    The default tail constant is the per-pair density constant, which makes
    the estimate stable in x and converge on the Brun constant.
    """
    partial = brun_partial(x, segment_odds=segment_odds, workers=workers)
    return BrunEstimate(x=x, partial=partial, extrapolated=brun_extrapolate(x, partial, c2))
