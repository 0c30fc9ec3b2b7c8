"""Shared independent oracles: trial division and a naive full-array sieve.

These deliberately avoid the package's segmented machinery so they can
arbitrate its output.
"""

from __future__ import annotations

import csv
import math
import os

import numpy as np
import pytest


def is_prime_td(n: int) -> bool:
    """Trial division; the slow, obviously-correct primality check."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primes_td(lo: int, hi: int) -> list[int]:
    """All primes in [lo, hi) by trial division."""
    return [n for n in range(max(lo, 2), hi) if is_prime_td(n)]


def naive_prime_flags(limit: int) -> np.ndarray:
    """Boolean is-prime array for 0..limit via a plain full-array sieve."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def naive_twin_lowers(limit: int) -> np.ndarray:
    """Twin lower members p with p, p+2 prime and p <= limit (naive sieve)."""
    flags = naive_prime_flags(limit + 2)
    tw = np.flatnonzero(flags[:-2] & flags[2:])
    return tw[tw >= 3]


@pytest.fixture(scope="session")
def td_primes_100k() -> list[int]:
    return primes_td(2, 100_000)


@pytest.fixture(scope="session")
def naive_twins_1e6() -> np.ndarray:
    return naive_twin_lowers(1_000_000)


DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
PUBLISHED_MEANS_CSV = os.path.join(DATA_DIR, "published_means.csv")


def load_published_means() -> list[tuple[int, str, str]]:
    """The published checkpoint table as (exponent, mean, ratio) strings."""
    rows = []
    with open(PUBLISHED_MEANS_CSV, newline="") as fh:
        for row in csv.DictReader(fh):
            n = int(row["N"])
            rows.append((n.bit_length() - 1, row["mean"], row["ratio"]))
    return rows


# frozen 50-digit oracle values: naive sieve + mpmath, dps=60
# (sum over twin lower members p < N of ln(p)*ln(p+2), and that sum / N)
ORACLE_SUMS = {
    1024: ("1076.359794335840246316289424869321248567", "1.051132611656093990543251391473946531803"),
    2048: ("2463.745391935561969348771179012641287392", "1.203000679656036117846079677252266253609"),
    4096: ("5357.816777787762964635112352453886707365", "1.308060736764590567537869226673312184415"),
    8192: ("10625.93093261384121949094094334154411754", "1.29711070954758803948864025187274708466"),
    16384: ("20569.21107686310253253126542410014150993", "1.255445012015570222932816493170174652706"),
    32768: ("42416.56005953468661829874788212047023762", "1.294450685410604450021324093082289741138"),
    65536: ("83591.8814772897242049058619811223101093", "1.27551088679946478584145907563968368697"),
    131072: ("171245.1752651375116711893567778310229831", "1.306497003670787900323405126783989127984"),
    262144: ("341767.3415411265573662897268989758424177", "1.303738943256860951867255122753051156684"),
    524288: ("683987.2715992677208131087500329135243206", "1.304602187346015397669045925203158424989"),
    1048576: ("1379287.969966074508422523338840725636099", "1.315391511884760387823603953209615360355"),
    2097152: ("2792761.498555244810208157242383910909377", "1.331692456510183720687941189948993162812"),
    4194304: ("5582096.611680951141498775697966052326113", "1.330875542564618859648412632457268792656"),
    8388608: ("11116198.47379294758656934885159682490633", "1.325154122566336105652969938706973183909"),
    10000000: ("13260327.93752577183263029136978264999956", "1.326032793752577183263029136978264999956"),
}

# same oracle, single terms
LN3_LN5 = "1.768148268448451728757951825762585171925"
LN3_LN5_PLUS_LN5_LN7 = "4.899969836528364271676860621291199206588"

TWIN_COUNTS = {100: 8, 1_000_000: 8169, 4_194_304: 27995, 10_000_000: 58980}
