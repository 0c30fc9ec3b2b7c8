"""Twin-prime sieving, compensated log-weighted sums, and limit extrapolation.

The package sieves twin primes with a segmented bit sieve, accumulates the
normalized mean of log(p)*log(p+2) with checkpoints at powers of two,
compares it against the twin-prime constant, computes Brun partial sums with
their 1/log(x) extrapolation, and extracts N -> infinity limits by least
squares. Hot loops run in a compiled kernel when available, with a
bit-identical pure-Python fallback.
"""

from .accumulate import (
    Checkpoint,
    CompensatedSum,
    RunState,
    Schedule,
    accumulate,
    mean_and_ratio,
    new_run_state,
    resume,
    run,
)
from .backend import BACKEND, available_backends
from .constants import (
    C2_PAIR_DENSITY,
    C2_REFERENCE,
    BrunEstimate,
    C2Estimate,
    brun_estimate,
    brun_extrapolate,
    brun_partial,
    twin_constant,
)
from .fit import (
    FitError,
    FitPoint,
    FitResult,
    emit_plot_data,
    linear_fit,
    windowed_fit,
)
from .sieve import (
    DEFAULT_SEGMENT_ODDS,
    BasePrimes,
    InsufficientBaseError,
    Segment,
    TwinPair,
    count_twins,
    primes_in_range,
    sieve_segment,
    small_primes,
    twin_pairs,
)
from .state import (
    StateChecksumError,
    StateError,
    StateVersionError,
    load_state,
    read_checkpoint_csv,
    save_state,
    write_checkpoint_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BasePrimes",
    "BrunEstimate",
    "C2Estimate",
    "C2_PAIR_DENSITY",
    "C2_REFERENCE",
    "Checkpoint",
    "CompensatedSum",
    "DEFAULT_SEGMENT_ODDS",
    "FitError",
    "FitPoint",
    "FitResult",
    "InsufficientBaseError",
    "RunState",
    "Schedule",
    "Segment",
    "StateChecksumError",
    "StateError",
    "StateVersionError",
    "TwinPair",
    "accumulate",
    "available_backends",
    "brun_estimate",
    "brun_extrapolate",
    "brun_partial",
    "count_twins",
    "emit_plot_data",
    "linear_fit",
    "load_state",
    "mean_and_ratio",
    "new_run_state",
    "primes_in_range",
    "read_checkpoint_csv",
    "resume",
    "run",
    "save_state",
    "sieve_segment",
    "small_primes",
    "twin_constant",
    "twin_pairs",
    "windowed_fit",
    "write_checkpoint_csv",
]
