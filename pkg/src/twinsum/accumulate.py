"""Compensated accumulation of log(p)*log(p+2) over the twin-pair stream.

The running sum S(N) = sum over twin lower members p < N of ln(p)*ln(p+2)
is kept as a Neumaier-compensated pair (value, compensation); checkpoints
are emitted on the geometric schedule N = 2**k. Accumulation is strictly
sequential in pair order, so results are independent of segment size and
worker count, and a run can be split at any checkpoint and resumed
bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

import numpy as np

from .backend import get_kernel
from .constants import C2_REFERENCE
from .sieve import DEFAULT_SEGMENT_ODDS, TwinPair, iter_twin_arrays

STATE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class CompensatedSum:
    """Running sum plus compensation term (Neumaier's variant).

    The accumulated total is value + compensation; adding 0.0 leaves both
    fields unchanged.
    """

    value: float = 0.0
    compensation: float = 0.0

    def add(self, term: float) -> "CompensatedSum":
        value, compensation = self.value, self.compensation
        t = value + term
        if abs(value) >= abs(term):
            compensation += (value - t) + term
        else:
            compensation += (term - t) + value
        return CompensatedSum(t, compensation)

    def total(self) -> float:
        return self.value + self.compensation


@dataclass(frozen=True)
class Schedule:
    """Checkpoints at N = 2**k for start_exponent <= k <= end_exponent."""

    start_exponent: int
    end_exponent: int

    def __post_init__(self) -> None:
        if self.start_exponent < 1:
            raise ValueError(f"start exponent must be >= 1, got {self.start_exponent}")
        if self.end_exponent < self.start_exponent:
            raise ValueError(
                f"end exponent {self.end_exponent} below start {self.start_exponent}"
            )

    def checkpoints(self) -> list[int]:
        return [1 << k for k in range(self.start_exponent, self.end_exponent + 1)]


@dataclass(frozen=True)
class Checkpoint:
    """One schedule row: N, raw sum S(N), mean S(N)/N, and mean/C2.

    ``value`` and ``compensation`` carry the exact accumulator state so the
    record can be persisted and restored bit-identically.
    """

    n: int
    sum: float
    mean: float
    ratio: float
    value: float
    compensation: float

    @classmethod
    def from_state(cls, n: int, value: float, compensation: float, c2: float) -> "Checkpoint":
        total = value + compensation
        mean = total / n
        return cls(
            n=n,
            sum=total,
            mean=mean,
            ratio=mean / c2,
            value=value,
            compensation=compensation,
        )


def accumulate(s: CompensatedSum, pair: TwinPair) -> CompensatedSum:
    """Advance the sum by ln(p)*ln(p+2) for one twin pair."""
    return s.add(math.log(pair.p) * math.log(pair.p + 2))


def mean_and_ratio(s: CompensatedSum, n: int, c2: float) -> tuple[float, float]:
    """Normalized mean S(N)/N and its ratio to the twin constant."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if c2 <= 0:
        raise ValueError(f"need c2 > 0, got {c2}")
    mean = s.total() / n
    return mean, mean / c2


@dataclass
class RunState:
    """Exact resumable state of a sieving run.

    ``next_lo`` is the first odd value not yet consumed as a pair lower
    member; ``next_exponent`` the next schedule point to emit. The float
    fields are meaningful to the last bit: continuing from a persisted state
    is indistinguishable from an uninterrupted run.
    """

    segment_size: int
    start_exponent: int
    end_exponent: int
    next_exponent: int
    next_lo: int
    value: float
    compensation: float
    pair_count: int
    c2: float
    emitted: list[Checkpoint] = field(default_factory=list)
    format_version: int = STATE_FORMAT_VERSION

    def schedule(self) -> Schedule:
        return Schedule(self.start_exponent, self.end_exponent)

    def compensated_sum(self) -> CompensatedSum:
        return CompensatedSum(self.value, self.compensation)


def new_run_state(
    schedule: Schedule,
    segment_size: int = DEFAULT_SEGMENT_ODDS,
    c2: float = C2_REFERENCE,
) -> RunState:
    """Fresh state: nothing sieved, no checkpoints emitted."""
    if segment_size < 16:
        raise ValueError(f"segment size must be >= 16 odd entries, got {segment_size}")
    return RunState(
        segment_size=segment_size,
        start_exponent=schedule.start_exponent,
        end_exponent=schedule.end_exponent,
        next_exponent=schedule.start_exponent,
        next_lo=3,
        value=0.0,
        compensation=0.0,
        pair_count=0,
        c2=c2,
    )


def resume(
    state: RunState,
    *,
    workers: int = 1,
    backend: str | None = None,
    on_checkpoint: Callable[[Checkpoint, RunState], None] | None = None,
) -> RunState:
    """Drive ``state`` to the end of its schedule, emitting checkpoints.

    Checkpoint boundaries falling inside a segment split the accumulation
    exactly at p < 2**k. ``on_checkpoint`` is invoked after each emission
    with the checkpoint and the (consistent, persistable) state.
    """
    stop = 1 << state.end_exponent
    if state.next_lo > stop + 1:
        raise ValueError(
            f"state already sieved past 2**{state.end_exponent} (next_lo={state.next_lo})"
        )
    kern = get_kernel(backend)
    value, compensation, count = state.value, state.compensation, state.pair_count

    def boundary() -> int | None:
        k = state.next_exponent
        return (1 << k) if k <= state.end_exponent else None

    def emit(b: int) -> None:
        nonlocal value, compensation, count
        state.value = value
        state.compensation = compensation
        state.pair_count = count
        state.next_lo = b + 1
        state.next_exponent += 1
        cp = Checkpoint.from_state(b, value, compensation, state.c2)
        state.emitted.append(cp)
        if on_checkpoint is not None:
            on_checkpoint(cp, state)

    if state.next_lo < stop:
        stream: Iterator[np.ndarray] = iter_twin_arrays(
            state.next_lo,
            stop,
            segment_odds=state.segment_size,
            workers=workers,
            backend=backend,
        )
        for ps in stream:
            offset = 0
            b = boundary()
            while b is not None:
                idx = int(np.searchsorted(ps, b, side="left"))
                if idx >= ps.size:
                    break
                value, compensation = kern.log_weighted_sum(ps[offset:idx], value, compensation)
                count += idx - offset
                offset = idx
                emit(b)
                b = boundary()
            value, compensation = kern.log_weighted_sum(ps[offset:], value, compensation)
            count += ps.size - offset

    b = boundary()
    while b is not None:
        emit(b)
        b = boundary()

    state.value = value
    state.compensation = compensation
    state.pair_count = count
    state.next_lo = stop + 1
    return state


def run(
    schedule: Schedule,
    *,
    segment_size: int = DEFAULT_SEGMENT_ODDS,
    workers: int = 1,
    c2: float = C2_REFERENCE,
    backend: str | None = None,
    on_checkpoint: Callable[[Checkpoint, RunState], None] | None = None,
) -> list[Checkpoint]:
    """Run the full pipeline from scratch and return the checkpoint list."""
    state = new_run_state(schedule, segment_size=segment_size, c2=c2)
    resume(state, workers=workers, backend=backend, on_checkpoint=on_checkpoint)
    return state.emitted


def copy_state(state: RunState) -> RunState:
    """Independent copy (checkpoint list included)."""
    return replace(state, emitted=list(state.emitted))
