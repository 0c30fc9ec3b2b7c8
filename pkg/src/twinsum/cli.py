"""Command-line front end: orchestrates runs and serializes the outputs."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .accumulate import Checkpoint, RunState, Schedule, new_run_state, resume
from .backend import BACKEND, available_backends
from .constants import C2_PAIR_DENSITY, brun_extrapolate, brun_partial, twin_constant
from .fit import (
    FitError,
    FitResult,
    checkpoint_points,
    fit_summary,
    linear_fit,
    plot_table_text,
    windowed_fit,
)
from .sieve import DEFAULT_SEGMENT_ODDS
from .state import (
    StateError,
    default_state_path,
    load_state,
    read_checkpoint_csv,
    require_matching_segment_size,
    save_state,
    write_checkpoint_csv,
)

MIN_EXPONENT, MAX_EXPONENT = 10, 63
MAX_WORKERS = 256


def _parse_count(text: str) -> int:
    """Integer flag that also accepts scientific notation like 1e8."""
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer() or value < 0:
            raise argparse.ArgumentTypeError(f"not a nonnegative integer: {text!r}")
        return int(value)


def _parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like 32:40, got {text!r}")


def _check_exponents(parser: argparse.ArgumentParser, start: int, end: int) -> None:
    if not (MIN_EXPONENT <= start <= MAX_EXPONENT) or not (MIN_EXPONENT <= end <= MAX_EXPONENT):
        parser.error(f"exponents must lie in [{MIN_EXPONENT}, {MAX_EXPONENT}]")
    if end < start:
        parser.error(f"--end-exp {end} is below --start-exp {start}")


def _check_workers(parser: argparse.ArgumentParser, workers: int) -> None:
    if not (1 <= workers <= MAX_WORKERS):
        parser.error(f"--workers must lie in [1, {MAX_WORKERS}]")


def _emit_json(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if output:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_text(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _drive(state: RunState, args: argparse.Namespace, state_path: str, csv_path: str) -> int:
    def on_checkpoint(cp: Checkpoint, st: RunState) -> None:
        save_state(st, state_path)
        write_checkpoint_csv(csv_path, st.emitted)
        k = cp.n.bit_length() - 1
        print(
            f"N=2^{k}={cp.n}  mean={cp.mean:.12g}  ratio={cp.ratio:.12g}  "
            f"pairs={st.pair_count}",
            flush=True,
        )

    try:
        resume(state, workers=args.workers, on_checkpoint=on_checkpoint)
    except KeyboardInterrupt:
        print(f"interrupted; last finished checkpoint kept in {state_path}", file=sys.stderr)
        return 1
    save_state(state, state_path)
    write_checkpoint_csv(csv_path, state.emitted)
    print(f"done: {len(state.emitted)} checkpoint(s) in {csv_path}, state in {state_path}")
    return 0


def _cmd_run(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _check_exponents(parser, args.start_exp, args.end_exp)
    _check_workers(parser, args.workers)
    if args.segment_size < 16:
        parser.error("--segment-size must be >= 16 odd entries")
    schedule = Schedule(args.start_exp, args.end_exp)
    state = new_run_state(schedule, segment_size=args.segment_size)
    return _drive(state, args, args.state or default_state_path(), args.output)


def _cmd_resume(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _check_workers(parser, args.workers)
    state_path = args.state or default_state_path()
    state = load_state(state_path)
    require_matching_segment_size(state, args.segment_size)
    if args.end_exp is not None:
        if not (MIN_EXPONENT <= args.end_exp <= MAX_EXPONENT):
            parser.error(f"--end-exp must lie in [{MIN_EXPONENT}, {MAX_EXPONENT}]")
        if args.end_exp < state.next_exponent - 1:
            parser.error(
                f"--end-exp {args.end_exp} would discard checkpoints already emitted "
                f"(next is 2^{state.next_exponent})"
            )
        state.end_exponent = args.end_exp
    if state.next_exponent > state.end_exponent:
        print("schedule already complete; nothing to resume")
        write_checkpoint_csv(args.output, state.emitted)
        return 0
    return _drive(state, args, state_path, args.output)


def _cmd_c2(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.prime_limit < 3:
        parser.error("--prime-limit must be >= 3")
    _check_workers(parser, args.workers)
    started = time.perf_counter()
    estimate = twin_constant(args.prime_limit, workers=args.workers)
    _emit_json(
        {
            "value": estimate.value,
            "tail_bound": estimate.tail_bound,
            "prime_limit": estimate.prime_limit,
            "seconds": round(time.perf_counter() - started, 3),
        },
        args.output,
    )
    return 0


def _cmd_brun(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.max < 5:
        parser.error("--max must be >= 5")
    _check_workers(parser, args.workers)
    # tail constant is the per-pair density constant (half the doubled
    # product), which keeps the extrapolation stable in x
    c2 = C2_PAIR_DENSITY
    if args.prime_limit is not None:
        c2 = twin_constant(args.prime_limit, workers=args.workers).value / 2.0
    partial = brun_partial(args.max, workers=args.workers)
    _emit_json(
        {
            "x": args.max,
            "partial": partial,
            "extrapolated": brun_extrapolate(args.max, partial, c2),
            "tail_c2": c2,
        },
        args.output,
    )
    return 0


def _load_and_fit(
    parser: argparse.ArgumentParser, args: argparse.Namespace
) -> tuple[list[Checkpoint], FitResult]:
    checkpoints = read_checkpoint_csv(args.input)
    try:
        if args.window is not None:
            return checkpoints, windowed_fit(checkpoints, *args.window)
        return checkpoints, linear_fit(checkpoint_points(checkpoints))
    except FitError as exc:
        parser.error(str(exc))


def _cmd_fit(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _, result = _load_and_fit(parser, args)
    _emit_json(fit_summary(result, window=args.window), args.output)
    return 0


def _cmd_plot(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.no_fit:
        checkpoints = read_checkpoint_csv(args.input)
        result = None
    else:
        checkpoints, result = _load_and_fit(parser, args)
    _emit_text(plot_table_text(checkpoints, result), args.output)
    return 0


def _cmd_bench(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _check_exponents(parser, args.start_exp, args.end_exp)
    _check_workers(parser, args.workers)
    schedule = Schedule(args.start_exp, args.end_exp)
    results: dict[str, tuple[float, list[Checkpoint]]] = {}
    for name in available_backends():
        state = new_run_state(schedule, segment_size=args.segment_size)
        started = time.perf_counter()
        resume(state, workers=args.workers, backend=name)
        elapsed = time.perf_counter() - started
        results[name] = (elapsed, state.emitted)
        print(f"{name:>9}: {elapsed:8.3f} s to N=2^{args.end_exp} ({args.workers} worker(s))")
    if "compiled" not in results:
        print("compiled kernel unavailable; benchmarked the pure backend only")
        return 0
    pure_t, pure_cps = results["pure"]
    comp_t, comp_cps = results["compiled"]
    same = len(pure_cps) == len(comp_cps) and all(
        a.n == b.n and a.value == b.value and a.compensation == b.compensation
        for a, b in zip(pure_cps, comp_cps)
    )
    print(f"speedup: {pure_t / comp_t:.1f}x, checkpoints bit-identical: {same}")
    return 0 if same else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinsum",
        description=(
            "Sieve twin primes, accumulate the compensated mean of "
            "log(p)*log(p+2), and extrapolate its limit."
        ),
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser, with_start: bool = True) -> None:
        if with_start:
            p.add_argument("--start-exp", type=int, default=22,
                           help="first checkpoint exponent (default 22)")
        p.add_argument("--segment-size", type=int,
                       default=DEFAULT_SEGMENT_ODDS if with_start else None,
                       help="odd entries per sieve segment (default 2^18)")
        p.add_argument("--workers", type=int, default=1, help="sieve worker threads")
        p.add_argument("--state", help="state file path (default $TWINSUM_STATE_DIR)")

    p_run = sub.add_parser("run", help="sieve and checkpoint a fresh schedule")
    add_run_flags(p_run)
    p_run.add_argument("--end-exp", type=int, required=True,
                       help="last checkpoint exponent (N = 2^k)")
    p_run.add_argument("--output", default="checkpoints.csv", help="checkpoint CSV path")
    p_run.set_defaults(func=_cmd_run)

    p_resume = sub.add_parser("resume", help="continue a persisted run bit-identically")
    add_run_flags(p_resume, with_start=False)
    p_resume.add_argument("--end-exp", type=int, help="extend the schedule to this exponent")
    p_resume.add_argument("--output", default="checkpoints.csv", help="checkpoint CSV path")
    p_resume.set_defaults(func=_cmd_resume)

    p_c2 = sub.add_parser("c2", help="twin-prime constant by truncated Euler product")
    p_c2.add_argument("--prime-limit", type=_parse_count, default=100_000_000,
                      help="truncate the product at primes <= this (default 1e8)")
    p_c2.add_argument("--workers", type=int, default=1)
    p_c2.add_argument("--output", help="write JSON here instead of stdout")
    p_c2.set_defaults(func=_cmd_c2)

    p_brun = sub.add_parser("brun", help="Brun partial sum and extrapolated limit")
    p_brun.add_argument("--max", type=_parse_count, required=True,
                        help="include twin pairs with lower member <= this")
    p_brun.add_argument("--prime-limit", type=_parse_count,
                        help="recompute the twin constant at this truncation "
                             "(default: built-in reference value)")
    p_brun.add_argument("--workers", type=int, default=1)
    p_brun.add_argument("--output", help="write JSON here instead of stdout")
    p_brun.set_defaults(func=_cmd_brun)

    p_fit = sub.add_parser("fit", help="least-squares intercept of mean vs 1/N")
    p_fit.add_argument("--input", required=True, help="checkpoint CSV to fit")
    p_fit.add_argument("--window", type=_parse_window,
                       help="restrict to exponents k_min:k_max, e.g. 32:40")
    p_fit.add_argument("--output", help="write JSON here instead of stdout")
    p_fit.set_defaults(func=_cmd_fit)

    p_plot = sub.add_parser("plot", help="tab-separated plot table of mean vs 1/N")
    p_plot.add_argument("--input", required=True, help="checkpoint CSV to plot")
    p_plot.add_argument("--window", type=_parse_window,
                        help="fit window for the fitted column")
    p_plot.add_argument("--no-fit", action="store_true",
                        help="emit rows without a fitted column")
    p_plot.add_argument("--output", help="write the table here instead of stdout")
    p_plot.set_defaults(func=_cmd_plot)

    p_bench = sub.add_parser("bench", help="time the compiled and pure kernels")
    p_bench.add_argument("--start-exp", type=int, default=22)
    p_bench.add_argument("--end-exp", type=int, default=24)
    p_bench.add_argument("--segment-size", type=int, default=DEFAULT_SEGMENT_ODDS)
    p_bench.add_argument("--workers", type=int, default=1)
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        print(f"backend: {BACKEND}", flush=True)
    try:
        return args.func(parser, args)
    except StateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
