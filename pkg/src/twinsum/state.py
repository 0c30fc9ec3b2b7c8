"""Persistence: resumable state files and the checkpoint CSV.

Floats are persisted both as human-readable decimals and as IEEE-754 bit
patterns in hex; the hex columns are authoritative, so a reload reproduces
the in-memory records bit for bit. State files carry a CRC-32 of the
canonical payload and are written atomically (temp file, fsync, rename).
"""

from __future__ import annotations

import csv
import json
import os
import struct
import tempfile
import zlib
from typing import Iterable, Sequence

from .accumulate import STATE_FORMAT_VERSION, Checkpoint, RunState
from .constants import C2_REFERENCE

CSV_HEADER = ["N", "sum", "mean", "ratio", "sum_hex", "comp_hex"]


class StateError(RuntimeError):
    """Unusable state file."""


class StateVersionError(StateError):
    """State file format version does not match this code."""


class StateChecksumError(StateError):
    """State file payload does not match its checksum."""


def float_to_hex(x: float) -> str:
    """IEEE-754 binary64 bit pattern, 16 hex digits, big-endian."""
    return struct.pack(">d", x).hex()


def hex_to_float(s: str) -> float:
    return struct.unpack(">d", bytes.fromhex(s))[0]


def _atomic_write_bytes(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _checkpoint_payload(cp: Checkpoint) -> dict:
    return {
        "n": cp.n,
        "sum_bits": float_to_hex(cp.value),
        "comp_bits": float_to_hex(cp.compensation),
    }


def _state_payload(state: RunState) -> dict:
    return {
        "segment_size": state.segment_size,
        "start_exponent": state.start_exponent,
        "end_exponent": state.end_exponent,
        "next_exponent": state.next_exponent,
        "next_lo": state.next_lo,
        "sum_bits": float_to_hex(state.value),
        "compensation_bits": float_to_hex(state.compensation),
        "pair_count": state.pair_count,
        "c2_bits": float_to_hex(state.c2),
        "emitted": [_checkpoint_payload(cp) for cp in state.emitted],
    }


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("ascii")


def save_state(state: RunState, path: str) -> None:
    """Serialize atomically; the file survives interruption intact."""
    payload = _state_payload(state)
    document = {
        "format_version": state.format_version,
        "crc32": zlib.crc32(_canonical(payload)),
        "payload": payload,
    }
    _atomic_write_bytes(path, (json.dumps(document, indent=1) + "\n").encode("ascii"))


def load_state(path: str) -> RunState:
    """Read back a state file, verifying version and checksum first."""
    try:
        with open(path, "rb") as fh:
            document = json.load(fh)
    except (OSError, ValueError) as exc:
        raise StateError(f"cannot read state file {path}: {exc}") from exc
    version = document.get("format_version")
    if version != STATE_FORMAT_VERSION:
        raise StateVersionError(
            f"state file {path} has format_version {version!r}; "
            f"this build reads version {STATE_FORMAT_VERSION}"
        )
    payload = document.get("payload")
    if not isinstance(payload, dict):
        raise StateError(f"state file {path} has no payload")
    if zlib.crc32(_canonical(payload)) != document.get("crc32"):
        raise StateChecksumError(f"state file {path} failed its checksum; refusing to resume")
    try:
        c2 = hex_to_float(payload["c2_bits"])
        state = RunState(
            segment_size=payload["segment_size"],
            start_exponent=payload["start_exponent"],
            end_exponent=payload["end_exponent"],
            next_exponent=payload["next_exponent"],
            next_lo=payload["next_lo"],
            value=hex_to_float(payload["sum_bits"]),
            compensation=hex_to_float(payload["compensation_bits"]),
            pair_count=payload["pair_count"],
            c2=c2,
            emitted=[
                Checkpoint.from_state(
                    row["n"],
                    hex_to_float(row["sum_bits"]),
                    hex_to_float(row["comp_bits"]),
                    c2,
                )
                for row in payload["emitted"]
            ],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"state file {path} is malformed: {exc}") from exc
    return state


def checkpoint_csv_text(checkpoints: Iterable[Checkpoint]) -> str:
    """The checkpoint CSV: decimals at 12 significant digits plus exact hex."""
    lines = [",".join(CSV_HEADER)]
    for cp in checkpoints:
        lines.append(
            f"{cp.n},{cp.sum:.12g},{cp.mean:.12g},{cp.ratio:.12g},"
            f"{float_to_hex(cp.value)},{float_to_hex(cp.compensation)}"
        )
    return "\n".join(lines) + "\n"


def write_checkpoint_csv(path: str, checkpoints: Iterable[Checkpoint]) -> None:
    _atomic_write_bytes(path, checkpoint_csv_text(checkpoints).encode("ascii"))


def read_checkpoint_csv(path: str, c2: float = C2_REFERENCE) -> list[Checkpoint]:
    """Parse a checkpoint CSV; hex columns, when present, are authoritative.

    Plain tables carrying only N and mean (and optionally ratio/sum) are
    accepted too, so externally prepared mean tables can be fitted directly.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty checkpoint CSV")
        fields = {name.strip().lower(): name for name in reader.fieldnames}
        if "n" not in fields or not ("mean" in fields or "sum_hex" in fields):
            raise ValueError(
                f"{path}: need at least N and mean (or hex) columns, got {reader.fieldnames}"
            )
        checkpoints = []
        for row in reader:
            n = int(row[fields["n"]])
            if "sum_hex" in fields and "comp_hex" in fields:
                value = hex_to_float(row[fields["sum_hex"]])
                comp = hex_to_float(row[fields["comp_hex"]])
                checkpoints.append(Checkpoint.from_state(n, value, comp, c2))
                continue
            mean = float(row[fields["mean"]])
            total = float(row[fields["sum"]]) if "sum" in fields else mean * n
            ratio = float(row[fields["ratio"]]) if "ratio" in fields else mean / c2
            checkpoints.append(
                Checkpoint(n=n, sum=total, mean=mean, ratio=ratio, value=total, compensation=0.0)
            )
    return checkpoints


def default_state_dir() -> str:
    """Directory for state files: $TWINSUM_STATE_DIR, else the working directory."""
    return os.environ.get("TWINSUM_STATE_DIR", ".")


def default_state_path(name: str = "twinsum-state.json") -> str:
    return os.path.join(default_state_dir(), name)


def require_matching_segment_size(state: RunState, segment_size: int | None) -> None:
    """Refuse a resume whose segment size differs from the persisted run."""
    if segment_size is not None and segment_size != state.segment_size:
        raise StateError(
            f"state was produced with segment_size={state.segment_size}; "
            f"refusing to resume with segment_size={segment_size}"
        )


def emitted_equal(a: Sequence[Checkpoint], b: Sequence[Checkpoint]) -> bool:
    """Bit-exact equality of two checkpoint lists."""
    if len(a) != len(b):
        return False
    return all(
        x.n == y.n
        and float_to_hex(x.value) == float_to_hex(y.value)
        and float_to_hex(x.compensation) == float_to_hex(y.compensation)
        for x, y in zip(a, b)
    )
