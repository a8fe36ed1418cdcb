"""Bit-exact binary checkpoints and the CSV time-series writer.

Checkpoint layout (little-endian throughout):
  magic "ZKG1" | format version u32 | dim u32 | n u32 | L f64 | t f64
  | gamma f64 | step_count u64 | five arrays fhat, gplus_hat, Fplus_hat,
  Fminus_hat, Gplus_hat, each n^dim complex values as interleaved (re, im)
  f64 pairs in row-major lattice order.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import CheckpointFormatError
from .evolution import State
from .propagators import ProfilePair
from .spectral import Grid, frequency_field

MAGIC = b"ZKG1"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdddQ")


def write_checkpoint(state: State, path, gamma: float) -> None:
    grid = state.grid
    header = _HEADER.pack(
        MAGIC, VERSION, grid.dim, grid.n, grid.L, state.t, gamma, state.step_count
    )
    arrays = (
        state.fhat.values,
        state.gplus_hat.values,
        state.Fplus_hat.values,
        state.Fminus_hat.values,
        state.Gplus_hat.values,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for a in arrays:
            inter = np.empty(a.size * 2, dtype="<f8")
            flat = np.ascontiguousarray(a).reshape(-1)
            inter[0::2] = flat.real
            inter[1::2] = flat.imag
            fh.write(inter.tobytes())


def read_checkpoint(path) -> tuple[State, float]:
    """Read a checkpoint; returns (state, gamma)."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise CheckpointFormatError(
                f"truncated header: expected {_HEADER.size} bytes, found {len(raw)}"
            )
        magic, version, dim, n, L, t, gamma, step_count = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise CheckpointFormatError(f"bad magic: expected {MAGIC!r}, found {magic!r}")
        if version != VERSION:
            raise CheckpointFormatError(f"unsupported version: expected {VERSION}, found {version}")
        grid = Grid(dim=dim, n=n, L=L)
        count = n**dim
        payload = fh.read()
    expected = 5 * count * 16
    if len(payload) != expected:
        raise CheckpointFormatError(
            f"payload shape mismatch: expected {expected} bytes "
            f"(5 arrays of {count} complex values), found {len(payload)}"
        )
    arrays = []
    for i in range(5):
        chunk = np.frombuffer(payload, dtype="<f8", count=2 * count, offset=i * count * 16)
        arrays.append((chunk[0::2] + 1j * chunk[1::2]).reshape(grid.shape))
    fields = [frequency_field(grid, a) for a in arrays]
    state = State(
        profiles=ProfilePair(fields[0], fields[1], t),
        Fplus_hat=fields[2],
        Fminus_hat=fields[3],
        Gplus_hat=fields[4],
        step_count=step_count,
    )
    return state, gamma


def format_float(x: float) -> str:
    """17 significant digits: round-trips any finite f64 exactly."""
    return format(float(x), ".17g")


def emit_timeseries(records, path) -> None:
    """Append diagnostic records as CSV rows; the header is written once."""
    from .diagnostics import DiagnosticsRecord

    import os

    write_header = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        if write_header:
            fh.write(",".join(DiagnosticsRecord.csv_header()) + "\n")
        for rec in records:
            fh.write(",".join(format_float(v) for v in rec.csv_row()) + "\n")


def read_timeseries(path):
    """Parse a CSV written by emit_timeseries back into records."""
    from .diagnostics import DiagnosticsRecord

    records = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        expected = DiagnosticsRecord.csv_header()
        if header != expected:
            raise CheckpointFormatError(
                f"CSV header mismatch: expected {expected[:3]}..., found {header[:3]}..."
            )
        for line in fh:
            line = line.strip()
            if line:
                records.append(DiagnosticsRecord.from_csv_row(line.split(",")))
    return records
