"""Binary (HSF1) and CSV serialization of grid fields.

HSF1 layout, all little-endian::

    offset  size  content
    0       4     b"HSF1"
    4       4     dim     (int32)
    8       4     points  (int32)
    12      8     period  (float64)
    20      8*N^n samples (float64, row-major)
"""

from __future__ import annotations

import csv
import io
import struct
from pathlib import Path

import numpy as np

from .grid import GridField, GridSpec

MAGIC = b"HSF1"
_HEADER = struct.Struct("<4siid")
HEADER_SIZE = _HEADER.size


def field_to_bytes(f: GridField) -> bytes:
    head = _HEADER.pack(MAGIC, f.spec.dim, f.spec.points, f.spec.period)
    return head + np.ascontiguousarray(f.samples, dtype="<f8").tobytes()


def field_from_bytes(data: bytes) -> GridField:
    if len(data) < HEADER_SIZE:
        raise ValueError("truncated HSF1 header")
    magic, dim, points, period = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    spec = GridSpec(dim, points, period)
    body = data[HEADER_SIZE:]
    expected = 8 * points**dim
    if len(body) != expected:
        raise ValueError(f"expected {expected} payload bytes, got {len(body)}")
    return GridField(spec, np.frombuffer(body, dtype="<f8").reshape(spec.shape))


def write_field(path: str | Path, f: GridField) -> None:
    Path(path).write_bytes(field_to_bytes(f))


def read_field(path: str | Path) -> GridField:
    return field_from_bytes(Path(path).read_bytes())


def field_to_csv(f: GridField) -> str:
    """One row per cell: integer index columns ``i0[,i1]`` then ``value``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"i{d}" for d in range(f.spec.dim)] + ["value"])
    for idx in np.ndindex(*f.spec.shape):
        w.writerow([*idx, repr(float(f.samples[idx]))])
    return buf.getvalue()


def write_field_csv(path: str | Path, f: GridField) -> None:
    Path(path).write_text(field_to_csv(f))
