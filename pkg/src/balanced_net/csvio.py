"""CSV and binary output.

CSV files carry a header row, LF line endings, and shortest-round-trip float
formatting (lossless for doubles), so identical runs produce identical bytes.
The micro-state dump is little-endian: a 16-byte header (magic "BNET",
version u32, n u32, 4 reserved bytes), the time as f64, then the two
potential arrays as f64[n] each.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .model import MicroState

MICRO_MAGIC = b"BNET"
MICRO_VERSION = 1


def fmt_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: Union[str, Path], header: Sequence[str],
              columns: Sequence[np.ndarray]) -> None:
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header/column count mismatch")
    rows = cols[0].shape[0]
    for c in cols:
        if c.shape[0] != rows:
            raise ValueError("ragged columns")
    lines = [",".join(header)]
    for r in range(rows):
        lines.append(",".join(fmt_value(c[r]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_csv(path: Union[str, Path]):
    """Header list plus float columns (round-trips write_csv output)."""
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, [data[:, i] for i in range(len(header))]


def dump_micro(path: Union[str, Path], s: MicroState) -> None:
    with open(path, "wb") as fh:
        fh.write(MICRO_MAGIC)
        fh.write(struct.pack("<II", MICRO_VERSION, s.n))
        fh.write(b"\x00" * 4)
        fh.write(struct.pack("<d", s.t))
        fh.write(np.ascontiguousarray(s.u_e, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(s.u_i, dtype="<f8").tobytes())


def load_micro(path: Union[str, Path]) -> MicroState:
    raw = Path(path).read_bytes()
    if raw[:4] != MICRO_MAGIC:
        raise ValueError("bad magic")
    version, n = struct.unpack("<II", raw[4:12])
    if version != MICRO_VERSION:
        raise ValueError(f"unsupported version {version}")
    (t,) = struct.unpack("<d", raw[16:24])
    u = np.frombuffer(raw[24:24 + 16 * n], dtype="<f8")
    return MicroState(t=t, u_e=u[:n].copy(), u_i=u[n:].copy())
