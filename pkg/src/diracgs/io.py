"""Persistence: binary field snapshots, run summaries, traces, profiles.

field.bin layout, fixed and language neutral:
  bytes 0..31   header ``<4sIIddB3x``: magic "NDRC", version, n, L, a,
                representation code (0 physical, 1 frequency), padding
  bytes 32..    n^3 * 4 complex values, little-endian f64 (re, im) pairs,
                x varying fastest, then y, z, spinor component slowest

All writes go through a temp file in the target directory followed by
an atomic rename.
"""

from __future__ import annotations

import csv
import json
import os
import struct
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np

from . import kernels
from .field import Grid, SpinorField, to_physical
from .solver import GroundStateResult, TraceRow

_HEADER = struct.Struct("<4sIIddB3x")
_MAGIC = b"NDRC"
_VERSION = 1
_REPR_CODE = {"physical": 0, "frequency": 1}
_CODE_REPR = {v: k for k, v in _REPR_CODE.items()}


def _atomic_write(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_field(path: str | Path, u: SpinorField, a: float) -> None:
    header = _HEADER.pack(_MAGIC, _VERSION, u.grid.n, u.grid.L, a,
                          _REPR_CODE[u.repr])
    body = np.transpose(u.data, (3, 2, 1, 0)).ravel().astype("<c16")
    _atomic_write(Path(path), header + body.tobytes())


def read_field(path: str | Path) -> tuple[SpinorField, float]:
    """Returns the stored field and the mass it was written with."""
    buf = Path(path).read_bytes()
    if len(buf) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n, L, a, code = _HEADER.unpack_from(buf)
    if magic != _MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    if code not in _CODE_REPR:
        raise ValueError(f"{path}: unknown representation code {code}")
    expect = _HEADER.size + n ** 3 * 4 * 16
    if len(buf) != expect:
        raise ValueError(f"{path}: expected {expect} bytes, found {len(buf)}")
    flat = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size)
    data = np.ascontiguousarray(
        flat.reshape(4, n, n, n).transpose(3, 2, 1, 0).astype(np.complex128))
    return SpinorField(Grid(n, L), _CODE_REPR[code], data), a


def write_summary(path: str | Path, result: GroundStateResult,
                  config_echo: dict[str, str]) -> None:
    doc = {
        "c": result.c,
        "residual_self": result.residuals.r_self,
        "residual_minus": result.residuals.r_minus,
        "residual_full": result.residual_full,
        "iterations": result.iterations,
        "t_check": result.t_check,
        "converged": result.converged,
        "config_echo": config_echo,
    }
    _atomic_write(Path(path), json.dumps(doc, indent=2).encode())


def write_trace(path: str | Path, trace: tuple[TraceRow, ...]) -> None:
    buf = StringIO()
    writer = csv.writer(buf)
    writer.writerow(["iter", "m_value", "residual", "step", "inner_iters"])
    for row in trace:
        writer.writerow([row.iter, f"{row.m_value:.16e}",
                         f"{row.residual:.6e}", f"{row.step:.6e}",
                         row.inner_iters])
    _atomic_write(Path(path), buf.getvalue().encode())


def radial_profile(u: SpinorField, bins: int | None = None
                   ) -> list[tuple[float, float, float]]:
    """(r, mean |u|, max |u|) over spherical shells of width about dx."""
    grid = u.grid
    bins = bins or grid.n
    mod = kernels.abs4(to_physical(u).flat)
    r = grid.radii
    edges = np.linspace(0.0, float(np.max(r)) + 1e-12, bins + 1)
    which = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, bins - 1)
    rows = []
    for i in range(bins):
        sel = which == i
        if not np.any(sel):
            continue
        rows.append((0.5 * (edges[i] + edges[i + 1]),
                     float(np.mean(mod[sel])), float(np.max(mod[sel]))))
    return rows


def write_profile(path: str | Path, u: SpinorField) -> None:
    buf = StringIO()
    writer = csv.writer(buf)
    writer.writerow(["r", "mean_abs_u", "max_abs_u"])
    for r, mean_v, max_v in radial_profile(u):
        writer.writerow([f"{r:.6e}", f"{mean_v:.8e}", f"{max_v:.8e}"])
    _atomic_write(Path(path), buf.getvalue().encode())


def write_report(path: str | Path, report_json: str) -> None:
    _atomic_write(Path(path), report_json.encode())
