"""JSON dump/load for complex matrices.

Layout::

    {"format": "oscderham.matrix", "version": 1,
     "rows": r, "cols": c,
     "data": [[re, im], ...]}        # row-major, r*c pairs

Floats are written with Python's shortest round-trip repr, so a reload is
bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT = "oscderham.matrix"
VERSION = 1


def matrix_to_dict(matrix: np.ndarray) -> dict:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    flat = m.reshape(-1)
    return {
        "format": FORMAT,
        "version": VERSION,
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_dict(payload: dict) -> np.ndarray:
    if payload.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} payload")
    if payload.get("version") != VERSION:
        raise ValueError(f"unsupported matrix format version {payload.get('version')!r}")
    rows, cols = payload["rows"], payload["cols"]
    data = np.asarray(payload["data"], dtype=float).reshape(-1, 2) if rows * cols else np.zeros((0, 2))
    if data.shape[0] != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {data.shape[0]}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(rows, cols)


def dump_matrix(matrix: np.ndarray, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(matrix_to_dict(matrix)) + "\n")
    return path


def load_matrix(path) -> np.ndarray:
    return matrix_from_dict(json.loads(Path(path).read_text()))
