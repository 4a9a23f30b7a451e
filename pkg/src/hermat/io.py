"""JSON file formats for matrices and annihilator specs.

Matrix::

    {"n": 2, "rows": [[[re, im], [re, im]], [[re, im], [re, im]]], "meta": {...}}

Spec::

    {"roots": [{"a": [re, im], "alpha": 1}, ...]}

Floats are written with ``repr`` precision, so a written matrix reads back
bit for bit.  ``meta`` is optional and ignored on input.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .annihilator import AnnihilatorSpec

__all__ = [
    "FormatError",
    "matrix_from_json",
    "matrix_to_json",
    "read_matrix",
    "read_spec",
    "spec_from_json",
    "write_json",
    "write_matrix",
    "write_spec",
]


class FormatError(ValueError):
    """Input file does not follow the matrix/spec layout."""


def _pair(value: Any, where: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise FormatError(f"{where}: expected [re, im], got {value!r}")
    re, im = float(value[0]), float(value[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise FormatError(f"{where}: non-finite entry")
    return complex(re, im)


def matrix_from_json(data: Any) -> np.ndarray:
    if not isinstance(data, dict) or "n" not in data or "rows" not in data:
        raise FormatError("matrix must be an object with 'n' and 'rows'")
    n, rows = data["n"], data["rows"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(rows, list) or len(rows) != n:
        raise FormatError(f"expected {n} rows")
    A = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError(f"row {i} must have {n} entries")
        for j, entry in enumerate(row):
            A[i, j] = _pair(entry, f"rows[{i}][{j}]")
    return A


def matrix_to_json(A: np.ndarray, meta: dict | None = None) -> dict:
    A = np.asarray(A, dtype=complex)
    out: dict[str, Any] = {
        "n": int(A.shape[0]),
        "rows": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }
    if meta is not None:
        out["meta"] = meta
    return out


def _load(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path: str | Path, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, allow_nan=False)
        fh.write("\n")


def read_matrix(path: str | Path) -> np.ndarray:
    return matrix_from_json(_load(path))


def write_matrix(path: str | Path, A: np.ndarray, meta: dict | None = None) -> None:
    write_json(path, matrix_to_json(A, meta))


def spec_from_json(data: Any) -> AnnihilatorSpec:
    if not isinstance(data, dict) or not isinstance(data.get("roots"), list):
        raise FormatError("spec must be an object with a 'roots' list")
    entries = []
    for i, r in enumerate(data["roots"]):
        if not isinstance(r, dict) or "a" not in r or "alpha" not in r:
            raise FormatError(f"roots[{i}] needs 'a' and 'alpha'")
        alpha = r["alpha"]
        if not isinstance(alpha, int) or isinstance(alpha, bool) or alpha < 0:
            raise FormatError(f"roots[{i}].alpha must be a nonnegative integer")
        entries.append((_pair(r["a"], f"roots[{i}].a"), alpha))
    try:
        return AnnihilatorSpec(entries)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def read_spec(path: str | Path) -> AnnihilatorSpec:
    try:
        return spec_from_json(_load(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_spec(path: str | Path, spec: AnnihilatorSpec) -> None:
    write_json(path, spec.to_json())
