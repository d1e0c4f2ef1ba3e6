"""JSON formats for matrices, banded partial matrices and command reports.

A matrix file is ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in
row-major order. Numbers are written with Python's shortest round-trip
``repr`` (at most 17 significant digits), which reads back bit-exactly; with
``hexfloat=True`` each number is written as a C99 hex-float string instead.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .completion import BandedPartial
from .errors import PhasekitError


class MatrixParseError(PhasekitError, ValueError):
    """Malformed matrix or partial-matrix JSON."""


def _number(value, hexfloat: bool):
    value = float(value)
    return value.hex() if hexfloat else value


def _parse_number(v) -> float:
    if isinstance(v, bool):
        raise MatrixParseError("booleans are not numbers")
    if isinstance(v, (int, float)):
        x = float(v)
    elif isinstance(v, str):
        try:
            x = float.fromhex(v) if v.strip().lower().lstrip("+-").startswith("0x") else float(v)
        except ValueError as exc:
            raise MatrixParseError(f"cannot parse number {v!r}") from exc
    else:
        raise MatrixParseError(f"expected a number, got {type(v).__name__}")
    if not math.isfinite(x):
        raise MatrixParseError("matrix entries must be finite")
    return x


def matrix_to_dict(A, hexfloat: bool = False) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError("expected a 2-D array")
    data = [[_number(z.real, hexfloat), _number(z.imag, hexfloat)] for z in A.ravel()]
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "data": data}


def matrix_from_dict(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixParseError("matrix must be a JSON object")
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except KeyError as exc:
        raise MatrixParseError(f"missing field {exc.args[0]!r}") from exc
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise MatrixParseError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise MatrixParseError(f"data must hold rows·cols = {rows * cols} entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for idx, entry in enumerate(data):
        if isinstance(entry, list):
            if len(entry) != 2:
                raise MatrixParseError(f"entry {idx} must be a [re, im] pair")
            out[idx] = complex(_parse_number(entry[0]), _parse_number(entry[1]))
        else:
            out[idx] = _parse_number(entry)
    return out.reshape(rows, cols)


def _load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def read_matrix(path) -> np.ndarray:
    return matrix_from_dict(_load_json(path))


def write_matrix(path, A, hexfloat: bool = False) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(A, hexfloat)) + "\n")


def partial_to_dict(partial: BandedPartial, hexfloat: bool = False) -> dict:
    blocks = [{"i": i, "j": j, "matrix": matrix_to_dict(M, hexfloat)}
              for (i, j), M in sorted(partial.blocks.items())]
    return {"block_sizes": list(partial.block_sizes), "p": partial.p,
            "alpha": _number(partial.alpha, hexfloat), "beta": _number(partial.beta, hexfloat),
            "blocks": blocks}


def partial_from_dict(obj) -> BandedPartial:
    if not isinstance(obj, dict):
        raise MatrixParseError("partial matrix must be a JSON object")
    try:
        sizes = obj["block_sizes"]
        p = obj["p"]
        alpha = _parse_number(obj["alpha"])
        beta = _parse_number(obj["beta"])
        entries = obj["blocks"]
    except KeyError as exc:
        raise MatrixParseError(f"missing field {exc.args[0]!r}") from exc
    if not isinstance(entries, list):
        raise MatrixParseError("blocks must be a list")
    blocks = {}
    for e in entries:
        try:
            blocks[(int(e["i"]), int(e["j"]))] = matrix_from_dict(e["matrix"])
        except (KeyError, TypeError) as exc:
            raise MatrixParseError("each block needs i, j and matrix") from exc
    try:
        return BandedPartial(tuple(sizes), int(p), blocks, alpha, beta)
    except (TypeError, ValueError) as exc:
        raise MatrixParseError(str(exc)) from exc


def read_partial(path) -> BandedPartial:
    return partial_from_dict(_load_json(path))


def write_partial(path, partial: BandedPartial, hexfloat: bool = False) -> None:
    Path(path).write_text(json.dumps(partial_to_dict(partial, hexfloat)) + "\n")


def file_digest(*paths) -> str:
    """SHA-256 over the raw bytes of the input files, in order."""
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def to_jsonable(obj, hexfloat: bool = False):
    """Convert report payloads: complex matrices become matrix dicts, vectors lists."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, hexfloat) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, hexfloat) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return matrix_to_dict(obj, hexfloat)
        if np.iscomplexobj(obj):
            return [[_number(z.real, hexfloat), _number(z.imag, hexfloat)] for z in obj]
        return [to_jsonable(v, hexfloat) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return _number(x, hexfloat)
    if isinstance(obj, complex):
        return [_number(obj.real, hexfloat), _number(obj.imag, hexfloat)]
    return obj


def dumps_report(report: dict, hexfloat: bool = False) -> str:
    return json.dumps(to_jsonable(report, hexfloat), indent=2, sort_keys=True) + "\n"


__all__ = [
    "MatrixParseError",
    "matrix_to_dict",
    "matrix_from_dict",
    "read_matrix",
    "write_matrix",
    "partial_to_dict",
    "partial_from_dict",
    "read_partial",
    "write_partial",
    "file_digest",
    "to_jsonable",
    "dumps_report",
]
