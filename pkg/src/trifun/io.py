"""Matrix file formats and deterministic report serialization.

JSON matrix files look like::

    {"dim": 2, "orientation": "lower", "entries": [[1], [2, 3]]}

``lower`` rows may be ragged (row i holds i + 1 entries) or full; ``upper``
rows may be ragged from the diagonal or full; ``dense`` is a full grid that
must be triangular on one side. Complex entries are ``[re, im]`` pairs.
CSV files hold a real dense grid.
"""

import csv
import hashlib
import io
import json
import math
import os

import numpy as np

from .exceptions import TrifunError
from .matcore import from_dense

ORIENTATIONS = ("lower", "upper", "dense")

ERROR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["error"],
    "additionalProperties": False,
    "properties": {
        "error": {
            "type": "object",
            "required": ["code", "type", "message", "details"],
            "additionalProperties": False,
            "properties": {
                "code": {"type": "integer", "enum": [2, 3, 4, 5, 6]},
                "type": {"type": "string"},
                "message": {"type": "string"},
                "details": {"type": "object"},
            },
        }
    },
}


class MatrixFileError(TrifunError, ValueError):
    pass


def digest(data):
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _scalar(x, where):
    if isinstance(x, bool):
        raise MatrixFileError(f"{where}: booleans are not matrix entries")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise MatrixFileError(f"{where}: expected a number or an [re, im] pair, got {x!r}")


def _grid_from_rows(rows, d, orientation):
    grid = np.zeros((d, d), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise MatrixFileError(f"row {i + 1} is not an array")
        values = [_scalar(x, f"row {i + 1}") for x in row]
        if len(values) == d:
            grid[i, :] = values
        elif orientation == "lower" and len(values) == i + 1:
            grid[i, :i + 1] = values
        elif orientation == "upper" and len(values) == d - i:
            grid[i, i:] = values
        else:
            raise MatrixFileError(
                f"row {i + 1} has {len(values)} entries, which does not fit "
                f"orientation {orientation!r} with dim {d}"
            )
    return grid


def _to_triangular(grid, orientation, zero_tol):
    if not np.any(np.imag(grid)):
        grid = np.real(grid).astype(np.float64)
    if orientation == "dense":
        try:
            return from_dense(grid, zero_tol, "lower")
        except TrifunError as lower_err:
            try:
                return from_dense(grid, zero_tol, "upper")
            except TrifunError:
                raise lower_err from None
    return from_dense(grid, zero_tol, orientation)


def parse_json_matrix(text, zero_tol=0.0):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MatrixFileError("matrix file must be a JSON object")
    missing = {"dim", "entries"} - doc.keys()
    if missing:
        raise MatrixFileError(f"matrix file lacks keys {sorted(missing)}")
    d = doc["dim"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise MatrixFileError(f"dim must be a positive integer, got {d!r}")
    orientation = doc.get("orientation", "lower")
    if orientation not in ORIENTATIONS:
        raise MatrixFileError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != d:
        raise MatrixFileError(f"entries must be an array of {d} rows")
    return _to_triangular(_grid_from_rows(rows, d, orientation), orientation, zero_tol)


def parse_csv_matrix(text, orientation="dense", zero_tol=0.0):
    rows = []
    for line in csv.reader(io.StringIO(text)):
        if not line or not "".join(line).strip() or line[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line])
        except ValueError as exc:
            raise MatrixFileError(f"CSV line {len(rows) + 1}: {exc}") from None
    if not rows:
        raise MatrixFileError("CSV file holds no rows")
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise MatrixFileError(f"CSV must be a dense {d}x{d} grid")
    return _to_triangular(np.array(rows, dtype=float), orientation, zero_tol)


def read_matrix(data, fmt=None, orientation="dense", zero_tol=0.0, name=None):
    """Parse raw bytes into a LowerTriangular; ``fmt`` is guessed when omitted."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MatrixFileError(f"input is not UTF-8: {exc}") from None
    if fmt is None:
        if name and name.lower().endswith(".csv"):
            fmt = "csv"
        elif name and name.lower().endswith(".json"):
            fmt = "json"
        else:
            fmt = "json" if text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        return parse_json_matrix(text, zero_tol)
    return parse_csv_matrix(text, orientation, zero_tol)


def _float_digits():
    raw = os.environ.get("TRIFUN_FLOAT_DIGITS", "17")
    try:
        digits = int(raw)
    except ValueError:
        digits = 17
    return min(max(digits, 1), 17)


def format_float(x, digits=None):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    digits = _float_digits() if digits is None else digits
    return format(x, f".{digits - 1}e")


def scalar_value(x):
    """JSON-ready scalar: float, or ``[re, im]`` for complex values."""
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return float(x)


def matrix_document(M):
    """Full-grid JSON document of a LowerTriangular in its original orientation."""
    dense = M.oriented_dense()
    return {
        "dim": M.dim,
        "orientation": "upper" if M.transposed else "lower",
        "entries": [[scalar_value(x) for x in row] for row in dense],
    }


def _dump(obj, digits, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj, digits))
    elif isinstance(obj, (complex, np.complexfloating)):
        _dump(scalar_value(obj), digits, out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)) + ":")
            _dump(obj[key], digits, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _dump(item, digits, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, digits=None):
    """Deterministic JSON: sorted keys, floats in fixed scientific notation."""
    digits = _float_digits() if digits is None else digits
    out = []
    _dump(obj, digits, out)
    return "".join(out)
