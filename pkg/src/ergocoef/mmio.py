"""Matrix files: Matrix Market array format, CSV and JSON.

Matrix Market ``array`` files list entries column by column; complex
files hold ``re im`` pairs.  JSON files are objects with ``rows``,
``cols`` and a row-major ``data`` list in which complex entries are
``[re, im]`` pairs.  Floats are written with ``repr`` so a parse of a
written file gives back identical bits.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError

FORMATS = ("matrix_market_array", "csv", "json")
_SUFFIX = {".mtx": "matrix_market_array", ".mm": "matrix_market_array",
           ".csv": "csv", ".json": "json"}


def detect_format(path) -> str:
    fmt = _SUFFIX.get(Path(path).suffix.lower())
    if fmt is None:
        raise ValidationError(f"cannot infer matrix format from {path!s}; use .mtx, .csv or .json")
    return fmt


def _float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ValidationError(f"not a number: {tok!r}") from None


def parse_matrix_market(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise ValidationError("missing %%MatrixMarket header")
    header = lines[0].lower().split()
    if len(header) != 5 or header[1] != "matrix" or header[2] != "array":
        raise ValidationError("only '%%MatrixMarket matrix array <field> general' is supported")
    field, symmetry = header[3], header[4]
    if field not in ("real", "complex", "integer", "double") or symmetry != "general":
        raise ValidationError(f"unsupported field/symmetry: {field} {symmetry}")
    body = [ln.strip() for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ValidationError("missing size line")
    size = body[0].split()
    if len(size) != 2:
        raise ValidationError("size line must be 'rows cols'")
    rows, cols = int(size[0]), int(size[1])
    if rows < 1 or cols < 1:
        raise ValidationError("matrix dimensions must be positive")
    entries = body[1:]
    if len(entries) != rows * cols:
        raise ValidationError(f"expected {rows * cols} entries, found {len(entries)}")
    if field == "complex":
        vals = []
        for ln in entries:
            parts = ln.split()
            if len(parts) != 2:
                raise ValidationError("complex entries need 're im'")
            vals.append(complex(_float(parts[0]), _float(parts[1])))
        flat = np.array(vals, dtype=complex)
    else:
        flat = np.array([_float(ln.split()[0]) for ln in entries])
    return flat.reshape((cols, rows)).T.copy()


def _fmt(x: float) -> str:
    return repr(float(x))


def format_matrix_market(A) -> str:
    A = np.asarray(A)
    cplx = np.iscomplexobj(A) and bool(np.any(A.imag != 0))
    field = "complex" if cplx else "real"
    out = [f"%%MatrixMarket matrix array {field} general", f"{A.shape[0]} {A.shape[1]}"]
    for v in A.T.ravel():
        out.append(f"{_fmt(v.real)} {_fmt(v.imag)}" if cplx else _fmt(np.real(v)))
    return "\n".join(out) + "\n"


def parse_csv(text: str) -> np.ndarray:
    rows = []
    for ln in text.splitlines():
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        rows.append([_float(tok.strip()) for tok in ln.split(",")])
    if not rows:
        raise ValidationError("empty CSV matrix")
    if len({len(r) for r in rows}) != 1:
        raise ValidationError("CSV rows have different lengths")
    return np.array(rows, dtype=float)


def format_csv(A) -> str:
    A = np.asarray(A)
    if np.iscomplexobj(A) and np.any(A.imag != 0):
        raise ValidationError("CSV holds real matrices only")
    return "".join(",".join(_fmt(v) for v in row) + "\n" for row in np.real(A))


def parse_json(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise ValidationError("JSON matrix needs 'rows', 'cols' and 'data'")
    rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise ValidationError("JSON 'data' length does not match rows * cols")
    vals = []
    cplx = False
    for v in data:
        if isinstance(v, list):
            if len(v) != 2:
                raise ValidationError("complex entries are [re, im] pairs")
            vals.append(complex(float(v[0]), float(v[1])))
            cplx = True
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            vals.append(float(v))
        else:
            raise ValidationError(f"bad matrix entry {v!r}")
    return np.array(vals, dtype=complex if cplx else float).reshape(rows, cols)


def format_json(A) -> str:
    A = np.asarray(A)
    cplx = np.iscomplexobj(A) and bool(np.any(A.imag != 0))
    data = [[float(v.real), float(v.imag)] if cplx else float(np.real(v)) for v in A.ravel()]
    return json.dumps({"rows": A.shape[0], "cols": A.shape[1], "data": data}) + "\n"


_PARSERS = {"matrix_market_array": parse_matrix_market, "csv": parse_csv, "json": parse_json}
_WRITERS = {"matrix_market_array": format_matrix_market, "csv": format_csv, "json": format_json}


def parse_matrix(text: str, fmt: str) -> np.ndarray:
    if fmt not in _PARSERS:
        raise ValidationError(f"unknown format {fmt!r}")
    return _PARSERS[fmt](text)


def format_matrix(A, fmt: str) -> str:
    if fmt not in _WRITERS:
        raise ValidationError(f"unknown format {fmt!r}")
    return _WRITERS[fmt](A)


def read_matrix(path, fmt: str | None = None) -> tuple[np.ndarray, str]:
    """Load a matrix file; returns ``(matrix, sha256 hex digest of the file bytes)``."""
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ValidationError(f"{path!s} is not UTF-8 text") from None
    A = parse_matrix(text, fmt or detect_format(path))
    return A, hashlib.sha256(raw).hexdigest()


def write_matrix(path, A, fmt: str | None = None) -> None:
    Path(path).write_text(format_matrix(A, fmt or detect_format(path)))


def read_vector(path) -> np.ndarray:
    """A vector stored as an n x 1 or 1 x n matrix file."""
    A, _ = read_matrix(path)
    if 1 not in A.shape:
        raise ValidationError(f"{path!s} does not hold a vector")
    return A.ravel()
