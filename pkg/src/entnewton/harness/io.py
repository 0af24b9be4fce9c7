"""JSON/CSV persistence with atomic writes.

Floats are written with ``repr`` (shortest round-trip form), so a save/load
cycle reproduces every finite double bitwise.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from ..errors import ParseError, VersionError
from ..kernel import ProblemInstance

SCHEMA_VERSION = 1
_INSTANCE_FIELDS = ("n", "d", "A", "b", "w", "gamma", "l", "R")


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=1, allow_nan=False) + "\n"


def instance_to_dict(problem: ProblemInstance) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": problem.n,
        "d": problem.d,
        "A": problem.A.tolist(),
        "b": problem.b.tolist(),
        "w": problem.w.tolist(),
        "gamma": problem.gamma,
        "l": problem.l,
        "R": problem.R,
        "metadata": _jsonable(problem.metadata),
    }


def _parse_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", line=exc.lineno) from exc


def _float_array(obj, name, shape):
    try:
        arr = np.array(obj, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {name!r} is not numeric", field=name) from exc
    if arr.shape != shape:
        raise ParseError(f"field {name!r} has shape {arr.shape}, expected {shape}", field=name)
    return arr


def instance_from_dict(obj) -> ProblemInstance:
    if not isinstance(obj, dict):
        raise ParseError("instance must be a JSON object")
    version = obj.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise VersionError(f"schema_version {version!r} unsupported (expected {SCHEMA_VERSION})")
    for key in _INSTANCE_FIELDS:
        if key not in obj:
            raise ParseError(f"missing field {key!r}", field=key)
    try:
        n, d = int(obj["n"]), int(obj["d"])
    except (TypeError, ValueError) as exc:
        raise ParseError("n and d must be integers", field="n") from exc
    A = _float_array(obj["A"], "A", (n, d))
    b = _float_array(obj["b"], "b", (n,))
    w = _float_array(obj["w"], "w", (n,))
    scalars = {}
    for key in ("gamma", "l", "R"):
        try:
            scalars[key] = float(obj[key])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"field {key!r} is not a number", field=key) from exc
    meta = obj.get("metadata") or {}
    if not isinstance(meta, dict):
        raise ParseError("metadata must be an object", field="metadata")
    return ProblemInstance(A=A, b=b, w=w, metadata=meta, **scalars)


def save_instance(problem: ProblemInstance, path) -> Path:
    return atomic_write(path, dumps(instance_to_dict(problem)))


def load_instance(path) -> ProblemInstance:
    path = Path(path)
    return instance_from_dict(_parse_json(path.read_text(encoding="utf-8"), str(path)))


def read_matrix_csv(path) -> np.ndarray:
    """Matrix CSV: a header ``n,d`` followed by n rows of d numbers."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file", line=1)
    try:
        n, d = (int(v) for v in rows[0])
    except ValueError as exc:
        raise ParseError(f"{path}: header must be 'n,d'", line=1) from exc
    body = [r for r in rows[1:] if r]
    if len(body) != n:
        raise ParseError(f"{path}: expected {n} rows, found {len(body)}", line=len(rows))
    out = np.empty((n, d))
    for i, row in enumerate(body):
        if len(row) != d:
            raise ParseError(f"{path}: row has {len(row)} fields, expected {d}", line=i + 2)
        try:
            out[i] = [float(v) for v in row]
        except ValueError as exc:
            raise ParseError(f"{path}: non-numeric entry", line=i + 2) from exc
    return out


def write_matrix_csv(A, path) -> Path:
    A = np.asarray(A, dtype=np.float64)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(A.shape)
    for row in A:
        wr.writerow([repr(float(v)) for v in row])
    return atomic_write(path, buf.getvalue())


def save_json(obj, path) -> Path:
    return atomic_write(path, dumps(obj))


def load_json(path):
    path = Path(path)
    return _parse_json(path.read_text(encoding="utf-8"), str(path))


def save_trace(trace, path) -> Path:
    """CSV when the suffix is .csv, JSON otherwise."""
    path = Path(path)
    text = trace.to_csv() if path.suffix == ".csv" else trace.to_json() + "\n"
    return atomic_write(path, text)
