"""
Byte-stable encoders shared by the artifact repositories.
"""

import csv
import hashlib
import io
import json
from enum import Enum
from typing import Any, Sequence, Tuple

import numpy as np
from pydantic import BaseModel


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="python")
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[float(z.real), float(z.imag)] for z in value.ravel()]
        return value.tolist()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def canonical_json(payload: Any) -> bytes:
    """Sorted keys, fixed separators, shortest round-trip floats, trailing newline."""
    text = json.dumps(
        payload,
        default=_jsonable,
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
        allow_nan=False,
    )
    return (text + "\n").encode("utf-8")


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return f"{float(value.real)!r}{float(value.imag):+}j"
    return str(value)


def csv_bytes(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row length does not match the header")
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue().encode("utf-8")


def array_bytes(array: np.ndarray) -> Tuple[bytes, bytes]:
    """(JSON header, raw bytes) with column-major layout."""
    data = np.asarray(array)
    header = canonical_json({"shape": list(data.shape), "dtype": data.dtype.str, "layout": "F"})
    return header, data.tobytes(order="F")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
