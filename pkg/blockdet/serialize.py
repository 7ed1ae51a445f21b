"""JSON interchange for matrices, block matrices, scalar arrays and floats.

Dense matrix::

    {"rows": 2, "cols": 2, "entries": [2.0, 1.0, [1.0, -0.5], 2.0]}

Entries are row-major; a plain number is a real entry and ``[re, im]`` a
complex one. Real matrices are written with plain numbers. Floats use
Python's shortest round-trip repr, so decode(encode(x)) is bit-exact.

Block matrix::

    {"n": 2, "p": 1, "q": 1, "blocks": [[matrix, matrix], [matrix, matrix]]}

Scalar array (inputs of lemma23 and coro24)::

    {"values": [[1.5, 2.0], [3.0, 1.0]]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Union

import numpy as np
from blake3 import blake3

from .block import BlockMatrix
from .dense import DTYPE, is_real
from .errors import BlockdetError, ParseError

class ScalarArray(np.ndarray):
    """Real array decoded from a ``values`` document."""


Input = Union[np.ndarray, BlockMatrix]

_NON_FINITE = {"Infinity": math.inf, "-Infinity": -math.inf, "NaN": math.nan}


def encode_float(x: float) -> Any:
    """A JSON-safe float: non-finite values become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "NaN"
    return "Infinity" if x > 0 else "-Infinity"


def decode_float(x: Any) -> float:
    if isinstance(x, str):
        try:
            return _NON_FINITE[x]
        except KeyError:
            raise ParseError(f"not a number: {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"not a number: {x!r}")
    return float(x)


def matrix_to_dict(a: np.ndarray) -> dict:
    rows, cols = a.shape
    flat = a.reshape(-1)
    if is_real(a):
        entries = [float(z.real) for z in flat]
    else:
        entries = [[float(z.real), float(z.imag)] for z in flat]
    return {"rows": rows, "cols": cols, "entries": entries}


def _entry(value: Any) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ParseError(f"complex entry must be [re, im], got {value!r}")
        return complex(decode_float(value[0]), decode_float(value[1]))
    return complex(decode_float(value), 0.0)


def matrix_from_dict(doc: Any) -> np.ndarray:
    try:
        rows, cols, entries = int(doc["rows"]), int(doc["cols"]), doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix document: {exc}") from None
    if rows < 1 or cols < 1 or not isinstance(entries, list) or len(entries) != rows * cols:
        raise ParseError(f"matrix needs {rows}x{cols} entries, got {len(entries) if isinstance(entries, list) else entries!r}")
    values = np.array([_entry(v) for v in entries], dtype=DTYPE)
    if not np.all(np.isfinite(values)):
        raise ParseError("matrix entries must be finite")
    return values.reshape(rows, cols)


def block_to_dict(a: BlockMatrix) -> dict:
    return {
        "n": a.n,
        "p": a.p,
        "q": a.q,
        "blocks": [[matrix_to_dict(b) for b in row] for row in a.blocks],
    }


def block_from_dict(doc: Any) -> BlockMatrix:
    try:
        n, p, q, blocks = int(doc["n"]), int(doc["p"]), int(doc["q"]), doc["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed block matrix document: {exc}") from None
    try:
        grid = tuple(tuple(matrix_from_dict(b) for b in row) for row in blocks)
        return BlockMatrix(n, p, q, grid)
    except BlockdetError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid block matrix: {exc}") from None


def array_to_dict(values: np.ndarray) -> dict:
    return {"values": [[float(x) for x in row] for row in np.atleast_2d(values)]}


def array_from_dict(doc: Any) -> np.ndarray:
    try:
        values = doc["values"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed array document: {exc}") from None
    if not isinstance(values, list) or not values:
        raise ParseError("array values must be a non-empty list")
    if not isinstance(values[0], list):
        values = [values]
    width = len(values[0])
    if width == 0 or any(not isinstance(row, list) or len(row) != width for row in values):
        raise ParseError("array rows must be non-empty lists of equal length")
    arr = np.array([[decode_float(x) for x in row] for row in values], dtype=np.float64)
    return arr.view(ScalarArray)


def input_to_dict(value: Input) -> dict:
    if isinstance(value, BlockMatrix):
        return block_to_dict(value)
    if np.iscomplexobj(value):
        return matrix_to_dict(value)
    return array_to_dict(value)


def input_from_dict(doc: Any) -> Input:
    """Decode any of the three document kinds by its keys."""
    if not isinstance(doc, dict):
        raise ParseError(f"expected a JSON object, got {type(doc).__name__}")
    if "blocks" in doc:
        return block_from_dict(doc)
    if "entries" in doc:
        return matrix_from_dict(doc)
    if "values" in doc:
        return array_from_dict(doc)
    raise ParseError(f"unrecognised document with keys {sorted(doc)}")


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads(text)


def load_input(path: str | Path) -> Input:
    return input_from_dict(load_json(path))


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(doc: Any, path: str | Path | None) -> str:
    """Write ``doc`` to ``path``; returns the text so callers can print it."""
    text = dumps(doc)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def inputs_digest(inputs: Iterable[Any]) -> str:
    """BLAKE3 digest over the shapes and raw bytes of the inputs."""
    hasher = blake3()
    for value in inputs:
        if isinstance(value, BlockMatrix):
            hasher.update(f"B{value.n},{value.p},{value.q};".encode())
            for row in value.blocks:
                for blk in row:
                    hasher.update(np.ascontiguousarray(blk, dtype=DTYPE).tobytes())
        else:
            arr = np.ascontiguousarray(value)
            hasher.update(f"{arr.dtype.str}{arr.shape};".encode())
            hasher.update(arr.tobytes())
    return hasher.hexdigest()
