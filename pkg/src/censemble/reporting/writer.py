"""Result files: JSON documents with a meta block, CSV tables and matrix interchange."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog

from censemble import __version__
from censemble.errors import InvalidInputError

log = structlog.get_logger()

SCHEMA_VERSION = 1
MATRIX_MAGIC = b"CENSMAT1"
_HEADER = np.dtype("<u8")
_ENTRY = np.dtype("<c16")


def _canonical(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True, default=str)


def input_hash(payload: Any) -> str:
    """sha256 of the canonical JSON form of the run inputs."""
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()


def build_meta(
    command: str,
    *,
    config: dict[str, Any],
    seed: int | None,
    formula: str | None = None,
    inputs: Any = None,
) -> dict[str, Any]:
    """Meta block embedded in every output; carries no timestamp so reruns are identical."""
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "censemble",
        "tool_version": __version__,
        "command": command,
        "formula": formula,
        "seed": seed,
        "config": config,
        "input_hash": input_hash(config if inputs is None else inputs),
    }


def write_json(output_path: Path, payload: Any, *, meta: dict[str, Any]) -> Path:
    output_path.parent.mkdir(parents=True, exist_ok=True)
    document = {"meta": meta, "result": payload}
    output_path.write_text(
        json.dumps(document, indent=2, ensure_ascii=True, default=str) + "\n", encoding="utf-8"
    )
    log.info("output.written", path=str(output_path), format="json")
    return output_path


def write_table(
    output_path: Path,
    frame: pd.DataFrame,
    *,
    meta: dict[str, Any],
    fmt: Literal["json", "csv"] = "csv",
) -> Path:
    """Write a table as CSV (meta in a ``.meta.json`` sidecar) or as JSON records."""
    output_path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        frame.to_csv(output_path, index=False)
        sidecar = output_path.with_suffix(".meta.json")
        sidecar.write_text(json.dumps(meta, indent=2, ensure_ascii=True, default=str) + "\n", encoding="utf-8")
        log.info("output.written", path=str(output_path), format="csv", rows=len(frame))
        return output_path
    if fmt == "json":
        return write_json(output_path, frame.to_dict(orient="records"), meta=meta)
    raise InvalidInputError(f"unknown output format {fmt!r}")


def write_matrix(output_path: Path, matrix: npt.ArrayLike) -> Path:
    """Binary matrix: 8-byte magic, LE uint64 rows and cols, LE complex128 row-major."""
    data = np.asarray(matrix, dtype=np.complex128)
    if data.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got shape {data.shape}")
    output_path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array(data.shape, dtype=_HEADER).tobytes()
    body = np.ascontiguousarray(data, dtype=_ENTRY).tobytes()
    output_path.write_bytes(MATRIX_MAGIC + header + body)
    log.debug("matrix.written", path=str(output_path), shape=data.shape)
    return output_path


def read_matrix(input_path: Path) -> npt.NDArray[np.complex128]:
    raw = input_path.read_bytes()
    if raw[: len(MATRIX_MAGIC)] != MATRIX_MAGIC:
        raise InvalidInputError(f"{input_path} is not a matrix file (bad magic)")
    offset = len(MATRIX_MAGIC)
    rows, cols = (int(x) for x in np.frombuffer(raw, dtype=_HEADER, count=2, offset=offset))
    offset += 2 * _HEADER.itemsize
    expected = rows * cols * _ENTRY.itemsize
    if len(raw) - offset != expected:
        raise InvalidInputError(
            f"{input_path}: header says {rows}×{cols} but payload has {len(raw) - offset} bytes"
        )
    data = np.frombuffer(raw, dtype=_ENTRY, offset=offset).reshape(rows, cols)
    return data.astype(np.complex128)


def write_matrix_csv(output_path: Path, matrix: npt.ArrayLike) -> Path:
    """Sparse-style CSV ``row,col,re,im`` listing every entry."""
    data = np.asarray(matrix, dtype=np.complex128)
    rows, cols = np.indices(data.shape)
    frame = pd.DataFrame(
        {
            "row": rows.ravel(),
            "col": cols.ravel(),
            "re": data.real.ravel(),
            "im": data.imag.ravel(),
        }
    )
    output_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output_path, index=False)
    return output_path


def read_matrix_csv(input_path: Path) -> npt.NDArray[np.complex128]:
    frame = pd.read_csv(input_path)
    missing = {"row", "col", "re", "im"} - set(frame.columns)
    if missing:
        raise InvalidInputError(f"{input_path} lacks columns {sorted(missing)}")
    shape = (int(frame["row"].max()) + 1, int(frame["col"].max()) + 1)
    data = np.zeros(shape, dtype=np.complex128)
    data[frame["row"].to_numpy(), frame["col"].to_numpy()] = frame["re"].to_numpy() + 1j * frame["im"].to_numpy()
    return data
