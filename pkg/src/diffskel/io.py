"""Raw volume files: a JSON header next to a little-endian raw payload.

``<name>.json`` holds ``{"shape": [nx, ny, nz], "dtype": "u8" | "f32",
"order": "x-fastest"}`` and ``<name>.raw`` holds exactly ``nx*ny*nz``
elements, x varying fastest. ``u8`` files are binary volumes and may only
contain 0 and 1; ``f32`` files are probability volumes in [0, 1].
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exceptions import DomainError, FormatError
from .volume import BinaryVolume, ProbabilityVolume, as_volume

_DTYPES = {"u8": np.dtype("<u1"), "f32": np.dtype("<f4")}


def volume_paths(path) -> tuple[Path, Path]:
    """Header and raw paths for ``path`` given with or without an extension."""
    path = Path(path)
    base = path.with_suffix("") if path.suffix in (".json", ".raw") else path
    return base.with_name(base.name + ".json"), base.with_name(base.name + ".raw")


def write_volume(v, path) -> Path:
    """Write a binary or probability volume; returns the header path."""
    if isinstance(v, BinaryVolume):
        data, dtype = v.data, "u8"
    elif isinstance(v, ProbabilityVolume):
        data, dtype = v.data, "f32"
    else:
        arr = as_volume(v)
        if arr.dtype.kind in "biu" or arr.dtype == bool:
            data, dtype = BinaryVolume(arr).data, "u8"
        else:
            data, dtype = ProbabilityVolume(arr).data, "f32"
    header_path, raw_path = volume_paths(path)
    header = {"shape": [int(s) for s in data.shape], "dtype": dtype, "order": "x-fastest"}
    header_path.write_text(json.dumps(header, indent=2) + "\n")
    raw_path.write_bytes(np.asarray(data, dtype=_DTYPES[dtype]).tobytes(order="F"))
    return header_path


def read_volume(path) -> BinaryVolume | ProbabilityVolume:
    header_path, raw_path = volume_paths(path)
    try:
        header = json.loads(header_path.read_text())
    except FileNotFoundError as exc:
        raise FormatError(f"{header_path}: header file not found") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{header_path}: header is not valid JSON ({exc.msg})") from exc

    shape = header.get("shape")
    dtype = header.get("dtype")
    order = header.get("order", "x-fastest")
    if (
        not isinstance(shape, list)
        or len(shape) != 3
        or not all(isinstance(s, int) and s > 0 for s in shape)
    ):
        raise FormatError(f"{header_path}: shape must be three positive integers, got {shape!r}")
    if dtype not in _DTYPES:
        raise FormatError(f"{header_path}: dtype must be 'u8' or 'f32', got {dtype!r}")
    if order != "x-fastest":
        raise FormatError(f"{header_path}: unsupported order {order!r}")

    try:
        raw = raw_path.read_bytes()
    except FileNotFoundError as exc:
        raise FormatError(f"{raw_path}: raw file not found") from exc
    np_dtype = _DTYPES[dtype]
    expected = int(np.prod(shape)) * np_dtype.itemsize
    if len(raw) != expected:
        raise FormatError(
            f"{raw_path}: expected {expected} bytes for shape {shape} {dtype}, found {len(raw)}"
        )
    data = np.frombuffer(raw, dtype=np_dtype).reshape(shape, order="F")
    try:
        if dtype == "u8":
            return BinaryVolume(data)
        return ProbabilityVolume(data)
    except DomainError as exc:
        raise FormatError(f"{raw_path}: {exc}") from exc
