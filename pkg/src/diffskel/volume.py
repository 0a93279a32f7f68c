"""Volume containers and lattice geometry.

Arrays are indexed ``[x, y, z]``. When a volume is flattened (raw files,
neighborhood codes) the x index varies fastest, which is numpy's Fortran
order for this indexing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

#: The eight subfields, in the order the peeler cycles through them.
SUBFIELDS: tuple[tuple[int, int, int], ...] = tuple(itertools.product((0, 1), repeat=3))

#: Offsets of the 26 neighbors in raster order (x fastest), center skipped.
#: Row ``k`` is the neighbor encoded by bit ``k`` of a neighborhood code.
NEIGHBOR_OFFSETS = np.array(
    [
        (dx, dy, dz)
        for dz in (-1, 0, 1)
        for dy in (-1, 0, 1)
        for dx in (-1, 0, 1)
        if (dx, dy, dz) != (0, 0, 0)
    ],
    dtype=np.int64,
)

#: Offsets of the full 3x3x3 patch in raster order, center at position 13.
PATCH_OFFSETS = np.array(
    [(dx, dy, dz) for dz in (-1, 0, 1) for dy in (-1, 0, 1) for dx in (-1, 0, 1)],
    dtype=np.int64,
)
CENTER = 13
N_CONFIGS = 1 << 26


def _offset_order(offset) -> int:
    """Smallest n in {6, 18, 26} such that ``offset`` is an n-neighbor offset."""
    manhattan = int(np.abs(offset).sum())
    return {1: 6, 2: 18, 3: 26}[manhattan]


def patch_index(dx: int, dy: int, dz: int) -> int:
    """Flat raster position of an offset inside a 3x3x3 patch."""
    return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1)


@dataclass(frozen=True)
class BinaryVolume:
    """Immutable {0, 1} lattice. Foreground is 26-connected, background 6-connected."""

    data: np.ndarray
    foreground_connectivity: int = field(default=26, init=False)
    background_connectivity: int = field(default=6, init=False)

    def __post_init__(self):
        data = as_volume(self.data)
        if data.size and not np.isin(data, (0, 1)).all():
            raise DomainError("binary volume holds values other than 0 and 1")
        data = data.astype(np.uint8)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, BinaryVolume):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))


@dataclass(frozen=True)
class ProbabilityVolume:
    """Immutable lattice of per-voxel foreground probabilities in [0, 1], stored as float32."""

    data: np.ndarray

    def __post_init__(self):
        data = as_volume(self.data).astype(np.float32)
        if data.size and not (np.isfinite(data).all() and data.min() >= 0.0 and data.max() <= 1.0):
            raise DomainError("probability volume holds values outside [0, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityVolume):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))


def as_volume(v) -> np.ndarray:
    """Return ``v`` as a 3D array; 2D images are embedded with ``nz = 1``."""
    arr = np.asarray(v)
    if arr.ndim == 2:
        arr = arr[:, :, np.newaxis]
    if arr.ndim != 3:
        raise DomainError(f"expected a 2D or 3D volume, got {arr.ndim} dimensions")
    return arr


def neighbors(p, order: int, shape) -> list[tuple[int, int, int]]:
    """In-bounds n-neighbors of lattice point ``p`` (``p`` itself excluded)."""
    if order not in (6, 18, 26):
        raise DomainError(f"neighborhood order must be 6, 18 or 26, not {order}")
    p = tuple(int(c) for c in p)
    shape = tuple(int(s) for s in shape)
    if len(p) != 3 or len(shape) != 3:
        raise DomainError("points and shapes must be 3D")
    if any(c < 0 or c >= s for c, s in zip(p, shape)):
        raise DomainError(f"point {p} lies outside shape {shape}")
    out = []
    for off in NEIGHBOR_OFFSETS:
        if _offset_order(off) > order:
            continue
        q = tuple(c + int(d) for c, d in zip(p, off))
        if all(0 <= c < s for c, s in zip(q, shape)):
            out.append(q)
    return out


def subfield_mask(sf, shape) -> np.ndarray:
    """Indicator of the points ``(x+i, y+j, z+k)`` with even ``x, y, z``."""
    i, j, k = (int(c) for c in sf)
    if not {i, j, k} <= {0, 1}:
        raise DomainError(f"subfield ids are 0/1 triples, got {sf}")
    mask = np.zeros(tuple(int(s) for s in shape), dtype=np.uint8)
    mask[i::2, j::2, k::2] = 1
    return mask


def pad_background(v, layers: int) -> np.ndarray:
    """Surround ``v`` with ``layers`` voxels of background on every side."""
    if layers < 0:
        raise DomainError("layers must be non-negative")
    return np.pad(as_volume(v), int(layers), mode="constant", constant_values=0)


def config_to_patch(code: int) -> np.ndarray:
    """Decode a 26-bit neighborhood code into a 3x3x3 patch with center 1."""
    code = int(code)
    if not 0 <= code < N_CONFIGS:
        raise DomainError(f"neighborhood code {code} outside [0, 2**26)")
    patch = np.ones((3, 3, 3), dtype=np.uint8)
    for k, (dx, dy, dz) in enumerate(NEIGHBOR_OFFSETS):
        patch[dx + 1, dy + 1, dz + 1] = (code >> k) & 1
    return patch


def patch_to_config(patch) -> int:
    """Encode the 26 neighbors of a 3x3x3 patch; the center value is ignored."""
    patch = np.asarray(patch)
    if patch.shape != (3, 3, 3):
        raise DomainError(f"patch must be 3x3x3, got {patch.shape}")
    code = 0
    for k, (dx, dy, dz) in enumerate(NEIGHBOR_OFFSETS):
        if patch[dx + 1, dy + 1, dz + 1]:
            code |= 1 << k
    return code


def decode_configs(codes, dtype=np.float32) -> np.ndarray:
    """Vectorized decode of neighborhood codes to flat (N, 27) patches, center = 1."""
    codes = np.asarray(codes, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(26, dtype=np.int64)) & 1
    out = np.ones((codes.shape[0], 27), dtype=dtype)
    out[:, :CENTER] = bits[:, :CENTER]
    out[:, CENTER + 1 :] = bits[:, CENTER:]
    return out


def neighborhood_codes(v) -> np.ndarray:
    """Per-voxel 26-bit neighborhood code (zero padding outside the lattice)."""
    v = as_volume(v).astype(np.int64)
    padded = np.pad(v, 1)
    nx, ny, nz = v.shape
    codes = np.zeros(v.shape, dtype=np.int64)
    for k, (dx, dy, dz) in enumerate(NEIGHBOR_OFFSETS):
        codes |= padded[1 + dx : 1 + dx + nx, 1 + dy : 1 + dy + ny, 1 + dz : 1 + dz + nz] << k
    return codes


def gather_patches(v, points, dtype=np.float32) -> np.ndarray:
    """Flat (N, 27) raster patches of ``v`` around integer ``points`` of shape (N, 3)."""
    padded = np.pad(as_volume(v), 1)
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 3) + 1
    idx = pts[:, None, :] + PATCH_OFFSETS[None, :, :]
    return padded[idx[..., 0], idx[..., 1], idx[..., 2]].astype(dtype)
