"""Exact digital topology: components, Euler characteristic, Betti numbers."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from . import _bitcodes
from .exceptions import DomainError
from .volume import as_volume, config_to_patch, pad_background

_STRUCTURES = {
    6: ndimage.generate_binary_structure(3, 1),
    26: ndimage.generate_binary_structure(3, 3),
}


@dataclass(frozen=True)
class TopologyReport:
    beta0: int
    beta1: int
    beta2: int
    chi: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @property
    def betti(self) -> tuple[int, int, int]:
        return (self.beta0, self.beta1, self.beta2)


@dataclass(frozen=True)
class ComplexCounts:
    v: int
    e: int
    f: int
    oct: int

    @property
    def euler(self) -> int:
        return self.v - self.e + self.f - self.oct


def label_components(v, connectivity: int = 26, target: str = "foreground"):
    """Label the n-connected components of the foreground or background.

    Returns ``(labels, count)``; voxels outside the target set get label 0.
    """
    if connectivity not in _STRUCTURES:
        raise DomainError(f"connectivity must be 6 or 26, not {connectivity}")
    if target not in ("foreground", "background"):
        raise DomainError(f"target must be 'foreground' or 'background', not {target!r}")
    arr = as_volume(v) != 0
    if target == "background":
        arr = ~arr
    labels, count = ndimage.label(arr, structure=_STRUCTURES[connectivity])
    return labels, int(count)


def complex_counts(v) -> ComplexCounts:
    """Vertices, edges, faces and octants spanned by the value-1 set under 6-adjacency."""
    a = as_volume(v).astype(bool)
    edges = (a[1:] & a[:-1]).sum() + (a[:, 1:] & a[:, :-1]).sum() + (a[:, :, 1:] & a[:, :, :-1]).sum()
    faces = (
        (a[1:, 1:] & a[:-1, 1:] & a[1:, :-1] & a[:-1, :-1]).sum()
        + (a[1:, :, 1:] & a[:-1, :, 1:] & a[1:, :, :-1] & a[:-1, :, :-1]).sum()
        + (a[:, 1:, 1:] & a[:, :-1, 1:] & a[:, 1:, :-1] & a[:, :-1, :-1]).sum()
    )
    octants = np.ones_like(a[1:, 1:, 1:])
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                octants &= a[dx : a.shape[0] - 1 + dx, dy : a.shape[1] - 1 + dy, dz : a.shape[2] - 1 + dz]
    return ComplexCounts(int(a.sum()), int(edges), int(faces), int(octants.sum()))


def euler_characteristic(v) -> int:
    """Euler characteristic of the 26-connected foreground.

    Computed from the 6-connected background of the volume padded with one
    background layer: ``G26(S) = G6(background) - 1``.
    """
    background = 1 - pad_background(as_volume(v) != 0, 1).astype(np.uint8)
    return complex_counts(background).euler - 1


def betti_numbers(v) -> TopologyReport:
    arr = as_volume(v) != 0
    chi = euler_characteristic(arr)
    _, beta0 = label_components(arr, 26, "foreground")
    padded = pad_background(arr, 1)
    labels, n_background = label_components(padded, 6, "background")
    # the pad shell is one component; every other background component is a cavity
    beta2 = n_background - 1
    return TopologyReport(beta0, beta0 + beta2 - chi, beta2, chi)


def is_simple_exact(cfg: int) -> bool:
    """Whether deleting the center of neighborhood ``cfg`` keeps the object count and genus.

    Builds the 3x3x3 patch with the center set and cleared, and compares the
    number of 26-components touching the center and the Euler characteristic.
    """
    with_center = config_to_patch(cfg)
    without_center = with_center.copy()
    without_center[1, 1, 1] = 0
    # every patch voxel is 26-adjacent to the center, so after deletion all
    # remaining components count; before deletion the center joins them into one
    _, after = label_components(without_center, 26)
    before = 1
    if after != before:
        return False
    return euler_characteristic(with_center) == euler_characteristic(without_center)


def is_endpoint(cfg: int) -> bool:
    return int(cfg).bit_count() <= 1


def simple_codes(codes) -> np.ndarray:
    """Exact simple-point test for many codes at once (compiled)."""
    return _bitcodes.simple_codes(codes)
