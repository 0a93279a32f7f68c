"""Iterative boundary peeling over the eight subfields."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .detectors import PatchField, VolumeField, endpoint, simple_candidates
from .exceptions import DomainError
from .kernels import kernel_bank
from .volume import SUBFIELDS, as_volume, gather_patches, subfield_mask

logger = logging.getLogger(__name__)

_FACE_NEIGHBORS = ndimage.generate_binary_structure(3, 1)


@dataclass(frozen=True)
class PeelConfig:
    """Peeling options.

    ``iterations`` is either a non-negative number of outer iterations or
    ``"auto"``, which repeats until a full pass over the subfields deletes
    nothing.
    """

    detector: str = "boolean"
    iterations: int | str = "auto"
    preserve_endpoints: bool = True

    def __post_init__(self):
        kernel_bank(self.detector)
        if self.iterations != "auto":
            if isinstance(self.iterations, bool) or not isinstance(self.iterations, (int, np.integer)):
                raise DomainError(f"iterations must be an integer or 'auto', got {self.iterations!r}")
            if self.iterations < 0:
                raise DomainError("iterations must be non-negative")

    @property
    def until_stable(self) -> bool:
        return self.iterations == "auto"


def _binary_volume(v) -> np.ndarray:
    arr = as_volume(v)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DomainError("expected a binary volume")
    return arr.astype(np.uint8)


def peel_subiteration(v, sf, cfg: PeelConfig = PeelConfig()):
    """Delete, all at once, the simple non-endpoint foreground voxels of subfield ``sf``.

    Returns ``(new_volume, deleted_count)``.
    """
    x = _binary_volume(v)
    i, j, k = sf
    # a voxel without a background face neighbor is never simple under
    # either detector, so only border voxels are examined
    interior = ndimage.binary_erosion(x, _FACE_NEIGHBORS, border_value=0)
    border = (x == 1) & ~interior
    sub = border[i::2, j::2, k::2]
    points = np.argwhere(sub) * 2 + np.array([i, j, k])
    if len(points) == 0:
        return x.copy(), 0
    field = PatchField(gather_patches(x, points))
    deletable = simple_candidates(field, cfg.detector)
    if cfg.preserve_endpoints:
        deletable = deletable * (1 - endpoint(field))
    doomed = points[deletable > 0.5]
    out = x.copy()
    out[doomed[:, 0], doomed[:, 1], doomed[:, 2]] = 0
    return out, int(len(doomed))


def peel_step(x, sf, cfg: PeelConfig = PeelConfig()):
    """One subiteration written with whole-volume kernels.

    Works on numpy arrays and on gradient-tape variables alike; on binary
    input it deletes exactly what :func:`peel_subiteration` deletes.
    """
    # leading axes, if any, are a batch of volumes
    mask = subfield_mask(sf, x.shape[-3:]).astype(np.float64)
    field = VolumeField(x, cleared=mask)
    deletable = simple_candidates(field, cfg.detector) * mask
    if cfg.preserve_endpoints:
        deletable = deletable * (1 - endpoint(field))
    return x - deletable


def skeletonize(v, cfg: PeelConfig = PeelConfig()) -> np.ndarray:
    """Peel ``v`` subfield by subfield in lexicographic order."""
    x = _binary_volume(v)
    iteration = 0
    while cfg.until_stable or iteration < cfg.iterations:
        deleted = 0
        for sf in SUBFIELDS:
            x, n = peel_subiteration(x, sf, cfg)
            deleted += n
        iteration += 1
        logger.debug("outer iteration %d deleted %d voxels", iteration, deleted)
        if cfg.until_stable and deleted == 0:
            break
    return x


def _soft_erode(img):
    # cross-shaped erosion: minimum over the three axis-aligned 3-voxel lines
    lines = [
        ndimage.minimum_filter(img, size=size, mode="constant", cval=0.0)
        for size in ((3, 1, 1), (1, 3, 1), (1, 1, 3))
    ]
    return np.minimum.reduce(lines)


def _soft_dilate(img):
    return ndimage.maximum_filter(img, size=3, mode="constant", cval=0.0)


def _soft_open(img):
    return _soft_dilate(_soft_erode(img))


def morphological_skeleton_baseline(v, iterations: int = 10) -> np.ndarray:
    """Erosion/opening soft skeleton thresholded at 0.5; no topology guarantee."""
    if iterations < 1:
        raise DomainError("iterations must be at least 1")
    img = as_volume(v).astype(np.float64)
    skel = np.maximum(img - _soft_open(img), 0.0)
    for _ in range(iterations):
        img = _soft_erode(img)
        delta = np.maximum(img - _soft_open(img), 0.0)
        skel = skel + np.maximum(delta - skel * delta, 0.0)
    return (skel >= 0.5).astype(np.uint8)
