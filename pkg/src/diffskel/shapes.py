"""Synthetic binary shapes with known topology.

=============  ==========================  ==============
kind           main parameters             Betti numbers
=============  ==========================  ==============
line           length, axis                (1, 0, 0)
solid_box      size                        (1, 0, 0)
thick_torus    major_radius, minor_radius  (1, 1, 0)
hollow_shell   outer_radius, thickness     (1, 0, 1)
random_blob    size, sigma, fill           not fixed
=============  ==========================  ==============

Every shape is surrounded by ``margin`` background voxels (default 1).
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .exceptions import DomainError

KINDS = ("line", "solid_box", "thick_torus", "hollow_shell", "random_blob")

EXPECTED_BETTI = {
    "line": (1, 0, 0),
    "solid_box": (1, 0, 0),
    "thick_torus": (1, 1, 0),
    "hollow_shell": (1, 0, 1),
}


def _positive(name, value):
    if value <= 0:
        raise DomainError(f"{name} must be positive, got {value}")


def _line(length=5, axis=0, margin=1):
    _positive("length", length)
    shape = [1 + 2 * margin] * 3
    shape[axis] = length + 2 * margin
    v = np.zeros(shape, dtype=np.uint8)
    index = [margin] * 3
    index[axis] = slice(margin, margin + length)
    v[tuple(index)] = 1
    return v


def _solid_box(size=(5, 5, 5), margin=1):
    size = (size,) * 3 if np.isscalar(size) else tuple(size)
    for s in size:
        _positive("size", s)
    v = np.zeros(tuple(s + 2 * margin for s in size), dtype=np.uint8)
    v[margin : margin + size[0], margin : margin + size[1], margin : margin + size[2]] = 1
    return v


def _grid(extent, margin):
    n = int(np.ceil(2 * extent)) + 1 + 2 * margin
    c = (n - 1) / 2
    return np.indices((n, n, n), dtype=np.float64) - c


def _thick_torus(major_radius=6.0, minor_radius=2.5, margin=1):
    _positive("major_radius", major_radius)
    _positive("minor_radius", minor_radius)
    if minor_radius >= major_radius:
        raise DomainError("minor_radius must be smaller than major_radius")
    zx, zy, zz = _grid(major_radius + minor_radius, margin)
    ring = np.sqrt(zx**2 + zy**2) - major_radius
    return (ring**2 + zz**2 <= minor_radius**2).astype(np.uint8)


def _hollow_shell(outer_radius=6.0, thickness=2.0, margin=1):
    _positive("outer_radius", outer_radius)
    _positive("thickness", thickness)
    if thickness >= outer_radius:
        raise DomainError("thickness must be smaller than outer_radius")
    zx, zy, zz = _grid(outer_radius, margin)
    r = np.sqrt(zx**2 + zy**2 + zz**2)
    return ((r <= outer_radius) & (r > outer_radius - thickness)).astype(np.uint8)


def _random_blob(size=24, sigma=2.0, fill=0.45, margin=1, seed=0):
    size = (size,) * 3 if np.isscalar(size) else tuple(size)
    for s in size:
        _positive("size", s)
    _positive("sigma", sigma)
    if not 0 < fill < 1:
        raise DomainError("fill must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    noise = ndimage.gaussian_filter(rng.standard_normal(size), sigma, mode="nearest")
    blob = (noise > np.quantile(noise, 1 - fill)).astype(np.uint8)
    return np.pad(blob, margin)


_BUILDERS = {
    "line": _line,
    "solid_box": _solid_box,
    "thick_torus": _thick_torus,
    "hollow_shell": _hollow_shell,
    "random_blob": _random_blob,
}


def make_shape(kind: str, params: dict | None = None, seed: int = 0) -> np.ndarray:
    """Build a synthetic shape; deterministic for a fixed ``seed``."""
    if kind not in _BUILDERS:
        raise DomainError(f"unknown shape kind {kind!r}; expected one of {', '.join(KINDS)}")
    params = dict(params or {})
    if kind == "random_blob":
        params.setdefault("seed", seed)
    try:
        return _BUILDERS[kind](**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {kind}: {exc}") from None
