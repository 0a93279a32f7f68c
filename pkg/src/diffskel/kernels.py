"""Fixed convolution kernels for the two simple-point detectors.

A kernel is a sparse list of ``(offset, weight)`` taps plus a bias. Its
response at a voxel is ``sum(weight * x[p + offset]) + bias``. Taps of
weight +1 ask for a foreground cell and taps of weight -1 (with one unit
of bias each) ask for a background cell, so the response of a
configuration kernel counts how many of its cells match. Two reduction
rules are used:

``count``
    the response itself is the quantity of interest (neighbor counts);
``all``
    the configuration is present iff every cell matches, i.e. the
    response equals ``cells``; detected with ``max(0, r - (cells - 1))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .volume import NEIGHBOR_OFFSETS


@dataclass(frozen=True)
class Kernel:
    name: str
    group: str
    taps: tuple[tuple[tuple[int, int, int], int], ...]
    bias: int = 0
    rule: str = "all"
    sign: int = 1

    @property
    def cells(self) -> int:
        return len(self.taps)

    def as_array(self) -> np.ndarray:
        """Dense weights over the smallest box holding the taps (index = offset - min)."""
        offs = np.array([o for o, _ in self.taps])
        lo = offs.min(axis=0)
        out = np.zeros(tuple(offs.max(axis=0) - lo + 1), dtype=np.int64)
        for o, w in self.taps:
            out[tuple(np.subtract(o, lo))] = w
        return out


@dataclass(frozen=True)
class KernelBank:
    detector: str
    kernels: tuple[Kernel, ...]

    def __len__(self):
        return len(self.kernels)

    def __iter__(self):
        return iter(self.kernels)

    def group(self, name: str) -> tuple[Kernel, ...]:
        return tuple(k for k in self.kernels if k.group == name)

    @property
    def groups(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(k.group for k in self.kernels))


def _cube_cells(extent):
    ex, ey, ez = extent
    return tuple(
        (dx, dy, dz) for dz in range(ez + 1) for dy in range(ey + 1) for dx in range(ex + 1)
    )


def window_taps(kernel: Kernel):
    """Anchors at which ``kernel`` fits inside the 3x3x3 window around a voxel.

    Summing a per-anchor map with these taps counts every placement of the
    complex that lies entirely inside the window.
    """
    offs = np.array([o for o, _ in kernel.taps])
    hi = offs.max(axis=0)
    ranges = [range(-1, 2 - int(h)) for h in hi]
    return tuple(((dx, dy, dz), 1) for dz in ranges[2] for dy in ranges[1] for dx in ranges[0])


def _euler_bank() -> KernelBank:
    # vertex, edges, faces and octant of the 6-adjacency cubical complex,
    # each anchored at its lowest corner and applied to the inverted image.
    specs = [
        ("vertex", "vertex", (0, 0, 0), +1),
        ("edge_x", "edge", (1, 0, 0), -1),
        ("edge_y", "edge", (0, 1, 0), -1),
        ("edge_z", "edge", (0, 0, 1), -1),
        ("face_xy", "face", (1, 1, 0), +1),
        ("face_xz", "face", (1, 0, 1), +1),
        ("face_yz", "face", (0, 1, 1), +1),
        ("octant", "octant", (1, 1, 1), -1),
    ]
    kernels = tuple(
        Kernel(name, group, tuple((c, 1) for c in _cube_cells(ext)), 0, "all", sign)
        for name, group, ext, sign in specs
    )
    return KernelBank("euler", kernels)


_FACES = [tuple(int(c) for c in o) for o in NEIGHBOR_OFFSETS if abs(o).sum() == 1]
_EDGES = [tuple(int(c) for c in o) for o in NEIGHBOR_OFFSETS if abs(o).sum() == 2]
_CORNERS = [tuple(int(c) for c in o) for o in NEIGHBOR_OFFSETS if abs(o).sum() == 3]


def _chebyshev_adjacent(p, pool):
    return [q for q in pool if q != p and max(abs(a - b) for a, b in zip(p, q)) <= 1]


def _face_adjacent(p, pool):
    return [q for q in pool if sum(abs(a - b) for a, b in zip(p, q)) == 1]


def _config(name, group, fg, bg) -> Kernel:
    taps = tuple((c, 1) for c in fg) + tuple((c, -1) for c in bg)
    return Kernel(name, group, taps, bias=len(bg), rule="all")


def _boolean_bank() -> KernelBank:
    kernels = [
        Kernel("X6bar", "X6bar", tuple((f, -1) for f in _FACES), bias=6, rule="count"),
        Kernel("X26", "X26", tuple((tuple(int(c) for c in o), 1) for o in NEIGHBOR_OFFSETS), rule="count"),
        Kernel("X18", "X18", tuple((o, 1) for o in _FACES + _EDGES), rule="count"),
    ]
    # background face whose four face-adjacent edge neighbors are foreground:
    # an isolated background 6-component of the 18-neighborhood
    for f in _FACES:
        kernels.append(_config(f"A6bar{f}", "A6bar", _face_adjacent(f, _EDGES), [f]))
    # foreground corner with no foreground among the 18-neighbors touching it
    for c in _CORNERS:
        ring = _chebyshev_adjacent(c, _FACES) + _chebyshev_adjacent(c, _EDGES)
        kernels.append(_config(f"B26{c}", "B26", [c], ring))
    # foreground edge with no foreground among the faces and edges touching it
    for e in _EDGES:
        ring = _chebyshev_adjacent(e, _FACES) + _chebyshev_adjacent(e, _EDGES)
        kernels.append(_config(f"B18{e}", "B18", [e], ring))
    # background edge joining two background faces
    for e in _EDGES:
        kernels.append(_config(f"A18bar{e}", "A18bar", [], [e] + _face_adjacent(e, _FACES)))
    # background corner closing a triangle of background faces and edges
    for c in _CORNERS:
        ring = _chebyshev_adjacent(c, _FACES) + _chebyshev_adjacent(c, _EDGES)
        kernels.append(_config(f"A26bar{c}", "A26bar", [], [c] + ring))
    return KernelBank("boolean", tuple(kernels))


EULER_BANK = _euler_bank()
BOOLEAN_BANK = _boolean_bank()


def kernel_bank(detector: str) -> KernelBank:
    try:
        return {"euler": EULER_BANK, "boolean": BOOLEAN_BANK}[detector]
    except KeyError:
        raise DomainError(f"unknown detector {detector!r}; expected 'euler' or 'boolean'") from None
