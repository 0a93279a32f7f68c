"""Simple-point and endpoint detectors built from fixed kernels.

Both detectors are written once against a small "field" interface and
evaluated by two backends:

* :class:`VolumeField` correlates whole volumes. It works on numpy arrays
  and, unchanged, on :class:`~diffskel.tape.Var` handles, which is how the
  differentiable path records the detectors on a gradient tape.
* :class:`PatchField` evaluates the same kernels at a batch of voxels given
  their flat 3x3x3 neighborhoods, which is what the census and the fast
  binary peeler use.

Everything reduces to correlations, additions, multiplications and
``max(0, .)`` gates, and is exact on binary input.
"""

from __future__ import annotations

import numpy as np

from .kernels import BOOLEAN_BANK, EULER_BANK, Kernel, KernelBank, kernel_bank, window_taps
from .ops import all_present, at_most, correlate, equals, logical_and, logical_or
from .volume import CENTER, PATCH_OFFSETS, as_volume, subfield_mask

NEIGHBOR_COUNT = BOOLEAN_BANK.group("X26")[0]


class VolumeField:
    """Kernel responses at every voxel of ``x`` (numpy array or tape ``Var``).

    ``cleared`` marks the voxels whose own value is set to background for
    the "after deletion" pass; the mask must not contain two voxels that
    share a 3x3x3 window, which holds for any single subfield.

    An inverted field is kept as the original values plus a flag, so that
    voxels outside the lattice (background) read as 1 after inversion.
    """

    def __init__(self, x, cleared=None, negated=False):
        self.x = x
        self.cleared_mask = cleared
        self.negated = negated

    def center(self):
        return 1 - self.x if self.negated else self.x

    def inverted(self) -> "VolumeField":
        return VolumeField(self.x, self.cleared_mask, not self.negated)

    def cleared(self) -> "VolumeField":
        if self.cleared_mask is None:
            raise ValueError("no clearing mask given for this field")
        return VolumeField(self.x * (1 - self.cleared_mask), self.cleared_mask, self.negated)

    def response(self, kernel: Kernel):
        r = correlate(self.x, kernel.taps)
        if self.negated:
            r = sum(w for _, w in kernel.taps) - r
        return r + kernel.bias if kernel.bias else r

    def window_total(self, kernel: Kernel):
        # one gated response per placement inside the window, so cells
        # reaching past the lattice border are still counted
        total = 0
        for placed in placements(kernel):
            total = total + all_present(self.response(placed), placed.cells)
        return total

    def signed_window_total(self, bank: KernelBank):
        total = 0
        for kernel in bank:
            total = total + kernel.sign * self.window_total(kernel)
        return total

    def group_totals(self, bank: KernelBank) -> dict:
        totals = {}
        for kernel in bank:
            r = self.response(kernel)
            if kernel.rule == "all":
                r = all_present(r, kernel.cells)
            totals[kernel.group] = r if kernel.group not in totals else totals[kernel.group] + r
        return totals


class PatchField:
    """Kernel responses at the centers of flat (N, 27) raster neighborhoods."""

    def __init__(self, patches):
        self.patches = np.asarray(patches, dtype=np.float32)

    def center(self):
        return self.patches[:, CENTER]

    def inverted(self) -> "PatchField":
        return PatchField(1 - self.patches)

    def cleared(self) -> "PatchField":
        out = self.patches.copy()
        out[:, CENTER] = 0
        return PatchField(out)

    def response(self, kernel: Kernel):
        return self.patches @ _dense_weights((kernel,))[:, 0] + kernel.bias

    def window_total(self, kernel: Kernel):
        weights, offset, _ = _placement_matrices((kernel,))
        r = self.patches @ weights
        r += offset
        np.maximum(r, 0, out=r)
        return r.sum(axis=1)

    def signed_window_total(self, bank: KernelBank):
        weights, offset, signs = _placement_matrices(bank.kernels)
        r = self.patches @ weights
        r += offset
        np.maximum(r, 0, out=r)
        return r @ signs

    def group_totals(self, bank: KernelBank) -> dict:
        weights, offset, groups = _bank_matrices(bank)
        r = self.patches @ weights
        r += offset
        # count responses are never negative, so the gate leaves them intact
        np.maximum(r, 0, out=r)
        totals = r @ groups
        return {name: totals[:, i] for i, name in enumerate(bank.groups)}


def _dense_weights(kernels) -> np.ndarray:
    index = {tuple(int(c) for c in o): i for i, o in enumerate(PATCH_OFFSETS)}
    w = np.zeros((27, len(kernels)), dtype=np.float32)
    for j, k in enumerate(kernels):
        for o, weight in k.taps:
            w[index[o], j] += weight
    return w


_CACHE: dict = {}


def _bank_matrices(bank: KernelBank):
    key = ("bank", bank.detector)
    if key not in _CACHE:
        weights = _dense_weights(bank.kernels)
        offset = np.array(
            [k.bias - (k.cells - 1 if k.rule == "all" else 0) for k in bank], dtype=np.float32
        )
        groups = np.zeros((len(bank), len(bank.groups)), dtype=np.float32)
        for j, k in enumerate(bank):
            groups[j, bank.groups.index(k.group)] = 1
        _CACHE[key] = (weights, offset, groups)
    return _CACHE[key]


def placements(kernel: Kernel) -> list[Kernel]:
    """Copies of ``kernel`` shifted to every anchor that keeps it inside the 3x3x3 window."""
    out = []
    for a, _ in window_taps(kernel):
        taps = tuple((tuple(int(c) for c in np.add(a, o)), w) for o, w in kernel.taps)
        out.append(Kernel(kernel.name, kernel.group, taps, kernel.bias, kernel.rule, kernel.sign))
    return out


def _placement_matrices(kernels):
    """Weights of every placement of each kernel inside the window, one column each."""
    key = ("window",) + tuple(k.name for k in kernels)
    if key not in _CACHE:
        placed, offset, signs = [], [], []
        for kernel in kernels:
            for p in placements(kernel):
                placed.append(p)
                offset.append(kernel.bias - (kernel.cells - 1))
                signs.append(kernel.sign)
        _CACHE[key] = (
            _dense_weights(placed),
            np.array(offset, dtype=np.float32),
            np.array(signs, dtype=np.float32),
        )
    return _CACHE[key]


# detectors ---------------------------------------------------------------


def local_genus(field):
    """Euler characteristic of the 6-connected set in each 3x3x3 window.

    Counts vertices, edges, faces and octants lying inside the window with
    the eight complex kernels and combines them as ``v - e + f - oct``.
    """
    return field.signed_window_total(EULER_BANK)


def euler_simple(field):
    """Foreground voxels whose deletion leaves the local genus unchanged.

    The genus of the foreground under 26-adjacency is the background genus
    minus one, so comparing background genera before and after clearing the
    center is the same test.
    """
    before = local_genus(field.inverted())
    after = local_genus(field.cleared().inverted())
    return field.center() * equals(before - after, 0)


def boolean_simple(field):
    """Exact simple-point test from neighbor and cell-configuration counts."""
    t = field.group_totals(BOOLEAN_BANK)
    x6bar, x26, x18 = t["X6bar"], t["X26"], t["X18"]
    no_b26 = equals(t["B26"], 0)
    simple = logical_or(
        equals(x6bar, 1),
        equals(x26, 1),
        no_b26 * equals(x18, 1),
        logical_and(
            equals(t["A6bar"], 0),
            no_b26,
            equals(t["B18"], 0),
            equals(x6bar - t["A18bar"] + t["A26bar"], 1),
        ),
    )
    return field.center() * simple


def endpoint(field):
    """Foreground voxels with at most one foreground 26-neighbor."""
    return field.center() * at_most(field.response(NEIGHBOR_COUNT), 1)


def simple_candidates(field, detector: str):
    kernel_bank(detector)  # validates the name
    return euler_simple(field) if detector == "euler" else boolean_simple(field)


# public numpy entry points ----------------------------------------------


def _binary(v) -> np.ndarray:
    return as_volume(v).astype(np.int64)


def neighbor_count_26(v) -> np.ndarray:
    """Number of foreground 26-neighbors of every voxel."""
    return correlate(_binary(v), NEIGHBOR_COUNT.taps)


def endpoint_mask(v) -> np.ndarray:
    return endpoint(VolumeField(_binary(v))).astype(np.uint8)


def boolean_simple_mask(v) -> np.ndarray:
    return np.rint(boolean_simple(VolumeField(_binary(v)))).astype(np.uint8)


def euler_delta_mask(v, sf) -> np.ndarray:
    """Foreground voxels of subfield ``sf`` flagged by the genus test."""
    x = _binary(v)
    mask = subfield_mask(sf, x.shape).astype(np.int64)
    flags = euler_simple(VolumeField(x, cleared=mask))
    return (np.rint(flags) * mask).astype(np.uint8)
