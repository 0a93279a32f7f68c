"""Bit-parallel neighborhood predicates compiled with numba.

A neighborhood code packs the 26 neighbors of a foreground voxel into the
low bits of an integer (see :data:`diffskel.volume.NEIGHBOR_OFFSETS`).
Connected components are grown by OR-ing precomputed adjacency masks.
"""

from __future__ import annotations

import numba
import numpy as np

from .volume import NEIGHBOR_OFFSETS

_ALL = (1 << 26) - 1


def _tables():
    offs = NEIGHBOR_OFFSETS
    kind = np.abs(offs).sum(axis=1)
    adj26 = np.zeros(26, dtype=np.int64)
    adj6 = np.zeros(26, dtype=np.int64)
    cover = np.zeros(26, dtype=np.int64)
    for a in range(26):
        for b in range(26):
            if a == b:
                continue
            d = np.abs(offs[a] - offs[b])
            if d.max() <= 1:
                adj26[a] |= 1 << b
            if d.sum() == 1 and kind[a] <= 2 and kind[b] <= 2:
                adj6[a] |= 1 << b
        # neighbors whose closed unit cube contains the boundary cell of the
        # center cube facing neighbor ``a``
        for b in range(26):
            if all(offs[b][i] == 0 or offs[b][i] == offs[a][i] for i in range(3)):
                cover[a] |= 1 << b
    # Euler characteristic of a boundary cell: faces and vertices +1, edges -1
    cell_sign = np.where(kind == 2, -1, 1).astype(np.int64)
    n18 = int(sum(1 << k for k in range(26) if kind[k] <= 2))
    n6 = int(sum(1 << k for k in range(26) if kind[k] == 1))
    return adj26, adj6, cover, cell_sign, n18, n6


ADJ26, ADJ6, COVER, CELL_SIGN, N18_MASK, N6_MASK = _tables()


@numba.njit(cache=True)
def _lowest_bit_index(b):
    i = 0
    while b > 1:
        b >>= 1
        i += 1
    return i


@numba.njit(cache=True)
def _grow(seed, members, adj):
    comp = seed
    while True:
        grown = comp
        rest = comp
        while rest:
            b = rest & -rest
            grown |= adj[_lowest_bit_index(b)] & members
            rest ^= b
        if grown == comp:
            return comp
        comp = grown


@numba.njit(cache=True)
def count_components(members, adj):
    """Number of connected components of the bit set ``members``."""
    rest = members
    n = 0
    while rest:
        comp = _grow(rest & -rest, rest, adj)
        rest &= ~comp
        n += 1
    return n


@numba.njit(cache=True)
def boundary_euler(code, cover, cell_sign):
    """Euler characteristic of (center cube) ∩ (union of foreground neighbor cubes)."""
    chi = 0
    for k in range(26):
        if code & cover[k]:
            chi += cell_sign[k]
    return chi


@numba.njit(cache=True)
def simple_by_objects_and_genus(code, adj26, cover, cell_sign):
    # deleting the center keeps one object iff the neighbors stay 26-connected;
    # the genus is kept iff the glued boundary patch has Euler characteristic 1
    return count_components(code, adj26) == 1 and boundary_euler(code, cover, cell_sign) == 1


@numba.njit(cache=True)
def simple_by_topological_numbers(code, adj26, adj6, n18, n6):
    if count_components(code, adj26) != 1:
        return False
    background = (~code) & 0x3FFFFFF & n18
    rest = background
    touching = 0
    while rest:
        comp = _grow(rest & -rest, background, adj6)
        if comp & n6:
            touching += 1
        rest &= ~comp
    return touching == 1


@numba.njit(cache=True, nogil=True)
def _simple_codes(codes, adj26, cover, cell_sign, out):
    for i in range(codes.shape[0]):
        out[i] = simple_by_objects_and_genus(codes[i], adj26, cover, cell_sign)


@numba.njit(cache=True, nogil=True)
def _topological_codes(codes, adj26, adj6, n18, n6, out):
    for i in range(codes.shape[0]):
        out[i] = simple_by_topological_numbers(codes[i], adj26, adj6, n18, n6)


def simple_codes(codes) -> np.ndarray:
    """Vectorized exact simple-point test on neighborhood codes."""
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    out = np.zeros(codes.shape[0], dtype=np.bool_)
    _simple_codes(codes, ADJ26, COVER, CELL_SIGN, out)
    return out


def topological_number_codes(codes) -> np.ndarray:
    """Simple-point test via the (26, 6) topological numbers; an independent route."""
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    out = np.zeros(codes.shape[0], dtype=np.bool_)
    _topological_codes(codes, ADJ26, ADJ6, N18_MASK, N6_MASK, out)
    return out
