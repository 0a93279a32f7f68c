"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np

from .exceptions import DomainError
from .volume import as_volume


def check_binary_volume(v, name: str = "volume") -> np.ndarray:
    """Return ``v`` as a 3D uint8 array, rejecting anything outside {0, 1}."""
    try:
        arr = as_volume(v)
    except DomainError as exc:
        raise DomainError(f"{name}: {exc}") from None
    if arr.dtype.kind not in "biuf":
        raise DomainError(f"{name}: expected a numeric array, got dtype {arr.dtype}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DomainError(f"{name}: expected only 0 and 1 values")
    return arr.astype(np.uint8)


def check_probability_volume(v, name: str = "volume") -> np.ndarray:
    """Return ``v`` as a 3D float64 array with finite values in [0, 1]."""
    try:
        arr = as_volume(v)
    except DomainError as exc:
        raise DomainError(f"{name}: {exc}") from None
    if arr.dtype.kind not in "biuf":
        raise DomainError(f"{name}: expected a numeric array, got dtype {arr.dtype}")
    arr = arr.astype(np.float64)
    if arr.size and not (np.isfinite(arr).all() and arr.min() >= 0 and arr.max() <= 1):
        raise DomainError(f"{name}: values must be finite and inside [0, 1]")
    return arr


def check_iterations(iterations):
    """``"auto"`` or a non-negative integer; strings of digits are accepted."""
    if iterations == "auto":
        return iterations
    if isinstance(iterations, str):
        if not iterations.isdigit():
            raise DomainError(f"iterations must be a non-negative integer or 'auto', got {iterations!r}")
        return int(iterations)
    if isinstance(iterations, bool) or not isinstance(iterations, (int, np.integer)) or iterations < 0:
        raise DomainError(f"iterations must be a non-negative integer or 'auto', got {iterations!r}")
    return int(iterations)


def check_batch(X, checker) -> tuple[list[np.ndarray], bool]:
    """Accept one volume or a sequence of volumes; report which it was.

    A single 2D image or 3D volume comes back as a one-element list with
    ``single=True``; a 4D array or a list is treated as a batch.
    """
    if isinstance(X, (list, tuple)):
        return [checker(x, f"X[{i}]") for i, x in enumerate(X)], False
    arr = np.asarray(X)
    if arr.ndim == 4:
        return [checker(x, f"X[{i}]") for i, x in enumerate(arr)], False
    return [checker(arr, "X")], True
