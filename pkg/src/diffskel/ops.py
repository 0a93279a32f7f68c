"""Array primitives shared by the numpy and gradient-tape code paths.

Every function accepts either a numpy array or a tape :class:`Var` and
returns the same kind, so detector formulas are written once.
"""

from __future__ import annotations

import numpy as np

from .tape import Var, _sigmoid, shift_sum


def correlate(x, taps):
    """Fixed-kernel correlation with zero padding (see :func:`shift_sum`)."""
    if isinstance(x, Var):
        return x.tape.conv(x, taps)
    return shift_sum(x, taps)


def relu(x):
    if isinstance(x, Var):
        return x.tape.relu(x)
    return np.maximum(x, 0)


def sigmoid(x):
    if isinstance(x, Var):
        return x.tape.sigmoid(x)
    return _sigmoid(np.asarray(x, dtype=np.float64))


def log(x):
    if isinstance(x, Var):
        return x.tape.log(x)
    return np.log(x)


def ste_round(x):
    """Round half up; on the tape the backward pass is the identity."""
    if isinstance(x, Var):
        return x.tape.ste_round(x)
    return (np.asarray(x) >= 0.5).astype(np.float64)


def at_least(count, threshold):
    """1 where ``count >= threshold`` on integer inputs, linear ramp in between."""
    return 1 - relu(1 - relu(count - (threshold - 1)))


def at_most(count, threshold):
    return at_least(-count, -threshold)


def equals(count, value):
    return at_least(count, value) * at_most(count, value)


def all_present(count, cells: int):
    """Indicator that all ``cells`` entries summed into ``count`` are 1."""
    return relu(count - (cells - 1))


def logical_or(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = out + t - out * t
    return out


def logical_and(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = out * t
    return out
