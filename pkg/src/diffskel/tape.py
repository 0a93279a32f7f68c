"""A minimal reverse-mode gradient tape.

The tape records a closed vocabulary of array operations (inputs,
constants, fixed-kernel correlations, add/subtract/multiply, scalar
scaling, ``max(0, x)``, sigmoid, log and straight-through rounding) and
replays them backwards once. Forward values are stored densely, so memory
grows with ``nodes x volume size``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .exceptions import ContractError

OPS = frozenset(
    {
        "input",
        "constant",
        "conv",
        "add",
        "subtract",
        "multiply",
        "scale",
        "relu",
        "sigmoid",
        "log",
        "ste_round",
    }
)


def shift_sum(x: np.ndarray, taps) -> np.ndarray:
    """Zero-padded correlation over the last three axes.

    ``out[p] = sum(w * x[p + offset] for offset, w in taps)``; offsets are
    integer triples with entries in [-1, 1].
    """
    x = np.asarray(x)
    spatial = x.shape[-3:]
    pad = [(0, 0)] * (x.ndim - 3) + [(1, 1)] * 3
    padded = np.pad(x, pad)
    dtype = np.result_type(x.dtype, np.float64) if x.dtype.kind == "f" else np.int64
    out = np.zeros(x.shape, dtype=dtype)
    nx, ny, nz = spatial
    for (dx, dy, dz), w in taps:
        window = padded[..., 1 + dx : 1 + dx + nx, 1 + dy : 1 + dy + ny, 1 + dz : 1 + dz + nz]
        if w == 1:
            out += window
        elif w == -1:
            out -= window
        else:
            out += w * window
    return out


def _adjoint_taps(taps):
    return tuple(((-dx, -dy, -dz), w) for (dx, dy, dz), w in taps)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    if grad.shape == tuple(shape):
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


@dataclass(frozen=True)
class Node:
    op: str
    parents: tuple[int, ...]
    attr: Any = None
    needs_grad: bool = False


class Var:
    """Handle to a recorded node; supports ``+``, ``-`` and ``*``."""

    __slots__ = ("tape", "index")
    # make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, tape: "GradientTape", index: int):
        self.tape = tape
        self.index = index

    @property
    def value(self) -> np.ndarray:
        return self.tape.values[self.index]

    @property
    def shape(self):
        return np.shape(self.value)

    @property
    def op(self) -> str:
        return self.tape.nodes[self.index].op

    def __add__(self, other):
        return self.tape.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.tape.subtract(self, other)

    def __rsub__(self, other):
        return self.tape.subtract(other, self)

    def __mul__(self, other):
        return self.tape.multiply(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.tape.scale(self, -1.0)

    def __repr__(self):
        return f"Var(#{self.index} {self.op}, shape={self.shape})"


class GradientTape:
    """Append-only record of one forward pass, replayed by :meth:`backward`."""

    def __init__(self):
        self.nodes: list[Node] = []
        self.values: list[np.ndarray] = []
        self.inputs: list[int] = []
        self._consumed = False

    def __len__(self):
        return len(self.nodes)

    # recording ---------------------------------------------------------

    def _record(self, op, parents, value, attr=None) -> Var:
        if self._consumed:
            raise ContractError("tape already replayed; record a new forward pass")
        needs_grad = op == "input" or any(self.nodes[p].needs_grad for p in parents)
        self.nodes.append(Node(op, tuple(parents), attr, needs_grad))
        self.values.append(value)
        return Var(self, len(self.nodes) - 1)

    def _lift(self, x) -> Var:
        if isinstance(x, Var):
            if x.tape is not self:
                raise ContractError("operands belong to different tapes")
            return x
        return self.constant(x)

    def input(self, value) -> Var:
        var = self._record("input", (), np.array(value, dtype=np.float64))
        self.inputs.append(var.index)
        return var

    def constant(self, value) -> Var:
        return self._record("constant", (), np.asarray(value, dtype=np.float64))

    def add(self, a, b) -> Var:
        a, b = self._lift(a), self._lift(b)
        return self._record("add", (a.index, b.index), a.value + b.value)

    def subtract(self, a, b) -> Var:
        a, b = self._lift(a), self._lift(b)
        return self._record("subtract", (a.index, b.index), a.value - b.value)

    def multiply(self, a, b) -> Var:
        if np.isscalar(b) and isinstance(a, Var):
            return self.scale(a, b)
        if np.isscalar(a) and isinstance(b, Var):
            return self.scale(b, a)
        a, b = self._lift(a), self._lift(b)
        return self._record("multiply", (a.index, b.index), a.value * b.value)

    def scale(self, a, c: float) -> Var:
        a = self._lift(a)
        return self._record("scale", (a.index,), a.value * float(c), float(c))

    def conv(self, a, taps) -> Var:
        a = self._lift(a)
        taps = tuple(taps)
        return self._record("conv", (a.index,), shift_sum(a.value, taps).astype(np.float64), taps)

    def relu(self, a) -> Var:
        a = self._lift(a)
        return self._record("relu", (a.index,), np.maximum(a.value, 0.0))

    def sigmoid(self, a) -> Var:
        a = self._lift(a)
        return self._record("sigmoid", (a.index,), _sigmoid(a.value))

    def log(self, a) -> Var:
        a = self._lift(a)
        return self._record("log", (a.index,), np.log(a.value))

    def ste_round(self, a) -> Var:
        a = self._lift(a)
        return self._record("ste_round", (a.index,), (a.value >= 0.5).astype(np.float64))

    # replay ------------------------------------------------------------

    def local_vjp(self, index: int, grad: np.ndarray) -> list[np.ndarray]:
        """Cotangents for the parents of node ``index`` given its cotangent."""
        node = self.nodes[index]
        vals = [self.values[p] for p in node.parents]
        op = node.op
        if op == "add":
            return [_unbroadcast(grad, np.shape(v)) for v in vals]
        if op == "subtract":
            return [_unbroadcast(grad, np.shape(vals[0])), _unbroadcast(-grad, np.shape(vals[1]))]
        if op == "multiply":
            a, b = vals
            return [_unbroadcast(grad * b, np.shape(a)), _unbroadcast(grad * a, np.shape(b))]
        if op == "scale":
            return [grad * node.attr]
        if op == "conv":
            return [shift_sum(grad, _adjoint_taps(node.attr))]
        if op == "relu":
            # sub-gradient 0 at the kink
            return [grad * (vals[0] > 0.0)]
        if op == "sigmoid":
            s = self.values[index]
            return [grad * s * (1.0 - s)]
        if op == "log":
            return [grad / vals[0]]
        if op == "ste_round":
            # straight-through: the identity stands in for the rounding's zero derivative
            return [grad]
        return []

    def backward(self, seeds: Mapping[Var, Any]) -> list[np.ndarray]:
        """Accumulate gradients from ``seeds`` back to every recorded input.

        Returns one gradient array per :meth:`input` call, in call order.
        """
        if not self.nodes or not seeds:
            raise ContractError("backward called before any forward pass was recorded")
        if self._consumed:
            raise ContractError("a tape supports a single backward pass")
        grads: list[np.ndarray | None] = [None] * len(self.nodes)
        for var, g in seeds.items():
            if var.tape is not self:
                raise ContractError("seed belongs to a different tape")
            g = np.broadcast_to(np.asarray(g, dtype=np.float64), np.shape(var.value))
            grads[var.index] = g.copy() if grads[var.index] is None else grads[var.index] + g
        start = max(var.index for var in seeds)
        for index in range(start, -1, -1):
            g = grads[index]
            node = self.nodes[index]
            if g is None or not node.parents or not node.needs_grad:
                continue
            for parent, pg in zip(node.parents, self.local_vjp(index, g)):
                if not self.nodes[parent].needs_grad:
                    continue
                grads[parent] = pg if grads[parent] is None else grads[parent] + pg
        self._consumed = True
        return [
            np.zeros_like(self.values[i]) if grads[i] is None else np.asarray(grads[i])
            for i in self.inputs
        ]


def backward(tape: GradientTape, seed_gradients: Mapping[Var, Any]) -> list[np.ndarray]:
    """Reverse-mode pass over ``tape``; see :meth:`GradientTape.backward`."""
    return tape.backward(seed_gradients)
