"""Reverse-mode autodiff over float64 numpy arrays.

Small fixed set of operations, enough for dense stacks and a toy
transformer: broadcast arithmetic, batched matmul, tanh/relu/sqrt,
reductions, fused softmax / layer-norm / embedding-lookup, and fused
MSE / cross-entropy losses. Everything runs in 64-bit internally so
finite-difference gradient checks are meaningful.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from ..errors import ContractViolationError, DimensionError


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    """A node in the computation graph wrapping a float64 ndarray."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Optional[Callable[[np.ndarray], None]] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # -- graph construction -------------------------------------------------

    @staticmethod
    def _node(data: np.ndarray, parents: Sequence["Tensor"],
              backward: Callable[[np.ndarray], None]) -> "Tensor":
        out = Tensor(data)
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    def backward(self) -> None:
        """Backpropagate from a scalar root."""
        if self.data.size != 1:
            raise ContractViolationError(
                f"backward() requires a scalar root, got shape {self.shape}")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Tensor":
        return other if isinstance(other, Tensor) else Tensor(other)

    def __add__(self, other) -> "Tensor":
        a, b = self, Tensor._coerce(other)
        data = a.data + b.data

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(_unbroadcast(g, a.shape))
            if b.requires_grad:
                b._accumulate(_unbroadcast(g, b.shape))

        return Tensor._node(data, (a, b), backward)

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        a = self

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(-g)

        return Tensor._node(-a.data, (a,), backward)

    def __sub__(self, other) -> "Tensor":
        return self + (-Tensor._coerce(other))

    def __rsub__(self, other) -> "Tensor":
        return Tensor._coerce(other) + (-self)

    def __mul__(self, other) -> "Tensor":
        a, b = self, Tensor._coerce(other)
        data = a.data * b.data

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(_unbroadcast(g * b.data, a.shape))
            if b.requires_grad:
                b._accumulate(_unbroadcast(g * a.data, b.shape))

        return Tensor._node(data, (a, b), backward)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Tensor":
        a, b = self, Tensor._coerce(other)
        data = a.data / b.data

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(_unbroadcast(g / b.data, a.shape))
            if b.requires_grad:
                b._accumulate(_unbroadcast(-g * a.data / (b.data * b.data), b.shape))

        return Tensor._node(data, (a, b), backward)

    def matmul(self, other: "Tensor") -> "Tensor":
        a, b = self, Tensor._coerce(other)
        if a.shape[-1] != b.shape[-2 if b.ndim > 1 else 0]:
            raise DimensionError(
                f"matmul inner dims differ: {a.shape} @ {b.shape}")
        data = np.matmul(a.data, b.data)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
                a._accumulate(_unbroadcast(ga, a.shape))
            if b.requires_grad:
                gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
                b._accumulate(_unbroadcast(gb, b.shape))

        return Tensor._node(data, (a, b), backward)

    __matmul__ = matmul

    # -- elementwise nonlinearities -------------------------------------------

    def tanh(self) -> "Tensor":
        a = self
        data = np.tanh(a.data)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(g * (1.0 - data * data))

        return Tensor._node(data, (a,), backward)

    def relu(self) -> "Tensor":
        a = self
        data = np.maximum(a.data, 0.0)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(g * (a.data > 0.0))

        return Tensor._node(data, (a,), backward)

    def sqrt(self) -> "Tensor":
        a = self
        data = np.sqrt(a.data)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(g / (2.0 * data))

        return Tensor._node(data, (a,), backward)

    # -- shape ops -----------------------------------------------------------

    def reshape(self, *shape: int) -> "Tensor":
        a = self
        orig = a.shape
        data = a.data.reshape(*shape)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(g.reshape(orig))

        return Tensor._node(data, (a,), backward)

    def transpose(self, axes: Sequence[int]) -> "Tensor":
        a = self
        axes = tuple(axes)
        inverse = tuple(np.argsort(axes))
        data = a.data.transpose(axes)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                a._accumulate(g.transpose(inverse))

        return Tensor._node(data, (a,), backward)

    # -- reductions ----------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        a = self
        data = a.data.sum(axis=axis, keepdims=keepdims)

        def backward(g: np.ndarray) -> None:
            if not a.requires_grad:
                return
            if axis is None:
                a._accumulate(np.broadcast_to(g, a.shape).copy())
                return
            gg = g
            if not keepdims:
                gg = np.expand_dims(g, axis)
            a._accumulate(np.broadcast_to(gg, a.shape).copy())

        return Tensor._node(data, (a,), backward)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        if axis is None:
            n = self.size
        else:
            n = self.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    # -- fused row-wise ops ----------------------------------------------------

    def softmax(self) -> "Tensor":
        """Numerically stable softmax over the last axis."""
        a = self
        shifted = a.data - a.data.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        data = e / e.sum(axis=-1, keepdims=True)

        def backward(g: np.ndarray) -> None:
            if a.requires_grad:
                dot = (g * data).sum(axis=-1, keepdims=True)
                a._accumulate(data * (g - dot))

        return Tensor._node(data, (a,), backward)

    def layer_norm(self, eps: float = 1e-12) -> "Tensor":
        """Normalize the last axis to zero mean, unit variance (no affine)."""
        a = self
        mu = a.data.mean(axis=-1, keepdims=True)
        centered = a.data - mu
        var = (centered * centered).mean(axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + eps)
        data = centered * inv

        def backward(g: np.ndarray) -> None:
            if not a.requires_grad:
                return
            gm = g.mean(axis=-1, keepdims=True)
            gy = (g * data).mean(axis=-1, keepdims=True)
            a._accumulate(inv * (g - gm - data * gy))

        return Tensor._node(data, (a,), backward)


def embedding(table: Tensor, indices: np.ndarray) -> Tensor:
    """Row lookup `table[indices]` with scatter-add backward."""
    idx = np.asarray(indices, dtype=np.int64)
    data = table.data[idx]

    def backward(g: np.ndarray) -> None:
        if table.requires_grad:
            if table.grad is None:
                table.grad = np.zeros_like(table.data)
            np.add.at(table.grad, idx, g)

    return Tensor._node(data, (table,), backward)


def concat_rows(parts: Iterable[Tensor]) -> Tensor:
    """Concatenate along the first axis."""
    parts = list(parts)
    data = np.concatenate([p.data for p in parts], axis=0)
    offsets = np.cumsum([0] + [p.shape[0] for p in parts])

    def backward(g: np.ndarray) -> None:
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p._accumulate(g[lo:hi])

    return Tensor._node(data, tuple(parts), backward)
