"""Loss functions, each in two forms: a pure-numpy (loss, grad) pair for
direct use and verification, and a graph op for training.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import ContractViolationError, DimensionError
from .tensor import Tensor


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax_cross_entropy(logits: np.ndarray,
                          targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over rows against one-hot targets.

    Returns (loss, dloss/dlogits) with the exact analytic gradient
    (softmax(logits) - targets) / m.
    """
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if logits.shape != targets.shape:
        raise DimensionError(
            f"logits shape {logits.shape} != targets shape {targets.shape}")
    if logits.ndim != 2 or logits.shape[1] < 2:
        raise DimensionError(
            f"expected (m, V) logits with V >= 2, got {logits.shape}")
    one = np.isclose(targets.sum(axis=1), 1.0)
    hot = np.all((targets == 0.0) | (targets == 1.0))
    if not (one.all() and hot):
        raise ContractViolationError("target rows must be one-hot")
    m = logits.shape[0]
    logq = _log_softmax(logits)
    loss = float(-(targets * logq).sum() / m)
    grad = (_softmax(logits) - targets) / m
    return loss, grad


def mse_loss(x: np.ndarray, xhat: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error over all components.

    Returns (loss, dloss/dxhat) where grad = 2 (xhat - x) / n.
    """
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {xhat.shape}")
    if x.size == 0:
        raise DimensionError("empty tensors have no MSE")
    n = x.size
    diff = xhat - x
    loss = float((diff * diff).sum() / n)
    grad = 2.0 * diff / n
    return loss, grad


def mse_op(target: np.ndarray, pred: Tensor) -> Tensor:
    """Graph node for MSE against a constant target."""
    target = np.asarray(target, dtype=np.float64)
    if target.shape != pred.shape:
        raise DimensionError(
            f"shape mismatch: {target.shape} vs {pred.shape}")
    n = target.size
    diff = pred.data - target
    data = np.asarray((diff * diff).sum() / n)

    def backward(g: np.ndarray) -> None:
        if pred.requires_grad:
            pred._accumulate(g * 2.0 * diff / n)

    return Tensor._node(data, (pred,), backward)


def cross_entropy_op(logits: Tensor, targets: np.ndarray,
                     mask: Optional[np.ndarray] = None) -> Tensor:
    """Graph node for token cross-entropy.

    logits: (..., V); targets: integer class ids of shape logits.shape[:-1];
    mask: optional 0/1 weights of the same shape as targets. The loss is the
    mean of -log q[target] over unmasked positions.
    """
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape != logits.shape[:-1]:
        raise DimensionError(
            f"targets shape {targets.shape} incompatible with logits {logits.shape}")
    if mask is None:
        mask = np.ones(targets.shape, dtype=np.float64)
    else:
        mask = np.asarray(mask, dtype=np.float64)
        if mask.shape != targets.shape:
            raise DimensionError(
                f"mask shape {mask.shape} != targets shape {targets.shape}")
    count = mask.sum()
    if count <= 0:
        raise ContractViolationError("cross-entropy mask excludes every position")
    v = logits.shape[-1]
    flat_logits = logits.data.reshape(-1, v)
    flat_targets = targets.reshape(-1)
    flat_mask = mask.reshape(-1)
    logq = _log_softmax(flat_logits)
    picked = logq[np.arange(flat_targets.size), flat_targets]
    data = np.asarray(-(picked * flat_mask).sum() / count)

    q = _softmax(flat_logits)

    def backward(g: np.ndarray) -> None:
        if logits.requires_grad:
            grad = q.copy()
            grad[np.arange(flat_targets.size), flat_targets] -= 1.0
            grad *= flat_mask[:, None] / count
            logits._accumulate(g * grad.reshape(logits.shape))

    return Tensor._node(data, (logits,), backward)
