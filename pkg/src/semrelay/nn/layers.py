"""Dense layer forward pass."""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolationError, DimensionError
from .tensor import Tensor

ACTIVATIONS = ("identity", "relu", "tanh")


def dense_forward(x: Tensor, weights: Tensor, bias: Tensor,
                  activation: str = "identity") -> Tensor:
    """act(x @ W + b) over the last axis of x.

    x: (..., I), weights: (I, O), bias: (O,).
    """
    if activation not in ACTIVATIONS:
        raise ContractViolationError(
            f"unknown activation {activation!r}, expected one of {ACTIVATIONS}")
    if weights.ndim != 2:
        raise DimensionError(f"weights must be 2-D, got shape {weights.shape}")
    if x.shape[-1] != weights.shape[0]:
        raise DimensionError(
            f"input/weight shapes incompatible: {x.shape} vs {weights.shape}")
    if bias.shape != (weights.shape[1],):
        raise DimensionError(
            f"bias shape {bias.shape} does not match output dim {weights.shape[1]}")
    out = x.matmul(weights) + bias
    if activation == "relu":
        return out.relu()
    if activation == "tanh":
        return out.tanh()
    return out


def check_finite(arr: np.ndarray, label: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError(f"non-finite values in {label}")
