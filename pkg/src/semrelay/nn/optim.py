"""ADAM (default) and plain SGD parameter updates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolationError
from .params import ParameterSet


@dataclass
class AdamState:
    """Per-parameter first/second moments plus the step counter."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: ParameterSet, lr: float = 1e-3,
                   beta1: float = 0.9, beta2: float = 0.999,
                   eps: float = 1e-8) -> "AdamState":
        state = cls(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        for name, tensor in params.items():
            state.m[name] = np.zeros_like(tensor.data)
            state.v[name] = np.zeros_like(tensor.data)
        return state


def adam_step(params: ParameterSet, state: AdamState) -> None:
    """One bias-corrected ADAM update; gradients are left untouched."""
    for name, tensor in params.items():
        if tensor.grad is None:
            raise ContractViolationError(f"parameter {name!r} has no gradient")
        if not np.all(np.isfinite(tensor.grad)):
            raise ContractViolationError(f"parameter {name!r} has non-finite gradient")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for name, tensor in params.items():
        g = tensor.grad
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * (g * g)
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        tensor.data = tensor.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


def sgd_step(params: ParameterSet, lr: float) -> None:
    """Plain stochastic gradient descent update."""
    for name, tensor in params.items():
        if tensor.grad is None:
            raise ContractViolationError(f"parameter {name!r} has no gradient")
        tensor.data = tensor.data - lr * tensor.grad


def make_optimizer(kind: str, params: ParameterSet, lr: float):
    """Return a zero-argument step closure for 'adam' or 'sgd'."""
    if kind == "adam":
        state = AdamState.for_params(params, lr=lr)
        return lambda: adam_step(params, state)
    if kind == "sgd":
        return lambda: sgd_step(params, lr)
    raise ContractViolationError(f"unknown optimizer {kind!r}")
