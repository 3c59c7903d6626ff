"""Named parameter collections with role tags."""

from __future__ import annotations

from typing import Iterator

import numpy as np

from ..errors import ContractViolationError
from .tensor import Tensor

ROLE_SEMANTIC_ENCODER = "semantic-encoder"
ROLE_AUTO_ENCODER = "auto-encoder"
ROLE_AUTO_DECODER = "auto-decoder"
ROLE_SEMANTIC_DECODER = "semantic-decoder"

ROLES = (
    ROLE_SEMANTIC_ENCODER,
    ROLE_AUTO_ENCODER,
    ROLE_AUTO_DECODER,
    ROLE_SEMANTIC_DECODER,
)


class ParameterSet:
    """Ordered map of named trainable tensors belonging to one network role."""

    def __init__(self, role: str):
        if role not in ROLES:
            raise ContractViolationError(f"unknown parameter role {role!r}")
        self.role = role
        self._params: dict[str, Tensor] = {}

    def add(self, name: str, data: np.ndarray) -> Tensor:
        if name in self._params:
            raise ContractViolationError(f"duplicate parameter name {name!r}")
        t = Tensor(np.asarray(data, dtype=np.float64), requires_grad=True)
        self._params[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def items(self) -> Iterator[tuple[str, Tensor]]:
        return iter(self._params.items())

    def tensors(self) -> list[Tensor]:
        return list(self._params.values())

    def zero_grad(self) -> None:
        for t in self._params.values():
            t.grad = None

    def freeze(self) -> None:
        for t in self._params.values():
            t.requires_grad = False
            t.grad = None

    def unfreeze(self) -> None:
        for t in self._params.values():
            t.requires_grad = True

    def n_values(self) -> int:
        return sum(t.size for t in self._params.values())

    def state_bytes(self) -> bytes:
        """Concatenated little-endian float64 payload, for hashing."""
        return b"".join(
            np.ascontiguousarray(t.data, dtype="<f8").tobytes()
            for t in self._params.values()
        )

    def copy_values_from(self, other: "ParameterSet") -> None:
        if self.names() != other.names():
            raise ContractViolationError("parameter sets have different names")
        for name, t in self._params.items():
            t.data = other[name].data.copy()


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...],
                 fan_in: int) -> np.ndarray:
    """Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)
