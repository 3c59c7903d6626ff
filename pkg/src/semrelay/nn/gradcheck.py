"""Finite-difference validation of analytic gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import CheckInvalidError
from .params import ParameterSet
from .tensor import Tensor

FD_STEP = 1e-4


def grad_check(f: Callable[[], Tensor], params: ParameterSet | Sequence[ParameterSet],
               probes: int, rng: np.random.Generator,
               step: float = FD_STEP) -> float:
    """Compare analytic gradients of the scalar f() against central differences.

    Probes `probes` randomly chosen parameter entries and returns the maximum
    relative error |analytic - numeric| / max(1, |analytic|, |numeric|).
    f must be deterministic: two evaluations at the same parameters must agree
    bit-for-bit, otherwise the check is meaningless and CheckInvalidError is
    raised.
    """
    sets = [params] if isinstance(params, ParameterSet) else list(params)

    first = f().item()
    if f().item() != first:
        raise CheckInvalidError("function is not deterministic under fixed inputs")

    for ps in sets:
        ps.zero_grad()
    loss = f()
    loss.backward()

    entries = []
    for ps in sets:
        for name, tensor in ps.items():
            entries.append((ps, name, tensor))

    max_rel = 0.0
    for _ in range(probes):
        ps, name, tensor = entries[rng.integers(len(entries))]
        flat_idx = int(rng.integers(tensor.size))
        idx = np.unravel_index(flat_idx, tensor.shape)
        analytic = 0.0 if tensor.grad is None else float(tensor.grad[idx])
        original = float(tensor.data[idx])
        tensor.data[idx] = original + step
        up = f().item()
        tensor.data[idx] = original - step
        down = f().item()
        tensor.data[idx] = original
        numeric = (up - down) / (2.0 * step)
        rel = abs(analytic - numeric) / max(1.0, abs(analytic), abs(numeric))
        max_rel = max(max_rel, rel)
    return max_rel
