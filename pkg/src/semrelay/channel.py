"""Complex baseband channel: Rayleigh block fading, AWGN, power and SNR
accounting, and the two-hop path-loss geometry.

Conventions: unit-mean-power fading (E[|h|^2] = 1), noise variance sigma2 per
complex symbol, SNR = mean received symbol energy / sigma2. One fading draw
per transmitted block per hop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    ContractViolationError,
    DeepFadeError,
    DegenerateBlockError,
    DimensionError,
)

DEEP_FADE_THRESHOLD = 1e-12

Hop = Literal["source-relay", "relay-destination"]


@dataclass
class SymbolBlock:
    """N complex channel symbols plus the power budget they were shaped to."""

    symbols: np.ndarray
    power: float = 1.0

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.complex128)
        if self.symbols.ndim != 1 or self.symbols.size < 1:
            raise DimensionError(
                f"symbol block must be a non-empty 1-D array, got shape {self.symbols.shape}")
        if not np.all(np.isfinite(self.symbols.view(np.float64))):
            raise ContractViolationError("symbol block contains non-finite values")

    def __len__(self) -> int:
        return self.symbols.size

    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.symbols) ** 2))


@dataclass(frozen=True)
class ChannelRealization:
    """One hop's fading coefficient and noise variance."""

    h: complex
    sigma2: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ContractViolationError(f"sigma2 must be >= 0, got {self.sigma2}")
        if not (np.isfinite(self.h.real) and np.isfinite(self.h.imag)):
            raise ContractViolationError("fading coefficient must be finite")


@dataclass(frozen=True)
class LinkBudget:
    """Two-hop link: transmit powers, relay position d in (0,1), path-loss
    exponent and noise variance. Powers stored linear."""

    p1: float
    p2: float
    d: float
    gamma: float = 2.0
    sigma2: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.d < 1.0):
            raise ContractViolationError(f"relay position d must be in (0,1), got {self.d}")
        if self.gamma < 0:
            raise ContractViolationError(f"path-loss exponent must be >= 0, got {self.gamma}")
        if self.p1 <= 0 or self.p2 <= 0:
            raise ContractViolationError("transmit powers must be positive")
        if self.sigma2 <= 0:
            raise ContractViolationError("noise variance must be positive")


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


def linear_to_db(x: float) -> float:
    return float(10.0 * np.log10(x))


def snr_db_to_sigma2(snr_db: float | None, power: float = 1.0) -> float:
    """Noise variance that realizes the given per-hop SNR at received power
    `power`. None means a noiseless hop."""
    if snr_db is None:
        return 0.0
    return power / db_to_linear(snr_db)


def sample_realization(rng: np.random.Generator, sigma2: float) -> ChannelRealization:
    """Draw h ~ CN(0,1): circularly-symmetric, unit mean power, Rayleigh envelope."""
    if sigma2 < 0:
        raise ContractViolationError(f"sigma2 must be >= 0, got {sigma2}")
    scale = np.sqrt(0.5)
    h = complex(rng.normal(0.0, scale), rng.normal(0.0, scale))
    return ChannelRealization(h=h, sigma2=float(sigma2))


def apply_channel(block: SymbolBlock, ch: ChannelRealization,
                  rng: np.random.Generator) -> SymbolBlock:
    """Block-fading hop: every symbol mapped to h*y + n, n ~ CN(0, sigma2) iid."""
    n = block.symbols.size
    if ch.sigma2 > 0:
        scale = np.sqrt(ch.sigma2 / 2.0)
        noise = rng.normal(0.0, scale, n) + 1j * rng.normal(0.0, scale, n)
    else:
        noise = np.zeros(n, dtype=np.complex128)
    return SymbolBlock(ch.h * block.symbols + noise, power=block.power)


def equalize(block: SymbolBlock, ch: ChannelRealization) -> SymbolBlock:
    """Zero-forcing with perfect CSI: divide by h. Deep fades are refused so
    the trial can record a decode failure instead of propagating Inf."""
    if abs(ch.h) < DEEP_FADE_THRESHOLD:
        raise DeepFadeError(f"|h| = {abs(ch.h):.3e} below {DEEP_FADE_THRESHOLD}")
    return SymbolBlock(block.symbols / ch.h, power=block.power)


def snr_for_hop(budget: LinkBudget, hop: Hop) -> float:
    """Linear per-hop SNR including d^(-gamma) path loss."""
    if hop == "source-relay":
        return budget.p1 * budget.d ** (-budget.gamma) / budget.sigma2
    if hop == "relay-destination":
        return budget.p2 * (1.0 - budget.d) ** (-budget.gamma) / budget.sigma2
    raise ContractViolationError(f"unknown hop {hop!r}")


def normalize_power(block: SymbolBlock, power: float) -> SymbolBlock:
    """Scale the block so mean per-symbol energy equals `power`."""
    if power <= 0:
        raise ContractViolationError(f"power must be positive, got {power}")
    energy = block.mean_energy()
    if energy == 0.0:
        raise DegenerateBlockError("cannot normalize an all-zero block")
    return SymbolBlock(block.symbols * np.sqrt(power / energy), power=power)


def pack_symbols(reals: np.ndarray) -> np.ndarray:
    """Pair 2N reals per row into N complex symbols: first half in-phase,
    second half quadrature. Accepts (..., 2N); returns flattened symbols."""
    reals = np.asarray(reals, dtype=np.float64)
    if reals.shape[-1] % 2 != 0:
        raise DimensionError(f"last axis must be even, got shape {reals.shape}")
    n = reals.shape[-1] // 2
    sym = reals[..., :n] + 1j * reals[..., n:]
    return sym.reshape(-1)


def unpack_symbols(symbols: np.ndarray, n_per_row: int) -> np.ndarray:
    """Inverse of pack_symbols: (L*n_per_row,) complex -> (L, 2*n_per_row) reals."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size % n_per_row != 0:
        raise DimensionError(
            f"block of {symbols.size} symbols is not a multiple of {n_per_row}")
    sym = symbols.reshape(-1, n_per_row)
    return np.concatenate([sym.real, sym.imag], axis=1)
