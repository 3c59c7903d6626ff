"""Channel autoencoder: compresses D-dimensional semantic rows into N complex
symbols and reconstructs them on the far side of the fading channel.

The encoder runs D -> M -> 2N with a bounded hidden activation; the decoder
mirrors it (2N -> M -> D). Each row's 2N outputs are paired into N complex
symbols and scaled to the configured per-symbol power. Training draws random
rows in [-2, 2], passes them through the equalized Rayleigh channel at the
requested SNR and minimizes reconstruction MSE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import SymbolBlock, pack_symbols, snr_db_to_sigma2, unpack_symbols
from .errors import ContractViolationError, DimensionError, TrainingFailureError
from .nn import (
    ParameterSet,
    ROLE_AUTO_DECODER,
    ROLE_AUTO_ENCODER,
    Tensor,
    dense_forward,
    make_optimizer,
    mse_op,
    uniform_init,
)


@dataclass(frozen=True)
class AutoEncoderConfig:
    input_dim: int = 32   # D, per-token semantic width
    hidden_dim: int = 24  # M
    n_symbols: int = 8    # N complex symbols per row (2N real outputs)
    activation: str = "tanh"
    power: float = 1.0

    def __post_init__(self):
        if self.input_dim < 1 or self.hidden_dim < 1 or self.n_symbols < 1:
            raise ContractViolationError("all autoencoder dims must be >= 1")
        if self.power <= 0:
            raise ContractViolationError("power must be positive")

    @property
    def pair_dim(self) -> int:
        return 2 * self.n_symbols


class AutoEncoderModel:
    """Encoder/decoder parameter pair with mirrored layer dimensions."""

    def __init__(self, encoder: ParameterSet, decoder: ParameterSet,
                 config: AutoEncoderConfig):
        self.encoder = encoder
        self.decoder = decoder
        self.config = config
        self._assert_symmetry()

    @classmethod
    def init(cls, config: AutoEncoderConfig, rng: np.random.Generator) -> "AutoEncoderModel":
        d, m, p = config.input_dim, config.hidden_dim, config.pair_dim
        enc = ParameterSet(ROLE_AUTO_ENCODER)
        enc.add("w1", uniform_init(rng, (d, m), d))
        enc.add("b1", np.zeros(m))
        enc.add("w2", uniform_init(rng, (m, p), m))
        enc.add("b2", np.zeros(p))
        dec = ParameterSet(ROLE_AUTO_DECODER)
        dec.add("w1", uniform_init(rng, (p, m), p))
        dec.add("b1", np.zeros(m))
        dec.add("w2", uniform_init(rng, (m, d), m))
        dec.add("b2", np.zeros(d))
        return cls(enc, dec, config)

    def _assert_symmetry(self) -> None:
        d, m, p = self.config.input_dim, self.config.hidden_dim, self.config.pair_dim
        if self.encoder["w1"].shape != (d, m) or self.encoder["w2"].shape != (m, p):
            raise DimensionError(
                f"encoder dims {self.encoder['w1'].shape}->{self.encoder['w2'].shape} "
                f"do not realize {d}->{m}->{p}")
        if self.decoder["w1"].shape != (p, m) or self.decoder["w2"].shape != (m, d):
            raise DimensionError(
                f"decoder dims {self.decoder['w1'].shape}->{self.decoder['w2'].shape} "
                f"do not mirror {p}->{m}->{d}")

    def freeze(self) -> None:
        self.encoder.freeze()
        self.decoder.freeze()


def encode_rows(x: Tensor, model: AutoEncoderModel) -> Tensor:
    """(B, D) rows -> (B, 2N) power-normalized symbol pairs."""
    cfg = model.config
    if x.shape[-1] != cfg.input_dim:
        raise DimensionError(
            f"input dim {x.shape[-1]} != configured {cfg.input_dim}")
    h = dense_forward(x, model.encoder["w1"], model.encoder["b1"], cfg.activation)
    y = dense_forward(h, model.encoder["w2"], model.encoder["b2"], "identity")
    # scale each row so its N complex symbols average `power` energy
    energy = (y * y).sum(axis=-1, keepdims=True)
    inv_scale = (energy * (1.0 / (cfg.n_symbols * cfg.power))).sqrt()
    return y / inv_scale


def decode_rows(y: Tensor, model: AutoEncoderModel) -> Tensor:
    """(B, 2N) received pairs -> (B, D) reconstruction."""
    cfg = model.config
    if y.shape[-1] != cfg.pair_dim:
        raise DimensionError(
            f"pair dim {y.shape[-1]} != configured {cfg.pair_dim}")
    h = dense_forward(y, model.decoder["w1"], model.decoder["b1"], cfg.activation)
    return dense_forward(h, model.decoder["w2"], model.decoder["b2"], "identity")


def ae_encode(x: np.ndarray, model: AutoEncoderModel) -> SymbolBlock:
    """Encode semantic rows (L, D) into a block of L*N complex symbols."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    pairs = encode_rows(Tensor(x), model).data
    return SymbolBlock(pack_symbols(pairs), power=model.config.power)


def ae_decode(block: SymbolBlock, model: AutoEncoderModel) -> np.ndarray:
    """Decode a symbol block back to (L, D) semantic rows."""
    pairs = unpack_symbols(block.symbols, model.config.n_symbols)
    return decode_rows(Tensor(pairs), model).data


def equalized_noise(rng: np.random.Generator, rows: int, n_symbols: int,
                    sigma2: float) -> np.ndarray:
    """Additive real-pair noise seen after zero-forcing a Rayleigh block fade:
    n/h with n ~ CN(0, sigma2), one independent h per row."""
    if sigma2 <= 0:
        return np.zeros((rows, 2 * n_symbols))
    h = (rng.normal(0, np.sqrt(0.5), rows)
         + 1j * rng.normal(0, np.sqrt(0.5), rows))
    scale = np.sqrt(sigma2 / 2.0)
    n = (rng.normal(0, scale, (rows, n_symbols))
         + 1j * rng.normal(0, scale, (rows, n_symbols)))
    e = n / h[:, None]
    return np.concatenate([e.real, e.imag], axis=1)


def train_autoencoder(config: AutoEncoderConfig, snr_db: Optional[float],
                      steps: int, batch_size: int, rng: np.random.Generator,
                      optimizer: str = "adam", lr: float = 1e-3,
                      ) -> tuple[AutoEncoderModel, list[float]]:
    """Train F_beta / D_theta on random rows through the fading channel.

    Each step: draw a batch uniform in [-2, 2], encode, add the equalized
    channel perturbation at the training SNR, decode, take an MSE gradient
    step on both parameter sets. Returns the model and the per-step loss.
    """
    if steps < 1:
        raise ContractViolationError(f"steps must be >= 1, got {steps}")
    if batch_size < 1:
        raise ContractViolationError(f"batch_size must be >= 1, got {batch_size}")
    model = AutoEncoderModel.init(config, rng)
    sigma2 = snr_db_to_sigma2(snr_db, config.power)
    step_enc = make_optimizer(optimizer, model.encoder, lr)
    step_dec = make_optimizer(optimizer, model.decoder, lr)
    losses: list[float] = []
    for step in range(steps):
        x = rng.uniform(-2.0, 2.0, (batch_size, config.input_dim))
        y = encode_rows(Tensor(x), model)
        noise = equalized_noise(rng, batch_size, config.n_symbols, sigma2)
        y_hat = y + Tensor(noise)
        x_hat = decode_rows(y_hat, model)
        loss = mse_op(x, x_hat)
        value = loss.item()
        if not np.isfinite(value):
            raise TrainingFailureError(step)
        losses.append(value)
        model.encoder.zero_grad()
        model.decoder.zero_grad()
        loss.backward()
        step_enc()
        step_dec()
    return model, losses


def reconstruction_mse(model: AutoEncoderModel, snr_db: Optional[float],
                       n_rows: int, rng: np.random.Generator) -> float:
    """Held-out reconstruction MSE on fresh uniform rows at the given SNR."""
    cfg = model.config
    x = rng.uniform(-2.0, 2.0, (n_rows, cfg.input_dim))
    y = encode_rows(Tensor(x), model).data
    sigma2 = snr_db_to_sigma2(snr_db, cfg.power)
    y_hat = y + equalized_noise(rng, n_rows, cfg.n_symbols, sigma2)
    x_hat = decode_rows(Tensor(y_hat), model).data
    return float(np.mean((x - x_hat) ** 2))
