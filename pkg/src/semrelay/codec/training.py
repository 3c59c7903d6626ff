"""Semantic codec trainer: end-to-end through a frozen channel autoencoder.

The loop mirrors the second training stage: load the pre-trained autoencoder
pair, batch sentences from the background knowledge, embed, encode
semantically, compress to symbols, perturb with the equalized fading channel
at the training SNR, reconstruct, decode with teacher forcing, and update only
the semantic parameter sets with token cross-entropy (PAD excluded).
"""

from __future__ import annotations

import hashlib
from typing import Optional, Sequence

import numpy as np

from ..autoencoder import AutoEncoderModel, decode_rows, encode_rows
from ..channel import snr_db_to_sigma2
from ..errors import ContractViolationError, TrainingFailureError
from ..nn import Tensor, cross_entropy_op, make_optimizer
from .model import CodecConfig, SemanticCodecModel, embed, key_padding_mask, sem_decode_train, sem_encode
from .vocab import BOS, EOS, PAD, Vocabulary


def batch_arrays(sentences: Sequence[Sequence[int]],
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pad a batch of index lists to (src, target_in, target_out) arrays.

    src: (B, L) PAD-padded tokens; target_in: (B, L+1) BOS-shifted;
    target_out: (B, L+1) tokens followed by EOS then PAD.
    """
    b = len(sentences)
    lmax = max(len(s) for s in sentences)
    src = np.full((b, lmax), PAD, dtype=np.int64)
    tgt_in = np.full((b, lmax + 1), PAD, dtype=np.int64)
    tgt_out = np.full((b, lmax + 1), PAD, dtype=np.int64)
    for i, s in enumerate(sentences):
        n = len(s)
        src[i, :n] = s
        tgt_in[i, 0] = BOS
        tgt_in[i, 1:n + 1] = s
        tgt_out[i, :n] = s
        tgt_out[i, n] = EOS
    return src, tgt_in, tgt_out


def sentence_noise(rng: np.random.Generator, batch: int, length: int,
                   n_symbols: int, sigma2: float) -> np.ndarray:
    """Equalized-channel perturbation with one fading draw per sentence.

    Returns additive real pairs of shape (batch * length, 2 * n_symbols)."""
    rows = batch * length
    if sigma2 <= 0:
        return np.zeros((rows, 2 * n_symbols))
    h = (rng.normal(0, np.sqrt(0.5), batch)
         + 1j * rng.normal(0, np.sqrt(0.5), batch))
    scale = np.sqrt(sigma2 / 2.0)
    n = (rng.normal(0, scale, (batch, length, n_symbols))
         + 1j * rng.normal(0, scale, (batch, length, n_symbols)))
    e = n / h[:, None, None]
    pairs = np.concatenate([e.real, e.imag], axis=2)
    return pairs.reshape(rows, 2 * n_symbols)


def _ae_digest(ae: AutoEncoderModel) -> str:
    payload = ae.encoder.state_bytes() + ae.decoder.state_bytes()
    return hashlib.sha256(payload).hexdigest()


def train_semantic(corpus: Sequence[Sequence[str]], vocab: Vocabulary,
                   ae_model: AutoEncoderModel, snr_db: Optional[float],
                   config: CodecConfig, rng: np.random.Generator,
                   steps: int, optimizer: str = "adam", lr: float = 1e-3,
                   ) -> tuple[SemanticCodecModel, list[float]]:
    """Train S_alpha / G_eta over the frozen autoencoder; returns model + loss trace."""
    if steps < 1:
        raise ContractViolationError(f"steps must be >= 1, got {steps}")
    if not corpus:
        raise ContractViolationError("corpus is empty")
    encoded = [vocab.encode(s) for s in corpus]
    too_long = max(len(s) for s in encoded)
    if too_long > config.max_len:
        raise ContractViolationError(
            f"corpus sentence length {too_long} exceeds max_len {config.max_len}")

    ae_model.freeze()
    frozen_digest = _ae_digest(ae_model)

    model = SemanticCodecModel.init(config, vocab.size, rng)
    sigma2 = snr_db_to_sigma2(snr_db, ae_model.config.power)
    n_sym = ae_model.config.n_symbols
    step_alpha = make_optimizer(optimizer, model.alpha, lr)
    step_eta = make_optimizer(optimizer, model.eta, lr)

    losses: list[float] = []
    for step in range(steps):
        picks = rng.integers(len(encoded), size=config.batch_size)
        src, tgt_in, tgt_out = batch_arrays([encoded[i] for i in picks])
        b, lmax = src.shape

        e = embed(src, model.alpha["embed"], config)
        x = sem_encode(e, model, pad_mask=key_padding_mask(src))
        y = encode_rows(x.reshape(b * lmax, config.d_model), ae_model)
        noise = sentence_noise(rng, b, lmax, n_sym, sigma2)
        x_hat = decode_rows(y + Tensor(noise), ae_model)
        x_hat = x_hat.reshape(b, lmax, config.d_model)
        logits = sem_decode_train(x_hat, tgt_in, model,
                                  memory_pad_mask=key_padding_mask(src))
        loss = cross_entropy_op(logits, tgt_out, mask=(tgt_out != PAD))

        value = loss.item()
        if not np.isfinite(value):
            raise TrainingFailureError(step)
        losses.append(value)
        model.alpha.zero_grad()
        model.eta.zero_grad()
        loss.backward()
        step_alpha()
        step_eta()

    for ps in (ae_model.encoder, ae_model.decoder):
        for name, t in ps.items():
            if t.grad is not None:
                raise ContractViolationError(
                    f"frozen autoencoder parameter {name!r} accumulated a gradient")
    if _ae_digest(ae_model) != frozen_digest:
        raise ContractViolationError("frozen autoencoder parameters changed during training")
    return model, losses
