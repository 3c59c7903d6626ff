"""Toy-scale Transformer semantic encoder/decoder.

Encoder blocks: self-attention then feed-forward, each with residual +
layer norm. Decoder blocks add a third sublayer between them that attends
over the received semantic tensor. Sizes are configurable; defaults are
desk-scale (2+2 blocks, 2 heads, d_model 32).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ContractViolationError, DimensionError, LengthError, VocabularyError
from ..nn import (
    ParameterSet,
    ROLE_SEMANTIC_DECODER,
    ROLE_SEMANTIC_ENCODER,
    Tensor,
    dense_forward,
    embedding,
    uniform_init,
)
from .vocab import BOS, EOS, PAD, TokenSequence

NEG_INF = -1e9


@dataclass(frozen=True)
class CodecConfig:
    d_model: int = 32
    n_encoder_blocks: int = 2
    n_decoder_blocks: int = 2
    n_heads: int = 2
    ff_dim: int = 64
    max_len: int = 16
    batch_size: int = 16
    positional: bool = True

    def __post_init__(self):
        if self.d_model % self.n_heads != 0:
            raise ContractViolationError(
                f"d_model {self.d_model} not divisible by {self.n_heads} heads")
        if self.n_encoder_blocks < 1 or self.n_decoder_blocks < 1:
            raise ContractViolationError("block counts must be >= 1")
        if self.max_len < 1 or self.batch_size < 1:
            raise ContractViolationError("max_len and batch_size must be >= 1")

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads


def positional_encoding(length: int, d_model: int) -> np.ndarray:
    """Sinusoidal position table, shape (length, d_model)."""
    pos = np.arange(length)[:, None].astype(np.float64)
    i = np.arange(d_model)[None, :].astype(np.float64)
    angle = pos / np.power(10000.0, 2.0 * (i // 2) / d_model)
    table = np.where(i % 2 == 0, np.sin(angle), np.cos(angle))
    return table


class SemanticCodecModel:
    """S_alpha / G_eta parameter pair for one background knowledge."""

    def __init__(self, alpha: ParameterSet, eta: ParameterSet,
                 config: CodecConfig, vocab_size: int):
        self.alpha = alpha
        self.eta = eta
        self.config = config
        self.vocab_size = vocab_size

    @classmethod
    def init(cls, config: CodecConfig, vocab_size: int,
             rng: np.random.Generator) -> "SemanticCodecModel":
        if vocab_size < 5:
            raise ContractViolationError("vocab size must be >= 5")
        d, ff, v = config.d_model, config.ff_dim, vocab_size

        def add_attn(ps: ParameterSet, prefix: str) -> None:
            for w in ("wq", "wk", "wv", "wo"):
                ps.add(f"{prefix}.{w}", uniform_init(rng, (d, d), d))

        def add_ff(ps: ParameterSet, prefix: str) -> None:
            ps.add(f"{prefix}.w1", uniform_init(rng, (d, ff), d))
            ps.add(f"{prefix}.b1", np.zeros(ff))
            ps.add(f"{prefix}.w2", uniform_init(rng, (ff, d), ff))
            ps.add(f"{prefix}.b2", np.zeros(d))

        alpha = ParameterSet(ROLE_SEMANTIC_ENCODER)
        alpha.add("embed", uniform_init(rng, (v, d), d))
        for b in range(config.n_encoder_blocks):
            add_attn(alpha, f"enc{b}.attn")
            add_ff(alpha, f"enc{b}.ff")

        eta = ParameterSet(ROLE_SEMANTIC_DECODER)
        eta.add("embed", uniform_init(rng, (v, d), d))
        for b in range(config.n_decoder_blocks):
            add_attn(eta, f"dec{b}.self")
            add_attn(eta, f"dec{b}.cross")
            add_ff(eta, f"dec{b}.ff")
        eta.add("out.w", uniform_init(rng, (d, v), d))
        eta.add("out.b", np.zeros(v))
        return cls(alpha, eta, config, vocab_size)

    def freeze(self) -> None:
        self.alpha.freeze()
        self.eta.freeze()


def embed(indices: np.ndarray | TokenSequence, table: Tensor,
          config: CodecConfig) -> Tensor:
    """Token embedding plus sinusoidal positions: (..., L) ids -> (..., L, D)."""
    if isinstance(indices, TokenSequence):
        indices = np.asarray(indices.indices)
    idx = np.asarray(indices, dtype=np.int64)
    v = table.shape[0]
    if idx.min() < 0 or idx.max() >= v:
        raise VocabularyError(
            f"token index out of range [0, {v}): {int(idx.min())}..{int(idx.max())}")
    e = embedding(table, idx)
    if config.positional:
        pe = positional_encoding(idx.shape[-1], table.shape[1])
        e = e + Tensor(pe)
    return e


def _multi_head_attention(x_q: Tensor, x_kv: Tensor, params: ParameterSet,
                          prefix: str, config: CodecConfig,
                          mask: Optional[np.ndarray]) -> Tensor:
    b, lq, d = x_q.shape
    lk = x_kv.shape[1]
    h, dh = config.n_heads, config.head_dim

    def split(t: Tensor, length: int) -> Tensor:
        return t.reshape(b, length, h, dh).transpose((0, 2, 1, 3))

    q = split(x_q.matmul(params[f"{prefix}.wq"]), lq)
    k = split(x_kv.matmul(params[f"{prefix}.wk"]), lk)
    v = split(x_kv.matmul(params[f"{prefix}.wv"]), lk)
    scores = q.matmul(k.transpose((0, 1, 3, 2))) * (1.0 / np.sqrt(dh))
    if mask is not None:
        scores = scores + Tensor(mask)
    attn = scores.softmax()
    out = attn.matmul(v).transpose((0, 2, 1, 3)).reshape(b, lq, d)
    return out.matmul(params[f"{prefix}.wo"])


def _feed_forward(x: Tensor, params: ParameterSet, prefix: str) -> Tensor:
    hidden = dense_forward(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"], "relu")
    return dense_forward(hidden, params[f"{prefix}.w2"], params[f"{prefix}.b2"], "identity")


def key_padding_mask(ids: np.ndarray) -> np.ndarray:
    """(B, L) token ids -> additive mask (B, 1, 1, L) hiding PAD keys."""
    ids = np.asarray(ids)
    return np.where(ids == PAD, NEG_INF, 0.0)[:, None, None, :]


def causal_mask(length: int) -> np.ndarray:
    """(1, 1, L, L) additive mask hiding future positions."""
    m = np.triu(np.full((length, length), NEG_INF), k=1)
    return m[None, None, :, :]


def sem_encode(e: Tensor, model: SemanticCodecModel,
               pad_mask: Optional[np.ndarray] = None) -> Tensor:
    """Run the encoder stack over embedded rows (B, L, D) -> (B, L, D)."""
    cfg = model.config
    if e.ndim == 2:
        e = e.reshape(1, *e.shape)
    if e.shape[-1] != cfg.d_model:
        raise DimensionError(f"embedding width {e.shape[-1]} != d_model {cfg.d_model}")
    if e.shape[1] > cfg.max_len:
        raise LengthError(f"sequence length {e.shape[1]} exceeds max_len {cfg.max_len}")
    x = e
    for blk in range(cfg.n_encoder_blocks):
        a = _multi_head_attention(x, x, model.alpha, f"enc{blk}.attn", cfg, pad_mask)
        x = (x + a).layer_norm()
        f = _feed_forward(x, model.alpha, f"enc{blk}.ff")
        x = (x + f).layer_norm()
    return x


def sem_decode_train(memory: Tensor, target_in: np.ndarray,
                     model: SemanticCodecModel,
                     memory_pad_mask: Optional[np.ndarray] = None,
                     target_ids_for_mask: Optional[np.ndarray] = None) -> Tensor:
    """Teacher-forced decoder pass.

    memory: received semantic tensor (B, Ls, D); target_in: (B, Lt) ids of the
    right-shifted target sentence. Returns logits (B, Lt, V). Decoder
    self-attention is causally masked; PAD keys are hidden on both streams.
    """
    cfg = model.config
    target_in = np.asarray(target_in, dtype=np.int64)
    if target_in.ndim == 1:
        target_in = target_in[None, :]
    if memory.ndim == 2:
        memory = memory.reshape(1, *memory.shape)
    lt = target_in.shape[1]
    self_mask = causal_mask(lt)
    ids_for_mask = target_in if target_ids_for_mask is None else target_ids_for_mask
    self_mask = self_mask + key_padding_mask(ids_for_mask)
    x = embed(target_in, model.eta["embed"], cfg)
    for blk in range(cfg.n_decoder_blocks):
        a = _multi_head_attention(x, x, model.eta, f"dec{blk}.self", cfg, self_mask)
        x = (x + a).layer_norm()
        c = _multi_head_attention(x, memory, model.eta, f"dec{blk}.cross", cfg,
                                  memory_pad_mask)
        x = (x + c).layer_norm()
        f = _feed_forward(x, model.eta, f"dec{blk}.ff")
        x = (x + f).layer_norm()
    return dense_forward(x, model.eta["out.w"], model.eta["out.b"], "identity")


def sem_decode_infer(memory: np.ndarray, model: SemanticCodecModel,
                     max_len: Optional[int] = None) -> tuple[list[int], bool]:
    """Greedy autoregressive decode from BOS.

    Returns (generated token ids without BOS/EOS, truncated flag). Ties break
    toward the lowest token index; truncated is True when max_len was reached
    before EOS.
    """
    cfg = model.config
    limit = cfg.max_len if max_len is None else max_len
    if limit < 1:
        raise ContractViolationError(f"max_len must be >= 1, got {limit}")
    mem = Tensor(np.asarray(memory, dtype=np.float64))
    generated: list[int] = []
    for _ in range(limit):
        target_in = np.array([[BOS] + generated], dtype=np.int64)
        logits = sem_decode_train(mem, target_in, model)
        nxt = int(np.argmax(logits.data[0, -1]))
        if nxt == EOS:
            return generated, False
        generated.append(nxt)
    return generated, True


def encode_sentence(indices: np.ndarray | TokenSequence,
                    model: SemanticCodecModel) -> np.ndarray:
    """Embed and encode one sentence; returns the (L, D) semantic tensor."""
    if isinstance(indices, TokenSequence):
        indices = np.asarray(indices.indices)
    e = embed(np.asarray(indices)[None, :], model.alpha["embed"], model.config)
    return sem_encode(e, model).data[0]
