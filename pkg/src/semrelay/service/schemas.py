"""Request/response models for the simulator service.

These models double as the documented JSON config schema: the CLI loads a
JSON file into the matching request model, so every field here is a config
key.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

Strategy = Literal["af", "df", "df-semantic", "sf"]


class AutoEncoderSettings(BaseModel):
    input_dim: int = 32
    hidden_dim: int = 24
    n_symbols: int = 8
    activation: Literal["identity", "relu", "tanh"] = "tanh"
    power: float = 1.0


class CodecSettings(BaseModel):
    d_model: int = 32
    n_encoder_blocks: int = 2
    n_decoder_blocks: int = 2
    n_heads: int = 2
    ff_dim: int = 64
    max_len: int = 16
    batch_size: int = 16
    positional: bool = True


class LinkBudgetSettings(BaseModel):
    p1_db: float = 5.0
    p2_db: float = 5.0
    gamma: float = 2.0
    sigma2: float = 1.0


class GenCorpusRequest(BaseModel):
    seed: int = 0
    n_sentences: int = 180
    divergence: float = 1.0
    out_dir: str

    model_config = {"extra": "forbid"}


class GenCorpusResponse(BaseModel):
    source_sentences: str
    dest_sentences: str
    source_vocab: str
    dest_vocab: str
    lexicon: str
    n_pairs: int
    source_vocab_size: int
    dest_vocab_size: int
    lexicon_rules: int


class TrainAutoencoderRequest(BaseModel):
    seed: int = 0
    snr_db: Optional[float] = 12.0
    steps: int = 5000
    batch_size: int = 64
    lr: float = 1e-3
    optimizer: Literal["adam", "sgd"] = "adam"
    autoencoder: AutoEncoderSettings = Field(default_factory=AutoEncoderSettings)
    out_path: str

    model_config = {"extra": "forbid"}


class TrainAutoencoderResponse(BaseModel):
    model_path: str
    steps: int
    first_loss: float
    final_loss: float


class TrainSemanticRequest(BaseModel):
    seed: int = 0
    snr_db: Optional[float] = 5.0
    steps: int = 3000
    lr: float = 1e-3
    optimizer: Literal["adam", "sgd"] = "adam"
    codec: CodecSettings = Field(default_factory=CodecSettings)
    ae_model: str
    sentences: str
    out_path: str

    model_config = {"extra": "forbid"}


class TrainSemanticResponse(BaseModel):
    model_path: str
    vocab_size: int
    steps: int
    first_loss: float
    final_loss: float


class ModelPaths(BaseModel):
    """Trained artifacts a sweep or eval runs against."""

    ae_model: str
    source_codec: str
    source_sentences: str
    dest_codec: Optional[str] = None
    dest_sentences: Optional[str] = None
    lexicon: Optional[str] = None

    @model_validator(mode="after")
    def _paired(self):
        dest_bits = (self.dest_codec, self.dest_sentences)
        if any(x is not None for x in dest_bits) and any(x is None for x in dest_bits):
            raise ValueError("dest_codec and dest_sentences must be given together")
        return self


class PointSummary(BaseModel):
    axis: float
    strategy: str
    trials: int
    bleu_mean: float
    bleu_std: float
    cosine_mean: float
    cosine_std: float
    fail_rate: float
    symbols_per_sentence_mean: float


class EvalRequest(BaseModel):
    seed: int = 0
    trials: int = 100
    strategy: Strategy = "df"
    snr1_db: float = 12.0
    snr2_db: float = 12.0
    relay_power: float = 1.0
    workers: int = 1
    models: ModelPaths

    model_config = {"extra": "forbid"}


class EvalResponse(BaseModel):
    point: PointSummary


class SnrSweepRequest(BaseModel):
    seed: int = 0
    trials: int = 100
    strategies: list[Strategy] = ["df"]
    snr_db: list[float]
    fixed_snr1_db: Optional[float] = None
    relay_power: float = 1.0
    workers: int = 1
    models: ModelPaths

    model_config = {"extra": "forbid"}


class PlacementSweepRequest(BaseModel):
    seed: int = 0
    trials: int = 100
    strategies: list[Strategy] = ["df"]
    d: list[float]
    budget: LinkBudgetSettings = Field(default_factory=LinkBudgetSettings)
    relay_power: float = 1.0
    workers: int = 1
    models: ModelPaths

    model_config = {"extra": "forbid"}


class SweepResponse(BaseModel):
    axis: str
    points: list[PointSummary]
    csv: str


class ErrorResponse(BaseModel):
    error: str
    detail: str
