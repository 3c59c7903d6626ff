"""Experiment orchestration: single trials, SNR sweeps, placement sweeps,
CSV output.

Determinism contract: every random draw in a trial comes from generators
derived from (seed, point index, trial index, purpose), so serial and
parallel executions agree exactly and different strategies see identical
channel realizations per trial index.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .autoencoder import AutoEncoderModel, ae_decode, ae_encode
from .channel import (
    LinkBudget,
    apply_channel,
    db_to_linear,
    equalize,
    sample_realization,
    snr_for_hop,
)
from .codec.model import encode_sentence, sem_decode_infer
from .corpus import BackgroundKnowledge, GeneratedCorpora
from .errors import ConfigError, ContractViolationError, DeepFadeError
from .metrics import BleuConfig, bleu, cosine_similarity
from .relay import (
    RelayStrategy,
    TranslationLexicon,
    forward_af,
    forward_df,
    forward_df_semantic,
    forward_sf,
)

_SUB_SENTENCE, _SUB_HOP1, _SUB_HOP2 = 0, 1, 2


@dataclass
class ExperimentModels:
    """Frozen, trained models shared by every trial of a sweep."""

    ae: AutoEncoderModel
    bk_source: BackgroundKnowledge
    bk_dest: BackgroundKnowledge
    lexicon: Optional[TranslationLexicon] = None
    pairs: list[tuple[list[str], list[str]]] = field(default_factory=list)

    def __post_init__(self):
        if not self.pairs:
            self.pairs = [(s, list(s)) for s in self.bk_source.sentences]

    @classmethod
    def shared(cls, ae: AutoEncoderModel, bk: BackgroundKnowledge) -> "ExperimentModels":
        return cls(ae=ae, bk_source=bk, bk_dest=bk, lexicon=TranslationLexicon([]))

    @classmethod
    def mismatched(cls, ae: AutoEncoderModel, corpora: GeneratedCorpora) -> "ExperimentModels":
        return cls(ae=ae, bk_source=corpora.bk_source, bk_dest=corpora.bk_dest,
                   lexicon=corpora.lexicon, pairs=corpora.pairs)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.ae.encoder.state_bytes())
        h.update(self.ae.decoder.state_bytes())
        for bk in (self.bk_source, self.bk_dest):
            if bk.codec is not None:
                h.update(bk.codec.alpha.state_bytes())
                h.update(bk.codec.eta.state_bytes())
        return h.hexdigest()


@dataclass
class ExperimentConfig:
    """One sweep's knobs. Exactly one of snr_db / budget describes the link."""

    seed: int = 0
    trials: int = 100
    strategy: str = "df"
    snr_db: Optional[list[float]] = None
    fixed_snr1_db: Optional[float] = None
    budget: Optional[LinkBudget] = None
    d_grid: Optional[list[float]] = None
    relay_power: float = 1.0
    workers: int = 1
    bleu: BleuConfig = field(default_factory=BleuConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trial count must be >= 1")
        if (self.snr_db is None) == (self.budget is None):
            raise ConfigError("exactly one of snr_db / budget must be set")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        RelayStrategy(self.strategy, self.relay_power)  # validates tag/power


@dataclass
class TrialResult:
    sentence_in: str
    sentence_out: Optional[str]
    bleu: Optional[float]
    cosine: Optional[float]
    symbols: int
    deep_fade: bool = False
    semantic_failure: bool = False

    @property
    def failed(self) -> bool:
        return self.deep_fade or self.semantic_failure


@dataclass
class SweepPoint:
    axis: float
    strategy: str
    trials: int
    bleu_mean: float
    bleu_std: float
    cosine_mean: float
    cosine_std: float
    fail_rate: float
    symbols_mean: float


@dataclass
class SweepResult:
    axis_name: str
    points: list[SweepPoint]


def trial_rng(seed: int, point: int, trial: int, sub: int) -> np.random.Generator:
    """Deterministic per-(point, trial, purpose) RNG stream."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(point, trial, sub)))


def run_trial(models: ExperimentModels, strategy: str,
              sigma2_1: float, sigma2_2: float,
              rng_hop1: np.random.Generator, rng_hop2: np.random.Generator,
              pair: tuple[Sequence[str], Sequence[str]],
              relay_power: float = 1.0,
              bleu_config: BleuConfig = BleuConfig()) -> TrialResult:
    """Send one sentence end to end under the given strategy.

    Pipeline: semantic encode at the source, hop 1, relay forward, hop 2,
    equalize, autoencoder decode, greedy semantic decode at the destination,
    then BLEU against the reference and cosine between the transmitted and
    reconstructed semantic tensors (when shapes agree).
    """
    sentence, reference = list(pair[0]), list(pair[1])
    src_bk, dst_bk = models.bk_source, models.bk_dest
    ids = src_bk.vocab.encode(sentence)
    x = encode_sentence(np.array(ids), src_bk.codec)
    block = ae_encode(x, models.ae)
    n_sym = models.ae.config.n_symbols
    symbols = len(block)
    sent_in = " ".join(sentence)

    ch1 = sample_realization(rng_hop1, sigma2_1)
    y_hat = apply_channel(block, ch1, rng_hop1)
    ch2 = sample_realization(rng_hop2, sigma2_2)

    try:
        if strategy == "af":
            out = forward_af(y_hat, ch1, p_r=relay_power, p_s=block.power)
            z_hat = apply_channel(out.block, ch2, rng_hop2)
            composite = ch2.h * out.af_gain * ch1.h
            received = equalize(z_hat, replace(ch2, h=composite, sigma2=sigma2_2))
        elif strategy == "df":
            out = forward_df(y_hat, ch1, models.ae, p_r=relay_power)
            z_hat = apply_channel(out.block, ch2, rng_hop2)
            received = equalize(z_hat, ch2)
        elif strategy == "df-semantic":
            out = forward_df_semantic(y_hat, ch1, models.ae, src_bk, p_r=relay_power)
            if out.block is None or out.semantic_failure:
                return TrialResult(sent_in, None, None, None, symbols,
                                   semantic_failure=True)
            z_hat = apply_channel(out.block, ch2, rng_hop2)
            received = equalize(z_hat, ch2)
        elif strategy == "sf":
            if models.lexicon is None:
                raise ContractViolationError("sf strategy requires a lexicon")
            out = forward_sf(y_hat, ch1, src_bk, dst_bk, models.lexicon,
                             models.ae, p_r=relay_power)
            if out.block is None or out.semantic_failure:
                return TrialResult(sent_in, None, None, None, symbols,
                                   semantic_failure=True)
            z_hat = apply_channel(out.block, ch2, rng_hop2)
            received = equalize(z_hat, ch2)
        else:
            raise ContractViolationError(f"unknown strategy {strategy!r}")
    except DeepFadeError:
        return TrialResult(sent_in, None, None, None, symbols, deep_fade=True)

    symbols += len(received)
    x_hat = ae_decode(received, models.ae)
    out_ids, _ = sem_decode_infer(x_hat, dst_bk.codec)
    decoded = dst_bk.vocab.decode(out_ids)
    score = bleu(decoded, reference, bleu_config) if decoded else 0.0
    cosine = None
    if x_hat.shape == x.shape:
        cosine = cosine_similarity(x.reshape(-1), x_hat.reshape(-1))
    return TrialResult(sent_in, " ".join(decoded) if decoded else "",
                       score, cosine, symbols)


def _aggregate(axis: float, strategy: str, results: list[TrialResult]) -> SweepPoint:
    ok = [r for r in results if not r.failed]
    bleus = np.array([r.bleu for r in ok], dtype=np.float64)
    cosines = np.array([r.cosine for r in ok if r.cosine is not None], dtype=np.float64)
    symbols = np.array([r.symbols for r in results], dtype=np.float64)
    return SweepPoint(
        axis=axis,
        strategy=strategy,
        trials=len(results),
        bleu_mean=float(bleus.mean()) if bleus.size else float("nan"),
        bleu_std=float(bleus.std()) if bleus.size else float("nan"),
        cosine_mean=float(cosines.mean()) if cosines.size else float("nan"),
        cosine_std=float(cosines.std()) if cosines.size else float("nan"),
        fail_rate=(len(results) - len(ok)) / len(results),
        symbols_mean=float(symbols.mean()),
    )


def _point_trials(models: ExperimentModels, cfg: ExperimentConfig,
                  point_idx: int, sigma2_1: float, sigma2_2: float
                  ) -> list[TrialResult]:
    def one(trial_idx: int) -> TrialResult:
        pick = trial_rng(cfg.seed, point_idx, trial_idx, _SUB_SENTENCE)
        pair = models.pairs[int(pick.integers(len(models.pairs)))]
        return run_trial(
            models, cfg.strategy, sigma2_1, sigma2_2,
            rng_hop1=trial_rng(cfg.seed, point_idx, trial_idx, _SUB_HOP1),
            rng_hop2=trial_rng(cfg.seed, point_idx, trial_idx, _SUB_HOP2),
            pair=pair, relay_power=cfg.relay_power, bleu_config=cfg.bleu)

    if cfg.workers == 1:
        return [one(t) for t in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(one, range(cfg.trials)))


def run_snr_sweep(models: ExperimentModels, cfg: ExperimentConfig) -> SweepResult:
    """BLEU/cosine versus per-hop SNR. With fixed_snr1_db set, hop 1 stays at
    that SNR and the axis sweeps the relay-to-destination hop only."""
    if cfg.snr_db is None:
        raise ConfigError("snr sweep requires explicit snr_db list")
    points = []
    for idx, snr in enumerate(cfg.snr_db):
        snr1 = cfg.fixed_snr1_db if cfg.fixed_snr1_db is not None else snr
        sigma2_1 = 1.0 / db_to_linear(snr1)
        sigma2_2 = 1.0 / db_to_linear(snr)
        results = _point_trials(models, cfg, idx, sigma2_1, sigma2_2)
        points.append(_aggregate(snr, cfg.strategy, results))
    return SweepResult(axis_name="snr_db", points=points)


def run_placement_sweep(models: ExperimentModels, cfg: ExperimentConfig) -> SweepResult:
    """BLEU/cosine versus relay position d, per-hop SNRs from the link budget."""
    if cfg.budget is None:
        raise ConfigError("placement sweep requires a link budget")
    if cfg.d_grid is None or not cfg.d_grid:
        raise ConfigError("placement sweep requires a d grid")
    for d in cfg.d_grid:
        if not 0.0 < d < 1.0:
            raise ConfigError(f"relay position d={d} outside (0, 1)")
    points = []
    for idx, d in enumerate(cfg.d_grid):
        budget = replace(cfg.budget, d=d)
        sigma2_1 = 1.0 / snr_for_hop(budget, "source-relay")
        sigma2_2 = 1.0 / snr_for_hop(budget, "relay-destination")
        results = _point_trials(models, cfg, idx, sigma2_1, sigma2_2)
        points.append(_aggregate(d, cfg.strategy, results))
    return SweepResult(axis_name="d", points=points)


def evaluate_point(models: ExperimentModels, cfg: ExperimentConfig,
                   snr1_db: float, snr2_db: float) -> SweepPoint:
    """Aggregate trials at one explicit per-hop SNR pair."""
    sigma2_1 = 1.0 / db_to_linear(snr1_db)
    sigma2_2 = 1.0 / db_to_linear(snr2_db)
    results = _point_trials(models, cfg, 0, sigma2_1, sigma2_2)
    return _aggregate(snr2_db, cfg.strategy, results)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def sweep_to_csv(results: SweepResult | Sequence[SweepResult]) -> str:
    """Render one or more sweeps (e.g. several strategies) as CSV text."""
    sweeps = [results] if isinstance(results, SweepResult) else list(results)
    lines = ["axis,strategy,trials,bleu_mean,bleu_std,cosine_mean,cosine_std,"
             "fail_rate,symbols_per_sentence_mean"]
    for sweep in sweeps:
        for p in sweep.points:
            lines.append(",".join([
                _fmt(p.axis), p.strategy, str(p.trials),
                _fmt(p.bleu_mean), _fmt(p.bleu_std),
                _fmt(p.cosine_mean), _fmt(p.cosine_std),
                _fmt(p.fail_rate), _fmt(p.symbols_mean),
            ]))
    return "\n".join(lines) + "\n"


def gnuplot_script(csv_path: str, axis_name: str) -> str:
    """Companion plotting script for a sweep CSV."""
    return (
        "set datafile separator ','\n"
        f"set xlabel '{axis_name}'\n"
        "set ylabel 'BLEU'\n"
        "set yrange [0:1]\n"
        "set key outside\n"
        f"plot '{csv_path}' every ::1 using 1:4 with linespoints title 'bleu_mean'\n"
    )
