"""FastAPI service wrapping the simulator library.

Endpoints mirror the experiment lifecycle: generate corpora, train the
autoencoder, train semantic codecs, then evaluate/sweep against the stored
model files. Work is synchronous; at desk scale a training call takes well
under the patience of a local client. Library errors surface as HTTP 400
with the error class name, which the CLI relays to stderr.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..autoencoder import AutoEncoderConfig, train_autoencoder
from ..channel import db_to_linear, LinkBudget
from ..codec import CodecConfig, train_semantic
from ..corpus import BackgroundKnowledge, CorpusSpec, default_template_bank, generate_corpus
from ..errors import ConfigError, SemRelayError
from ..experiments import (
    ExperimentConfig,
    ExperimentModels,
    evaluate_point,
    run_placement_sweep,
    run_snr_sweep,
    sweep_to_csv,
)
from ..persist import load_autoencoder, load_codec, save_autoencoder, save_codec
from ..relay import TranslationLexicon
from . import schemas


def _read_sentences(path: str) -> list[list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    sentences = [line.split() for line in lines if line.strip()]
    if not sentences:
        raise ConfigError(f"no sentences in {path}")
    return sentences


def _load_bk(bk_id: str, sentences_path: str, codec_path: str) -> BackgroundKnowledge:
    bk = BackgroundKnowledge.from_sentences(bk_id, _read_sentences(sentences_path))
    codec = load_codec(codec_path)
    if codec.vocab_size != bk.vocab.size:
        raise ConfigError(
            f"codec {codec_path} was trained with V={codec.vocab_size}, "
            f"corpus {sentences_path} has V={bk.vocab.size}")
    bk.codec = codec
    return bk


def load_experiment_models(paths: schemas.ModelPaths) -> ExperimentModels:
    ae = load_autoencoder(paths.ae_model)
    bk_source = _load_bk("source", paths.source_sentences, paths.source_codec)
    if paths.dest_codec is None:
        return ExperimentModels.shared(ae, bk_source)
    bk_dest = _load_bk("dest", paths.dest_sentences, paths.dest_codec)
    lexicon = (TranslationLexicon.load(paths.lexicon) if paths.lexicon
               else TranslationLexicon([]))
    src = bk_source.sentences
    dst = bk_dest.sentences
    if len(src) != len(dst):
        raise ConfigError(
            f"source and destination corpora are not aligned "
            f"({len(src)} vs {len(dst)} sentences)")
    return ExperimentModels(ae=ae, bk_source=bk_source, bk_dest=bk_dest,
                            lexicon=lexicon, pairs=list(zip(src, dst)))


def _point_summary(p) -> schemas.PointSummary:
    return schemas.PointSummary(
        axis=p.axis, strategy=p.strategy, trials=p.trials,
        bleu_mean=p.bleu_mean, bleu_std=p.bleu_std,
        cosine_mean=p.cosine_mean, cosine_std=p.cosine_std,
        fail_rate=p.fail_rate, symbols_per_sentence_mean=p.symbols_mean)


def create_app() -> FastAPI:
    app = FastAPI(title="semrelay", version=__version__)

    @app.exception_handler(SemRelayError)
    async def _semrelay_error(request: Request, exc: SemRelayError) -> JSONResponse:
        return JSONResponse(status_code=400, content={
            "error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request: Request, exc: FileNotFoundError) -> JSONResponse:
        return JSONResponse(status_code=400, content={
            "error": "FileNotFoundError", "detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/corpus/generate", response_model=schemas.GenCorpusResponse)
    def corpus_generate(req: schemas.GenCorpusRequest) -> schemas.GenCorpusResponse:
        out = Path(req.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        corpora = generate_corpus(
            default_template_bank(),
            CorpusSpec(n_sentences=req.n_sentences, divergence=req.divergence),
            np.random.default_rng(req.seed))
        paths = {
            "source_sentences": out / "source.sentences.txt",
            "dest_sentences": out / "dest.sentences.txt",
            "source_vocab": out / "source.vocab.txt",
            "dest_vocab": out / "dest.vocab.txt",
            "lexicon": out / "lexicon.tsv",
        }
        _write_corpus(paths["source_sentences"], corpora.bk_source.sentences)
        _write_corpus(paths["dest_sentences"], corpora.bk_dest.sentences)
        corpora.bk_source.vocab.save(paths["source_vocab"])
        corpora.bk_dest.vocab.save(paths["dest_vocab"])
        corpora.lexicon.save(paths["lexicon"])
        return schemas.GenCorpusResponse(
            **{k: str(v) for k, v in paths.items()},
            n_pairs=len(corpora.pairs),
            source_vocab_size=corpora.bk_source.vocab.size,
            dest_vocab_size=corpora.bk_dest.vocab.size,
            lexicon_rules=len(corpora.lexicon))

    @app.post("/train/autoencoder", response_model=schemas.TrainAutoencoderResponse)
    def train_ae(req: schemas.TrainAutoencoderRequest) -> schemas.TrainAutoencoderResponse:
        cfg = AutoEncoderConfig(**req.autoencoder.model_dump())
        model, losses = train_autoencoder(
            cfg, snr_db=req.snr_db, steps=req.steps, batch_size=req.batch_size,
            rng=np.random.default_rng(req.seed), optimizer=req.optimizer, lr=req.lr)
        Path(req.out_path).parent.mkdir(parents=True, exist_ok=True)
        save_autoencoder(model, req.out_path)
        return schemas.TrainAutoencoderResponse(
            model_path=req.out_path, steps=len(losses),
            first_loss=losses[0], final_loss=losses[-1])

    @app.post("/train/semantic", response_model=schemas.TrainSemanticResponse)
    def train_sem(req: schemas.TrainSemanticRequest) -> schemas.TrainSemanticResponse:
        ae = load_autoencoder(req.ae_model)
        sentences = _read_sentences(req.sentences)
        bk = BackgroundKnowledge.from_sentences("train", sentences)
        cfg = CodecConfig(**req.codec.model_dump())
        model, losses = train_semantic(
            sentences, bk.vocab, ae, snr_db=req.snr_db, config=cfg,
            rng=np.random.default_rng(req.seed), steps=req.steps,
            optimizer=req.optimizer, lr=req.lr)
        Path(req.out_path).parent.mkdir(parents=True, exist_ok=True)
        save_codec(model, req.out_path)
        return schemas.TrainSemanticResponse(
            model_path=req.out_path, vocab_size=bk.vocab.size, steps=len(losses),
            first_loss=losses[0], final_loss=losses[-1])

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_point(req: schemas.EvalRequest) -> schemas.EvalResponse:
        models = load_experiment_models(req.models)
        cfg = ExperimentConfig(seed=req.seed, trials=req.trials,
                               strategy=req.strategy, snr_db=[req.snr2_db],
                               relay_power=req.relay_power, workers=req.workers)
        point = evaluate_point(models, cfg, req.snr1_db, req.snr2_db)
        return schemas.EvalResponse(point=_point_summary(point))

    @app.post("/sweep/snr", response_model=schemas.SweepResponse)
    def sweep_snr(req: schemas.SnrSweepRequest) -> schemas.SweepResponse:
        models = load_experiment_models(req.models)
        sweeps = []
        for strategy in req.strategies:
            cfg = ExperimentConfig(
                seed=req.seed, trials=req.trials, strategy=strategy,
                snr_db=list(req.snr_db), fixed_snr1_db=req.fixed_snr1_db,
                relay_power=req.relay_power, workers=req.workers)
            sweeps.append(run_snr_sweep(models, cfg))
        points = [p for s in sweeps for p in s.points]
        return schemas.SweepResponse(
            axis="snr_db", points=[_point_summary(p) for p in points],
            csv=sweep_to_csv(sweeps))

    @app.post("/sweep/placement", response_model=schemas.SweepResponse)
    def sweep_placement(req: schemas.PlacementSweepRequest) -> schemas.SweepResponse:
        models = load_experiment_models(req.models)
        budget = LinkBudget(
            p1=db_to_linear(req.budget.p1_db), p2=db_to_linear(req.budget.p2_db),
            d=0.5, gamma=req.budget.gamma, sigma2=req.budget.sigma2)
        sweeps = []
        for strategy in req.strategies:
            cfg = ExperimentConfig(
                seed=req.seed, trials=req.trials, strategy=strategy,
                budget=budget, d_grid=list(req.d),
                relay_power=req.relay_power, workers=req.workers)
            sweeps.append(run_placement_sweep(models, cfg))
        points = [p for s in sweeps for p in s.points]
        return schemas.SweepResponse(
            axis="d", points=[_point_summary(p) for p in points],
            csv=sweep_to_csv(sweeps))

    return app


def _write_corpus(path: Path, sentences: list[list[str]]) -> None:
    path.write_text("".join(" ".join(s) + "\n" for s in sentences), encoding="utf-8")


app = create_app()
