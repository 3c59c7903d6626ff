"""Session-scoped trained models shared by module and acceptance tests.

Training is deterministic (fixed seeds), so every pytest session reproduces
the same parameters. The experiment autoencoder is trained at a low SNR so
the relay protocols show their characteristic behavior across the sweep
range; the pinned-dimension autoencoder of the acceptance suite is trained
separately inside its criterion.
"""

import hashlib

import numpy as np
import pytest

from semrelay.autoencoder import AutoEncoderConfig, train_autoencoder
from semrelay.codec import CodecConfig, train_semantic
from semrelay.corpus import CorpusSpec, default_template_bank, generate_corpus
from semrelay.experiments import ExperimentModels

CORPUS_SEED = 7
AE_SEED = 1234
AE_TRAIN_SNR_DB = -10.0
AE_STEPS = 5000
CODEC_TRAIN_SNR_DB = 15.0
CODEC_STEPS = 3000
CODEC_SEEDS = {"source": 21, "dest": 22}


def ae_digest(model) -> str:
    payload = model.encoder.state_bytes() + model.decoder.state_bytes()
    return hashlib.sha256(payload).hexdigest()


@pytest.fixture(scope="session")
def experiment_ae():
    model, losses = train_autoencoder(
        AutoEncoderConfig(), snr_db=AE_TRAIN_SNR_DB, steps=AE_STEPS,
        batch_size=64, rng=np.random.default_rng(AE_SEED))
    model.loss_trace = losses
    return model


@pytest.fixture(scope="session")
def trained_corpora(experiment_ae):
    """Paired corpora with trained codecs attached, plus training evidence."""
    corpora = generate_corpus(default_template_bank(),
                              CorpusSpec(n_sentences=180, divergence=1.0),
                              np.random.default_rng(CORPUS_SEED))
    evidence = {"ae_digest_before": ae_digest(experiment_ae)}
    codecs = {}
    for side, bk in (("source", corpora.bk_source), ("dest", corpora.bk_dest)):
        codec, losses = train_semantic(
            bk.sentences, bk.vocab, experiment_ae, snr_db=CODEC_TRAIN_SNR_DB,
            config=CodecConfig(), rng=np.random.default_rng(CODEC_SEEDS[side]),
            steps=CODEC_STEPS)
        bk.codec = codec
        codecs[side] = losses
    evidence["ae_digest_after"] = ae_digest(experiment_ae)
    evidence["codec_losses"] = codecs
    corpora.training_evidence = evidence
    return corpora


@pytest.fixture(scope="session")
def shared_models(experiment_ae, trained_corpora):
    return ExperimentModels.shared(experiment_ae, trained_corpora.bk_source)


@pytest.fixture(scope="session")
def mismatched_models(experiment_ae, trained_corpora):
    return ExperimentModels.mismatched(experiment_ae, trained_corpora)
