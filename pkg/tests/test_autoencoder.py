"""Channel autoencoder tests: shape/power contracts and training behavior."""

import numpy as np
import pytest

from semrelay.autoencoder import (
    AutoEncoderConfig,
    AutoEncoderModel,
    ae_decode,
    ae_encode,
    decode_rows,
    encode_rows,
    reconstruction_mse,
    train_autoencoder,
)
from semrelay.channel import SymbolBlock
from semrelay.errors import ContractViolationError, DimensionError
from semrelay.nn import Tensor


@pytest.fixture(scope="module")
def small_model():
    cfg = AutoEncoderConfig(input_dim=10, hidden_dim=8, n_symbols=3)
    return AutoEncoderModel.init(cfg, np.random.default_rng(0))


class TestShapes:
    def test_block_length_n_per_token(self, small_model):
        x = np.random.default_rng(1).uniform(-2, 2, (5, 10))
        block = ae_encode(x, small_model)
        assert len(block) == 5 * 3

    def test_decode_dim(self, small_model):
        x = np.random.default_rng(2).uniform(-2, 2, (4, 10))
        out = ae_decode(ae_encode(x, small_model), small_model)
        assert out.shape == (4, 10)

    def test_encode_dim_mismatch(self, small_model):
        with pytest.raises(DimensionError):
            ae_encode(np.zeros((2, 7)), small_model)

    def test_decode_dim_mismatch(self, small_model):
        with pytest.raises(DimensionError):
            ae_decode(SymbolBlock(np.zeros(7, dtype=complex) + 1.0), small_model)

    def test_untrained_output_finite(self, small_model):
        x = np.random.default_rng(3).uniform(-2, 2, (8, 10))
        out = ae_decode(ae_encode(x, small_model), small_model)
        assert np.all(np.isfinite(out))


class TestPowerNormalization:
    def test_per_row_energy_equals_power(self, small_model):
        x = np.random.default_rng(4).uniform(-2, 2, (6, 10))
        pairs = encode_rows(Tensor(x), small_model).data
        per_row = (pairs ** 2).sum(axis=1) / small_model.config.n_symbols
        np.testing.assert_allclose(per_row, small_model.config.power, atol=1e-9)

    def test_block_energy_equals_power(self, small_model):
        x = np.random.default_rng(5).uniform(-2, 2, (6, 10))
        block = ae_encode(x, small_model)
        assert block.mean_energy() == pytest.approx(small_model.config.power, abs=1e-9)

    def test_deterministic(self, small_model):
        x = np.random.default_rng(6).uniform(-2, 2, (3, 10))
        a = ae_encode(x, small_model).symbols
        b = ae_encode(x, small_model).symbols
        np.testing.assert_array_equal(a, b)


class TestModelStructure:
    def test_mirrored_dims_asserted(self):
        cfg = AutoEncoderConfig(input_dim=10, hidden_dim=8, n_symbols=3)
        model = AutoEncoderModel.init(cfg, np.random.default_rng(0))
        assert model.encoder["w1"].shape == (10, 8)
        assert model.encoder["w2"].shape == (8, 6)
        assert model.decoder["w1"].shape == (6, 8)
        assert model.decoder["w2"].shape == (8, 10)

    def test_asymmetric_decoder_rejected(self):
        cfg = AutoEncoderConfig(input_dim=10, hidden_dim=8, n_symbols=3)
        good = AutoEncoderModel.init(cfg, np.random.default_rng(0))
        bad_cfg = AutoEncoderConfig(input_dim=10, hidden_dim=7, n_symbols=3)
        with pytest.raises(DimensionError):
            AutoEncoderModel(good.encoder, good.decoder, bad_cfg)

    def test_config_validation(self):
        with pytest.raises(ContractViolationError):
            AutoEncoderConfig(input_dim=0)
        with pytest.raises(ContractViolationError):
            AutoEncoderConfig(power=-1.0)


class TestTraining:
    def test_zero_steps_rejected(self):
        with pytest.raises(ContractViolationError):
            train_autoencoder(AutoEncoderConfig(), 12.0, steps=0, batch_size=8,
                              rng=np.random.default_rng(0))

    def test_loss_trace_decreases_at_6db(self):
        cfg = AutoEncoderConfig(input_dim=12, hidden_dim=10, n_symbols=4)
        _, losses = train_autoencoder(cfg, snr_db=6.0, steps=2000, batch_size=32,
                                      rng=np.random.default_rng(7))
        assert np.mean(losses[-100:]) < np.mean(losses[:100])

    def test_same_seed_identical_parameters(self):
        cfg = AutoEncoderConfig(input_dim=8, hidden_dim=6, n_symbols=2)

        def run():
            model, _ = train_autoencoder(cfg, snr_db=10.0, steps=50, batch_size=8,
                                         rng=np.random.default_rng(3))
            return model.encoder.state_bytes() + model.decoder.state_bytes()

        assert run() == run()

    def test_training_failure_carries_step_index(self):
        from semrelay.errors import TrainingFailureError

        err = TrainingFailureError(41)
        assert err.step == 41 and "41" in str(err)

    def test_training_improves_over_init(self):
        cfg = AutoEncoderConfig(input_dim=12, hidden_dim=10, n_symbols=4)
        untrained = AutoEncoderModel.init(cfg, np.random.default_rng(1))
        before = reconstruction_mse(untrained, None, 2000, np.random.default_rng(9))
        model, _ = train_autoencoder(cfg, snr_db=12.0, steps=1500, batch_size=32,
                                     rng=np.random.default_rng(1))
        after = reconstruction_mse(model, None, 2000, np.random.default_rng(9))
        assert after < before


class TestTrainedProperties:
    """Properties of the session-trained experiment autoencoder."""

    def test_noise_never_helps_on_average(self, experiment_ae):
        rng = np.random.default_rng(17)
        clean = reconstruction_mse(experiment_ae, None, 4000, rng)
        for snr in (18.0, 12.0, 6.0, 0.0):
            noisy = reconstruction_mse(experiment_ae, snr, 4000,
                                       np.random.default_rng(17))
            assert clean <= noisy

    def test_bounded_activations(self, experiment_ae):
        x = np.random.default_rng(23).uniform(-2, 2, (500, 32))
        from semrelay.nn import dense_forward

        hidden = dense_forward(Tensor(x), experiment_ae.encoder["w1"],
                               experiment_ae.encoder["b1"], "tanh")
        pairs = encode_rows(Tensor(x), experiment_ae)
        decoded_hidden = dense_forward(pairs, experiment_ae.decoder["w1"],
                                       experiment_ae.decoder["b1"], "tanh")
        out = decode_rows(pairs, experiment_ae)
        for t in (hidden, pairs, decoded_hidden, out):
            assert np.max(np.abs(t.data)) < 10.0
