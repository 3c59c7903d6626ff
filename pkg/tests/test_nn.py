"""Differentiable-core tests: layers, losses, optimizers, gradient checks."""

import numpy as np
import pytest

from semrelay.errors import CheckInvalidError, ContractViolationError, DimensionError
from semrelay.nn import (
    AdamState,
    ParameterSet,
    ROLE_AUTO_ENCODER,
    Tensor,
    adam_step,
    dense_forward,
    grad_check,
    make_optimizer,
    mse_loss,
    mse_op,
    sgd_step,
    softmax_cross_entropy,
    uniform_init,
)


def make_params(**arrays) -> ParameterSet:
    ps = ParameterSet(ROLE_AUTO_ENCODER)
    for name, value in arrays.items():
        ps.add(name, np.asarray(value, dtype=np.float64))
    return ps


class TestDenseForward:
    def test_identity_weights(self):
        out = dense_forward(Tensor([[1.0, 2.0]]), Tensor(np.eye(2)),
                            Tensor([0.0, 0.0]), "identity")
        np.testing.assert_array_equal(out.data, [[1.0, 2.0]])

    def test_relu_clamps_negatives(self):
        out = dense_forward(Tensor([[1.0, -1.0]]), Tensor(np.eye(2)),
                            Tensor([0.0, 0.0]), "relu")
        np.testing.assert_array_equal(out.data, [[1.0, 0.0]])

    def test_tanh_scalar(self):
        out = dense_forward(Tensor([[1.0, 1.0]]), Tensor([[2.0], [3.0]]),
                            Tensor([1.0]), "tanh")
        assert out.data[0, 0] == pytest.approx(np.tanh(6.0), abs=1e-12)

    def test_shape_mismatch_reports_both_shapes(self):
        with pytest.raises(DimensionError) as err:
            dense_forward(Tensor(np.zeros((1, 3))), Tensor(np.zeros((2, 4))),
                          Tensor(np.zeros(4)), "identity")
        assert "(1, 3)" in str(err.value) and "(2, 4)" in str(err.value)

    def test_unknown_activation(self):
        with pytest.raises(ContractViolationError):
            dense_forward(Tensor(np.zeros((1, 2))), Tensor(np.eye(2)),
                          Tensor(np.zeros(2)), "gelu")


class TestSoftmaxCrossEntropy:
    def test_uniform_logits_gives_log_v(self):
        loss, _ = softmax_cross_entropy(np.zeros((1, 4)),
                                        np.array([[0.0, 1.0, 0.0, 0.0]]))
        assert loss == pytest.approx(np.log(4.0), abs=1e-12)

    def test_saturated_correct_prediction(self):
        logits = np.array([[1000.0, 0.0, 0.0]])
        loss, _ = softmax_cross_entropy(logits, np.array([[1.0, 0.0, 0.0]]))
        assert loss == pytest.approx(0.0, abs=1e-9)

    def test_two_rows_average(self):
        logits = np.array([[2.0, -1.0, 0.5], [0.0, 3.0, 1.0]])
        t1 = np.array([[1.0, 0.0, 0.0]])
        t2 = np.array([[0.0, 0.0, 1.0]])
        l1, _ = softmax_cross_entropy(logits[:1], t1)
        l2, _ = softmax_cross_entropy(logits[1:], t2)
        total, _ = softmax_cross_entropy(logits, np.vstack([t1, t2]))
        assert total == pytest.approx((l1 + l2) / 2.0, abs=1e-12)

    def test_non_one_hot_rejected(self):
        with pytest.raises(ContractViolationError):
            softmax_cross_entropy(np.zeros((1, 3)), np.array([[0.5, 0.5, 0.0]]))

    def test_gradient_is_q_minus_p_over_m(self):
        rng = np.random.default_rng(3)
        logits = rng.normal(size=(4, 5))
        targets = np.eye(5)[rng.integers(5, size=4)]
        _, grad = softmax_cross_entropy(logits, targets)
        e = np.exp(logits - logits.max(axis=1, keepdims=True))
        q = e / e.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(grad, (q - targets) / 4.0, atol=1e-12)

    def test_loss_nonnegative(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            logits = rng.normal(size=(3, 6)) * 5
            targets = np.eye(6)[rng.integers(6, size=3)]
            loss, _ = softmax_cross_entropy(logits, targets)
            assert loss >= 0.0

    def test_softmax_rows_sum_to_one(self):
        rng = np.random.default_rng(5)
        x = Tensor(rng.normal(size=(8, 7)) * 10)
        rows = x.softmax().data.sum(axis=-1)
        np.testing.assert_allclose(rows, 1.0, atol=1e-9)


class TestMseLoss:
    def test_zero_distortion(self):
        x = np.array([1.0, -2.0, 3.0])
        assert mse_loss(x, x)[0] == 0.0

    def test_hand_example(self):
        loss, _ = mse_loss(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        assert loss == pytest.approx(2.5, abs=1e-12)

    def test_single_component_delta_squared(self):
        c, d = 0.7, 0.3
        loss, _ = mse_loss(np.array([c]), np.array([c + d]))
        assert loss == pytest.approx(d * d, abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            mse_loss(np.zeros(3), np.zeros(4))

    def test_grad_matches_definition(self):
        x = np.array([1.0, 2.0, 3.0])
        xh = np.array([1.5, 1.0, 3.0])
        _, grad = mse_loss(x, xh)
        np.testing.assert_allclose(grad, 2.0 * (xh - x) / 3.0, atol=1e-15)

    def test_nonnegative_and_zero_iff_equal(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x, y = rng.normal(size=4), rng.normal(size=4)
            loss, _ = mse_loss(x, y)
            assert loss >= 0.0
            assert (loss == 0.0) == bool(np.array_equal(x, y))


class TestAdam:
    def test_zero_gradients_are_a_fixed_point(self):
        ps = make_params(w=[1.0, -2.0])
        state = AdamState.for_params(ps, lr=0.05)
        for _ in range(5):
            ps["w"].grad = np.zeros(2)
            adam_step(ps, state)
        np.testing.assert_array_equal(ps["w"].data, [1.0, -2.0])
        np.testing.assert_array_equal(state.m["w"], np.zeros(2))
        np.testing.assert_array_equal(state.v["w"], np.zeros(2))

    def test_first_step_magnitude_bias_corrected(self):
        ps = make_params(w=[0.0])
        state = AdamState.for_params(ps, lr=1e-3)
        ps["w"].grad = np.array([1.0])
        adam_step(ps, state)
        # bias correction makes m_hat = g and v_hat = g^2 on step one
        assert -ps["w"].data[0] == pytest.approx(1e-3 / (1.0 + state.eps), rel=1e-9)

    def test_two_steps_counter_and_moments(self):
        ps = make_params(w=[0.0])
        state = AdamState.for_params(ps)
        for _ in range(2):
            ps["w"].grad = np.array([0.5])
            adam_step(ps, state)
        assert state.t == 2
        assert np.all(state.v["w"] > 0.0)

    def test_missing_grad_names_parameter(self):
        ps = make_params(alpha=[1.0], beta=[2.0])
        ps["alpha"].grad = np.array([0.1])
        state = AdamState.for_params(ps)
        with pytest.raises(ContractViolationError, match="beta"):
            adam_step(ps, state)

    def test_grads_left_untouched(self):
        ps = make_params(w=[1.0])
        state = AdamState.for_params(ps)
        ps["w"].grad = np.array([2.0])
        adam_step(ps, state)
        np.testing.assert_array_equal(ps["w"].grad, [2.0])

    def test_v_stays_nonnegative(self):
        rng = np.random.default_rng(8)
        ps = make_params(w=rng.normal(size=6))
        state = AdamState.for_params(ps)
        for _ in range(50):
            ps["w"].grad = rng.normal(size=6)
            adam_step(ps, state)
            assert np.all(state.v["w"] >= 0.0)


class TestSgd:
    def test_plain_update(self):
        ps = make_params(w=[1.0, 2.0])
        ps["w"].grad = np.array([0.5, -0.5])
        sgd_step(ps, lr=0.1)
        np.testing.assert_allclose(ps["w"].data, [0.95, 2.05], atol=1e-15)

    def test_optimizer_factory(self):
        ps = make_params(w=[1.0])
        with pytest.raises(ContractViolationError):
            make_optimizer("rmsprop", ps, 0.1)


class TestGradCheck:
    def test_quadratic(self):
        ps = make_params(w=[3.0])
        err = grad_check(lambda: (ps["w"] * ps["w"]).sum(), ps, probes=4,
                         rng=np.random.default_rng(0))
        assert err < 1e-6

    def test_dense_stack_mse(self):
        rng = np.random.default_rng(12)
        ps = make_params(
            w1=uniform_init(rng, (6, 5), 6), b1=np.zeros(5),
            w2=uniform_init(rng, (5, 4), 5), b2=np.zeros(4))
        x = rng.uniform(-2, 2, (3, 6))
        target = rng.uniform(-2, 2, (3, 4))

        def f():
            h = dense_forward(Tensor(x), ps["w1"], ps["b1"], "tanh")
            y = dense_forward(h, ps["w2"], ps["b2"], "identity")
            return mse_op(target, y)

        err = grad_check(f, ps, probes=40, rng=np.random.default_rng(1))
        assert err < 1e-4

    def test_nondeterministic_function_rejected(self):
        ps = make_params(w=[1.0])
        rng = np.random.default_rng(4)

        def f():
            return (ps["w"] * float(rng.normal())).sum()

        with pytest.raises(CheckInvalidError):
            grad_check(f, ps, probes=2, rng=np.random.default_rng(0))


class TestTensorInvariants:
    def test_finite_forward_backward_on_random_graphs(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            a = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
            b = Tensor(rng.normal(size=(4, 5)), requires_grad=True)
            out = ((a.tanh().matmul(b) * 0.5 + 1.0).relu().softmax()
                   .layer_norm() * 2.0).sum()
            out.backward()
            assert np.isfinite(out.data)
            assert np.all(np.isfinite(a.grad)) and np.all(np.isfinite(b.grad))

    def test_layer_norm_row_statistics(self):
        rng = np.random.default_rng(9)
        y = Tensor(rng.normal(3.0, 2.5, (16, 32))).layer_norm().data
        assert np.abs(y.mean(axis=-1)).max() < 1e-6
        assert np.abs(y.var(axis=-1) - 1.0).max() < 1e-6

    def test_grad_shape_mirrors_data(self):
        t = Tensor(np.zeros((2, 3)), requires_grad=True)
        (t * 2.0).sum().backward()
        assert t.grad.shape == t.data.shape

    def test_backward_requires_scalar(self):
        t = Tensor(np.zeros((2, 2)), requires_grad=True)
        with pytest.raises(ContractViolationError):
            (t * 1.0).backward()

    def test_determinism_identical_seeds(self):
        def run():
            rng = np.random.default_rng(42)
            ps = make_params(w=uniform_init(rng, (4, 4), 4))
            state = AdamState.for_params(ps, lr=1e-2)
            for _ in range(10):
                x = rng.normal(size=(2, 4))
                loss = mse_op(np.zeros((2, 4)), Tensor(x).matmul(ps["w"]))
                ps.zero_grad()
                loss.backward()
                adam_step(ps, state)
            return ps["w"].data.copy()

        np.testing.assert_array_equal(run(), run())


class TestParameterSet:
    def test_duplicate_name_rejected(self):
        ps = make_params(w=[1.0])
        with pytest.raises(ContractViolationError):
            ps.add("w", np.array([2.0]))

    def test_unknown_role_rejected(self):
        with pytest.raises(ContractViolationError):
            ParameterSet("channel-coder")

    def test_freeze_clears_grads_and_requires_grad(self):
        ps = make_params(w=[1.0])
        ps["w"].grad = np.array([1.0])
        ps.freeze()
        assert ps["w"].grad is None and not ps["w"].requires_grad

    def test_uniform_init_bounds(self):
        rng = np.random.default_rng(3)
        w = uniform_init(rng, (50, 50), fan_in=25)
        assert np.all(np.abs(w) <= 1.0 / 5.0)
