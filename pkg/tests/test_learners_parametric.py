import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airtaxi.errors import TrainingError
from airtaxi.learners import LogisticRegression, NeuralNetwork, ann_loss_grad, lr_loss_grad
from airtaxi.learners.base import one_hot, softmax
from oracles import central_difference, relative_error

XOR_X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 5, dtype=float)
XOR_Y = np.array([0, 2, 2, 0] * 5)


def random_instance(rng, m, n):
    X = rng.normal(size=(m, n))
    y = rng.integers(0, 3, m)
    return X, one_hot(y)


@pytest.mark.parametrize("seed", range(5))
def test_lr_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X, Y = random_instance(rng, 5, 4)
    W = rng.normal(size=(5, 3))
    _, grad = lr_loss_grad(W, X, Y)
    num = central_difference(lambda: lr_loss_grad(W, X, Y)[0], W)
    assert relative_error(grad, num) < 1e-5


@pytest.mark.parametrize("seed", range(5))
def test_ann_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X, Y = random_instance(rng, 6, 3)
    params = [rng.normal(size=(3, 5)), rng.normal(size=5), rng.normal(size=(5, 3)), rng.normal(size=3)]
    _, grads = ann_loss_grad(params, X, Y)
    for p, g in zip(params, grads):
        num = central_difference(lambda: ann_loss_grad(params, X, Y)[0], p)
        assert relative_error(g, num) < 1e-5


@pytest.mark.parametrize("solver", ["newton", "gd"])
def test_lr_separable_toy(solver):
    X = np.array([[0.0, 0.0], [0.2, 0.1], [0.1, 0.3], [3.0, 3.0], [3.2, 2.9], [2.8, 3.1]])
    y = np.array([0, 0, 0, 2, 2, 2])
    model = LogisticRegression(solver=solver, max_iter=500).fit(X, y)
    assert np.all(model.predict(X) == y)
    assert np.all(np.diff(model.loss_trace_) <= 0)


def test_lr_zero_weights_are_uniform():
    model = LogisticRegression()
    model.W = np.zeros((4, 3))
    np.testing.assert_allclose(model.predict_proba(np.random.default_rng(0).normal(size=(7, 3))), 1 / 3)


def test_softmax_examples():
    np.testing.assert_allclose(softmax([[np.log(2), 0, 0]]), [[0.5, 0.25, 0.25]])
    np.testing.assert_allclose(softmax([[1000.0, 0, 0]]), [[1, 0, 0]], atol=1e-300)
    np.testing.assert_allclose(softmax([[3.0, 3.0, 3.0]]), [[1 / 3] * 3])


@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3), st.floats(-1e3, 1e3))
def test_softmax_shift_invariance(scores, shift):
    np.testing.assert_allclose(softmax([scores]), softmax([[s + shift for s in scores]]), atol=1e-12)


def test_lr_needs_two_classes():
    with pytest.raises(ValueError):
        LogisticRegression().fit(np.ones((4, 2)), np.zeros(4, dtype=int))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_lr_non_finite_loss_is_a_training_error():
    X = np.array([[np.inf, 0.0], [0.0, 1.0]])
    with pytest.raises(TrainingError):
        LogisticRegression().fit(X, np.array([0, 1]))


def test_ann_learns_xor():
    model = NeuralNetwork(hidden=4, rate=2.0, epochs=3000, seed=1).fit(XOR_X, XOR_Y)
    assert np.all(model.predict(XOR_X) == XOR_Y)
    linear = LogisticRegression().fit(XOR_X, XOR_Y)
    assert np.mean(linear.predict(XOR_X) == XOR_Y) < 1.0


def test_ann_zero_rate_leaves_weights_unchanged():
    model = NeuralNetwork(hidden=3, rate=0.0, epochs=25, seed=4).fit(XOR_X, XOR_Y)
    init = NeuralNetwork(hidden=3, seed=4).init_params(2)
    for a, b in zip(model.params, init):
        np.testing.assert_array_equal(a, b)


def test_ann_init_bounds():
    W1, b1, W2, b2 = NeuralNetwork(hidden=9, seed=0).init_params(16)
    assert np.abs(W1).max() <= 0.5 / 4 and np.abs(W2).max() <= 0.5 / 3
    assert not b1.any() and not b2.any()


def test_ann_zero_weights_uniform_and_normalized():
    model = NeuralNetwork(hidden=3)
    model.params = [np.zeros((4, 3)), np.zeros(3), np.zeros((3, 3)), np.zeros(3)]
    X = np.random.default_rng(0).normal(size=(1000, 4))
    np.testing.assert_allclose(model.predict_proba(X), 1 / 3)
    trained = NeuralNetwork(hidden=5, epochs=20, seed=2).fit(X, np.arange(1000) % 3)
    np.testing.assert_allclose(trained.predict_proba(X).sum(axis=1), 1.0, atol=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_models_serialize_deterministically(seed):
    rng = np.random.default_rng(seed)
    X, y = rng.normal(size=(30, 4)), rng.integers(0, 3, 30)
    y[:3] = [0, 1, 2]
    for make in (lambda: LogisticRegression(), lambda: NeuralNetwork(hidden=3, epochs=30, seed=seed)):
        a, b = make().fit(X, y), make().fit(X, y)
        assert a.dumps() == b.dumps()
        back = type(a).from_dict(a.to_dict())
        np.testing.assert_array_equal(back.predict_proba(X), a.predict_proba(X))
