import numpy as np
import pytest

from ccasched.errors import DivergenceError, ValidationError
from ccasched.models import MlpParams, MlpWeights, MultilayerPerceptron, fit_mlp, loss_and_grad


def random_weights(rng, hidden, inputs):
    return MlpWeights(
        rng.uniform(-1, 1, (hidden, inputs)), rng.uniform(-1, 1, hidden), rng.uniform(-1, 1, hidden),
        float(rng.uniform(-1, 1)),
    )


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 1, (3, 4))
    t = rng.uniform(0, 1, 3)
    w = random_weights(rng, 4, 4)
    _, grad = loss_and_grad(w, X, t)
    g = grad.flat()
    v = w.flat()
    h = 1e-5
    worst = 0.0
    for i in range(v.size):
        up, dn = v.copy(), v.copy()
        up[i] += h
        dn[i] -= h
        fd = (loss_and_grad(MlpWeights.unflat(up, 4, 4), X, t)[0]
              - loss_and_grad(MlpWeights.unflat(dn, 4, 4), X, t)[0]) / (2 * h)
        worst = max(worst, abs(fd - g[i]) / max(abs(fd), abs(g[i]), 1e-8))
    assert worst <= 1e-4


def test_zero_weights_output_bias():
    w = MlpWeights.zeros(4, 3)
    w.b2 = 0.25
    m = MultilayerPerceptron(w, y_min=0.0, y_span=1.0)
    X = np.random.default_rng(1).normal(size=(5, 3))
    assert np.all(m.predict(X) == 0.25)


def test_learns_product_surface():
    rng = np.random.default_rng(2)
    X = rng.uniform(0, 1, (200, 2))
    y = X[:, 0] * X[:, 1]
    m = fit_mlp(X, y, MlpParams(seed=0))
    Xt = rng.uniform(0, 1, (200, 2))
    mse = float(np.mean((m.predict(Xt) - Xt[:, 0] * Xt[:, 1]) ** 2))
    assert mse < 0.01
    assert m.loss_history[-1] <= m.loss_history[0]
    assert len(m.loss_history) == 501


def test_deterministic_under_seed():
    rng = np.random.default_rng(3)
    X, y = rng.uniform(size=(30, 3)), rng.uniform(size=30)
    a = fit_mlp(X, y, MlpParams(epochs=50, seed=4))
    b = fit_mlp(X, y, MlpParams(epochs=50, seed=4))
    assert np.array_equal(a.weights.flat(), b.weights.flat())


def test_divergence_suggests_lower_lr():
    rng = np.random.default_rng(4)
    X = rng.uniform(-1e3, 1e3, (20, 2))
    with pytest.raises(DivergenceError, match="lr"):
        fit_mlp(X, X[:, 0] ** 2, MlpParams(lr=1e6, momentum=0.9, epochs=200))


@pytest.mark.parametrize("kwargs", [{"hidden": 0}, {"lr": 0}, {"momentum": 1.0}, {"epochs": -1}])
def test_param_validation(kwargs):
    with pytest.raises(ValidationError):
        MlpParams(**kwargs)
