"""Single-hidden-layer perceptron regressor trained by full-batch backprop."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DivergenceError, ValidationError


@dataclass(frozen=True)
class MlpParams:
    hidden: int = 4
    lr: float = 0.3
    momentum: float = 0.2
    epochs: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.hidden < 1:
            raise ValidationError("hidden must be >= 1")
        if not self.lr > 0:
            raise ValidationError("lr must be > 0")
        if not 0 <= self.momentum < 1:
            raise ValidationError("momentum must be in [0, 1)")
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class MlpWeights:
    W1: np.ndarray  # (hidden, inputs)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float

    def flat(self) -> np.ndarray:
        return np.concatenate([self.W1.ravel(), self.b1, self.w2, [self.b2]])

    @classmethod
    def unflat(cls, v: np.ndarray, hidden: int, inputs: int) -> "MlpWeights":
        v = np.asarray(v, dtype=float)
        k = hidden * inputs
        return cls(
            v[:k].reshape(hidden, inputs).copy(),
            v[k:k + hidden].copy(),
            v[k + hidden:k + 2 * hidden].copy(),
            float(v[k + 2 * hidden]),
        )

    @classmethod
    def zeros(cls, hidden: int, inputs: int) -> "MlpWeights":
        return cls(np.zeros((hidden, inputs)), np.zeros(hidden), np.zeros(hidden), 0.0)


def forward(w: MlpWeights, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    H = sigmoid(X @ w.W1.T + w.b1)
    return H @ w.w2 + w.b2, H


def loss_and_grad(w: MlpWeights, X: np.ndarray, t: np.ndarray) -> tuple[float, MlpWeights]:
    """Half mean squared error and its gradient."""
    n = X.shape[0]
    out, H = forward(w, X)
    r = out - t
    loss = 0.5 * float(r @ r) / n
    e = r / n
    dZ = np.outer(e, w.w2) * H * (1.0 - H)
    return loss, MlpWeights(dZ.T @ X, dZ.sum(axis=0), H.T @ e, float(e.sum()))


@dataclass
class MultilayerPerceptron:
    """inputs -> sigmoid hidden layer -> linear output.

    Targets are min-max scaled internally and unscaled on predict; inputs
    are expected to be scaled by the caller.
    """

    weights: MlpWeights
    y_min: float = 0.0
    y_span: float = 1.0
    loss_history: list[float] = field(default_factory=list)

    tag = "mlp"

    def predict(self, X: np.ndarray) -> np.ndarray:
        out, _ = forward(self.weights, np.asarray(X, dtype=float))
        return self.y_min + self.y_span * out

    def to_dict(self) -> dict[str, Any]:
        w = self.weights
        return {
            "W1": w.W1.tolist(),
            "b1": w.b1.tolist(),
            "w2": w.w2.tolist(),
            "b2": w.b2,
            "y_min": self.y_min,
            "y_span": self.y_span,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "MultilayerPerceptron":
        W1 = np.array(doc["W1"], dtype=float)
        if W1.ndim != 2:
            W1 = W1.reshape(len(doc["b1"]), -1)
        w = MlpWeights(W1, np.array(doc["b1"], dtype=float), np.array(doc["w2"], dtype=float), float(doc["b2"]))
        return cls(w, float(doc["y_min"]), float(doc["y_span"]))


def fit_mlp(X: np.ndarray, y: np.ndarray, params: MlpParams = MlpParams()) -> MultilayerPerceptron:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if n == 0:
        raise ValidationError("cannot train on an empty table")
    y_min = float(y.min())
    span = float(y.max()) - y_min
    y_span = span if span > 0 else 1.0
    t = (y - y_min) / y_span

    rng = np.random.default_rng(params.seed)
    h = params.hidden
    w = MlpWeights(
        rng.uniform(-0.5, 0.5, size=(h, d)),
        rng.uniform(-0.5, 0.5, size=h),
        rng.uniform(-0.5, 0.5, size=h),
        float(rng.uniform(-0.5, 0.5)),
    )
    theta = w.flat()
    velocity = np.zeros_like(theta)
    history = []
    # divergence is detected explicitly below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(params.epochs + 1):
            loss, g = loss_and_grad(MlpWeights.unflat(theta, h, d), X, t)
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"MLP loss became non-finite at epoch {epoch}; try a lower learning rate (lr={params.lr})"
                )
            history.append(loss)
            if epoch == params.epochs:
                break
            velocity = params.momentum * velocity - params.lr * g.flat()
            theta = theta + velocity
    return MultilayerPerceptron(MlpWeights.unflat(theta, h, d), y_min, y_span, history)
