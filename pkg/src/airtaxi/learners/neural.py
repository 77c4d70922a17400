"""Three-layer feed-forward network: sigmoid hidden layer, softmax output,
mean cross-entropy, full-batch backpropagation with a fixed learning rate."""
import numpy as np
from scipy.special import expit, logsumexp

from ..errors import TrainingError
from .base import N_CLASSES, Classifier, check_xy, one_hot, softmax


def ann_forward(params, X):
    W1, b1, W2, b2 = params
    A = expit(X @ W1 + b1)
    return A, A @ W2 + b2


def ann_loss_grad(params, X, Y):
    """Mean cross-entropy and gradients for ``params = (W1, b1, W2, b2)``."""
    W1, b1, W2, b2 = params
    A, S = ann_forward(params, X)
    lse = logsumexp(S, axis=1)
    loss = float(np.mean(lse - np.sum(S * Y, axis=1)))
    dS = (np.exp(S - lse[:, None]) - Y) / len(X)
    dZ = (dS @ W2.T) * A * (1.0 - A)
    return loss, (X.T @ dZ, dZ.sum(axis=0), A.T @ dS, dS.sum(axis=0))


class NeuralNetwork(Classifier):
    name = "ann"

    def __init__(self, hidden=10, rate=0.05, epochs=500, seed=0):
        if hidden < 1:
            raise ValueError("hidden layer needs at least one node")
        if rate < 0:
            raise ValueError("learning rate must be non-negative")
        self.hidden = int(hidden)
        self.rate = float(rate)
        self.epochs = int(epochs)
        self.seed = int(seed)
        self.params = None
        self.loss_trace_ = []

    def get_params(self):
        return {"hidden": self.hidden, "rate": self.rate, "epochs": self.epochs, "seed": self.seed}

    def init_params(self, n_inputs):
        rng = np.random.default_rng(self.seed)
        a1 = 0.5 / np.sqrt(n_inputs)
        a2 = 0.5 / np.sqrt(self.hidden)
        return [rng.uniform(-a1, a1, (n_inputs, self.hidden)), np.zeros(self.hidden),
                rng.uniform(-a2, a2, (self.hidden, N_CLASSES)), np.zeros(N_CLASSES)]

    def fit(self, X, y):
        X, y = check_xy(X, y)
        Y = one_hot(y)
        params = self.init_params(X.shape[1])
        trace = []
        for epoch in range(self.epochs):
            loss, grads = ann_loss_grad(params, X, Y)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}", epoch)
            trace.append(loss)
            if self.rate:
                for p, g in zip(params, grads):
                    p -= self.rate * g
        self.params = params
        self.loss_trace_ = trace
        return self

    def predict_proba(self, X):
        X = check_xy(X)
        return softmax(ann_forward(self.params, X)[1])

    def to_dict(self):
        W1, b1, W2, b2 = self.params
        return {"learner": self.name, "params": self.get_params(),
                "W1": W1.tolist(), "b1": b1.tolist(), "W2": W2.tolist(), "b2": b2.tolist()}

    @classmethod
    def from_dict(cls, data):
        model = cls(**data["params"])
        model.params = [np.asarray(data[k], dtype=float) for k in ("W1", "b1", "W2", "b2")]
        return model


def ann_fit(X, y, **hyper):
    return NeuralNetwork(**hyper).fit(X, y)


def ann_predict_proba(model, rows):
    return model.predict_proba(rows)
