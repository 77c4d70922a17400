"""Multinomial logistic regression (softmax over linear class scores)."""
import numpy as np
from scipy.special import logsumexp

from ..errors import TrainingError
from .base import N_CLASSES, Classifier, check_xy, one_hot, softmax

SOLVERS = ("newton", "gd")


def _with_bias(X):
    return np.column_stack([X, np.ones(len(X))])


def _loss_grad(W, X1, Y):
    S = X1 @ W
    lse = logsumexp(S, axis=1)
    loss = float(np.mean(lse - np.sum(S * Y, axis=1)))
    P = np.exp(S - lse[:, None])
    return loss, X1.T @ (P - Y) / len(X1), P


def lr_loss_grad(W, X, Y):
    """Mean negative log-likelihood and its gradient.

    ``W`` is (N+1, C) with the bias in the last row; ``Y`` is one-hot (M, C).
    """
    loss, grad, _ = _loss_grad(W, _with_bias(X), Y)
    return loss, grad


def _newton_direction(X1, P, grad):
    # The last class is the reference (scores fixed at 0); solve on the rest.
    m, d = X1.shape
    k = N_CLASSES - 1
    H = np.empty((k * d, k * d))
    for a in range(k):
        for b in range(a, k):
            w = P[:, a] * ((a == b) - P[:, b])
            block = (X1 * w[:, None]).T @ X1 / m
            H[a * d:(a + 1) * d, b * d:(b + 1) * d] = block
            H[b * d:(b + 1) * d, a * d:(a + 1) * d] = block
    g = grad[:, :k].T.reshape(-1)
    # one-hot blocks duplicate the bias column, so H is singular; a tiny ridge
    # picks the minimum-norm step, which has no effect on the predictions
    ridge = 1e-9 * (np.trace(H) / len(H) + 1e-12)
    step = np.linalg.solve(H + ridge * np.eye(len(H)), g)
    direction = np.zeros_like(grad)
    direction[:, :k] = step.reshape(k, d).T
    return direction


class LogisticRegression(Classifier):
    """Softmax of per-class scores ``b(c) . x + bias(c)``, fitted by maximum likelihood.

    Each iteration proposes a full Newton step (``solver="newton"``) or a
    gradient step of size ``step`` (``solver="gd"``); a proposal that raises
    the loss is retried at half the size, so ``loss_trace_`` never increases.
    Stops once an accepted step improves the mean loss by less than ``tol``
    or after ``max_iter`` steps.
    """
    name = "lr"

    def __init__(self, solver="newton", max_iter=100, step=1.0, tol=1e-9):
        if solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        self.solver = solver
        self.max_iter = max_iter
        self.step = step
        self.tol = tol
        self.W = None
        self.loss_trace_ = []

    def get_params(self):
        return {"solver": self.solver, "max_iter": self.max_iter,
                "step": self.step, "tol": self.tol}

    def fit(self, X, y):
        X, y = check_xy(X, y)
        if len(np.unique(y)) < 2:
            raise ValueError("need at least two classes to fit")
        X1 = _with_bias(X)
        Y = one_hot(y)
        W = np.zeros((X1.shape[1], N_CLASSES))
        loss, grad, P = _loss_grad(W, X1, Y)
        trace = [loss]
        step = self.step
        for it in range(1, self.max_iter + 1):
            if self.solver == "newton":
                direction, size = _newton_direction(X1, P, grad), 1.0
            else:
                direction, size = grad, step
            while True:
                cand = W - size * direction
                new_loss, new_grad, new_P = _loss_grad(cand, X1, Y)
                if not np.isfinite(new_loss):
                    if size < 1e-12:
                        raise TrainingError(f"non-finite loss at iteration {it}", it)
                elif new_loss <= loss or size < 1e-12:
                    break
                size *= 0.5
            if new_loss > loss:
                break
            if self.solver == "gd":
                step = size
            improvement = loss - new_loss
            W, grad, P, loss = cand, new_grad, new_P, new_loss
            trace.append(loss)
            if improvement < self.tol:
                break
        self.W = W
        self.loss_trace_ = trace
        return self

    def decision_function(self, X):
        X = check_xy(X)
        return X @ self.W[:-1] + self.W[-1]

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def to_dict(self):
        return {"learner": self.name, "params": self.get_params(), "W": self.W.tolist()}

    @classmethod
    def from_dict(cls, data):
        model = cls(**data["params"])
        model.W = np.asarray(data["W"], dtype=float)
        return model


def lr_fit(X, y, **hyper):
    return LogisticRegression(**hyper).fit(X, y)


def lr_predict_proba(model, rows):
    return model.predict_proba(rows)
