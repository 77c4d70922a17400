"""Shared classifier contract and helpers.

Every learner exposes ``fit(X, y)``, ``predict_proba(X)`` returning rows that
sum to one over (low, moderate, high), and ``predict(X)`` as the argmax with
ties going to the lowest class index.
"""
import json

import numpy as np
from scipy.special import softmax as _softmax

N_CLASSES = 3
CLASS_NAMES = ("low", "moderate", "high")


def softmax(scores):
    """Row-wise softmax with max-score subtraction."""
    return _softmax(np.asarray(scores, dtype=float), axis=-1)


def one_hot(y, n_classes=N_CLASSES):
    Y = np.zeros((len(y), n_classes))
    Y[np.arange(len(y)), y] = 1.0
    return Y


def check_xy(X, y=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if y is None:
        return X
    y = np.asarray(y, dtype=np.int64)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have different row counts")
    if y.size and (y.min() < 0 or y.max() >= N_CLASSES):
        raise ValueError("labels must be class indices 0..2")
    return X, y


class Classifier:
    name = "base"

    def predict_proba(self, X):
        raise NotImplementedError

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def get_params(self):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def dumps(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")
