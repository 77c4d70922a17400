"""Binary decision trees on entropy (classification) or squared error
(regression), grown by :func:`._tree_kernels.build_tree`."""
from dataclasses import dataclass

import numpy as np

from .base import N_CLASSES, Classifier, check_xy
from ._tree_kernels import CLASSIFY, REGRESS, apply_tree, best_split_kernel, build_tree


def entropy(class_counts):
    """Shannon entropy in bits; zero counts contribute nothing."""
    counts = np.asarray(class_counts, dtype=float)
    if counts.min() < 0 or counts.sum() <= 0:
        raise ValueError("counts must be non-negative and not all zero")
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


def best_split(X, y, rows=None, candidate_features=None, min_gain=1e-7,
               sample_weight=None, min_leaf=1):
    """Information-gain-maximizing ``x[feature] <= threshold`` split, or None."""
    X, y = check_xy(X, y)
    rows = np.arange(len(X)) if rows is None else np.asarray(rows, dtype=np.int64)
    feats = (np.arange(X.shape[1]) if candidate_features is None
             else np.sort(np.asarray(candidate_features, dtype=np.int64)))
    if len(rows) < 2 or feats.size == 0:
        raise ValueError("need at least two rows and one candidate feature")
    w = np.ones(len(X)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    f, t, gain = best_split_kernel(X, y, np.zeros(len(X)), w, rows, feats,
                                   N_CLASSES, CLASSIFY, float(min_leaf))
    if f < 0 or gain < min_gain:
        return None
    return Split(int(f), float(t), float(gain))


class TreeStructure:
    """Flat node arrays; leaves have ``feature == -1``."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def depth(self):
        depth = np.zeros(self.n_nodes, dtype=int)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def apply(self, X):
        return apply_tree(X, self.feature, self.threshold, self.left, self.right)

    def used_features(self):
        return sorted(set(int(f) for f in self.feature if f >= 0))

    def to_dict(self):
        leaf = self.feature < 0
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": [v.tolist() if is_leaf else None for v, is_leaf in zip(self.value, leaf)]}

    @classmethod
    def from_dict(cls, data):
        n_out = len(next(v for v in data["value"] if v is not None))
        value = np.array([v if v is not None else [0.0] * n_out for v in data["value"]], dtype=float)
        return cls(np.asarray(data["feature"], dtype=np.int64),
                   np.asarray(data["threshold"], dtype=float),
                   np.asarray(data["left"], dtype=np.int64),
                   np.asarray(data["right"], dtype=np.int64), value)


def grow(X, y, target, weight, mode, max_depth=None, min_gain=1e-7, min_leaf=1,
         mtry=None, seed=0):
    n_feat = X.shape[1]
    mtry = n_feat if mtry is None else int(mtry)
    feature, threshold, left, right, value, _ = build_tree(
        np.ascontiguousarray(X, dtype=float), np.asarray(y, dtype=np.int64),
        np.asarray(target, dtype=float), np.asarray(weight, dtype=float),
        N_CLASSES, mode, -1 if max_depth is None else int(max_depth),
        float(min_gain), float(min_leaf), mtry, int(seed) % (2**32))
    return TreeStructure(feature, threshold, left, right, value)


class DecisionTree(Classifier):
    """Entropy-split classification tree; leaves hold weighted class shares."""
    name = "tree"

    def __init__(self, max_depth=None, min_gain=1e-7, min_leaf=1, mtry=None, seed=0):
        self.max_depth = max_depth
        self.min_gain = min_gain
        self.min_leaf = min_leaf
        self.mtry = mtry
        self.seed = seed
        self.tree_ = None

    def get_params(self):
        return {"max_depth": self.max_depth, "min_gain": self.min_gain,
                "min_leaf": self.min_leaf, "mtry": self.mtry, "seed": self.seed}

    def fit(self, X, y, sample_weight=None):
        X, y = check_xy(X, y)
        w = np.ones(len(X)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        self.tree_ = grow(X, y, np.zeros(len(X)), w, CLASSIFY, self.max_depth,
                          self.min_gain, self.min_leaf, self.mtry, self.seed)
        return self

    def predict_proba(self, X):
        X = check_xy(X)
        return self.tree_.value[self.tree_.apply(X)]

    def to_dict(self):
        return {"learner": self.name, "params": self.get_params(), "tree": self.tree_.to_dict()}

    @classmethod
    def from_dict(cls, data):
        model = cls(**data["params"])
        model.tree_ = TreeStructure.from_dict(data["tree"])
        return model


def tree_fit(X, y, sample_weight=None, **hyper):
    return DecisionTree(**hyper).fit(X, y, sample_weight)


def regression_tree(X, residual, weight, max_depth=3, min_gain=1e-7, min_leaf=5):
    """Squared-error tree on ``residual``; used as the boosting base learner."""
    return grow(X, np.zeros(len(X), dtype=np.int64), residual, weight, REGRESS,
                max_depth, min_gain, min_leaf)
