"""Random forest: bootstrap resamples, per-node feature subsampling, hard votes."""
import math

import numpy as np

from .._seeding import derive_seed
from .base import N_CLASSES, Classifier, check_xy
from ._tree_kernels import CLASSIFY, forest_votes
from .tree import TreeStructure, grow

MTRY_RULES = {
    "sqrt": lambda n: int(math.sqrt(n)),
    "N/2": lambda n: n // 2,
    "N/3": lambda n: n // 3,
    "N/4": lambda n: n // 4,
}


def resolve_mtry(mtry, n_features):
    """Features tried per node: an int, or one of ``sqrt``, ``N/2``, ``N/3``, ``N/4``."""
    if mtry is None:
        return n_features
    if isinstance(mtry, str):
        if mtry not in MTRY_RULES:
            raise ValueError(f"unknown mtry rule {mtry!r}")
        mtry = MTRY_RULES[mtry](n_features)
    return int(min(max(int(mtry), 1), n_features))


class RandomForest(Classifier):
    name = "rf"

    def __init__(self, n_trees=100, mtry="sqrt", bootstrap=True, max_depth=None,
                 min_gain=1e-7, min_leaf=1, seed=0):
        if n_trees < 1:
            raise ValueError("a forest needs at least one tree")
        self.n_trees = int(n_trees)
        self.mtry = mtry
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_gain = min_gain
        self.min_leaf = min_leaf
        self.seed = int(seed)
        self.trees_ = []
        self.mtry_ = None
        self._packed = None

    def get_params(self):
        return {"n_trees": self.n_trees, "mtry": self.mtry, "bootstrap": self.bootstrap,
                "max_depth": self.max_depth, "min_gain": self.min_gain,
                "min_leaf": self.min_leaf, "seed": self.seed}

    def tree_seed(self, t):
        return derive_seed(self.seed, "tree", t)

    def fit(self, X, y):
        X, y = check_xy(X, y)
        X = np.ascontiguousarray(X)
        m, n = X.shape
        self.mtry_ = resolve_mtry(self.mtry, n)
        zeros = np.zeros(m)
        self.trees_ = []
        for t in range(self.n_trees):
            seed = self.tree_seed(t)
            if self.bootstrap:
                draw = np.random.default_rng(seed).integers(0, m, m)
                weight = np.bincount(draw, minlength=m).astype(float)
            else:
                weight = np.ones(m)
            self.trees_.append(grow(X, y, zeros, weight, CLASSIFY, self.max_depth,
                                    self.min_gain, self.min_leaf, self.mtry_, seed))
        self._packed = None
        return self

    def _pack(self):
        if self._packed is None:
            sizes = [tr.n_nodes for tr in self.trees_]
            offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
            self._packed = (
                np.concatenate([tr.feature for tr in self.trees_]),
                np.concatenate([tr.threshold for tr in self.trees_]),
                np.concatenate([tr.left for tr in self.trees_]),
                np.concatenate([tr.right for tr in self.trees_]),
                np.concatenate([np.argmax(tr.value, axis=1) for tr in self.trees_]).astype(np.int64),
                offsets)
        return self._packed

    def votes(self, X, n_trees=None):
        """Vote counts per class; ``n_trees`` limits to the first trees."""
        X = np.ascontiguousarray(check_xy(X))
        feat, thr, lft, rgt, cls, offsets = self._pack()
        k = len(self.trees_) if n_trees is None else int(n_trees)
        return forest_votes(X, feat, thr, lft, rgt, cls, offsets[:k + 1], N_CLASSES)

    def predict_proba(self, X, n_trees=None):
        v = self.votes(X, n_trees)
        return v / v.sum(axis=1, keepdims=True)

    def to_dict(self):
        return {"learner": self.name, "params": self.get_params(), "mtry_resolved": self.mtry_,
                "tree_seeds": [self.tree_seed(t) for t in range(len(self.trees_))],
                "trees": [tr.to_dict() for tr in self.trees_]}

    @classmethod
    def from_dict(cls, data):
        model = cls(**data["params"])
        model.mtry_ = data["mtry_resolved"]
        model.trees_ = [TreeStructure.from_dict(t) for t in data["trees"]]
        return model


def rf_fit(X, y, **hyper):
    return RandomForest(**hyper).fit(X, y)


def rf_predict(model, rows):
    return model.predict(rows)


def rf_predict_proba(model, rows):
    return model.predict_proba(rows)
