"""Multinomial gradient boosting with shallow regression trees.

Scores start at the log class frequencies. Each stage fits one
squared-error tree per class to the residual ``y_c - p_c`` on a subsample
drawn without replacement, replaces leaf means by the one-step Newton value
``(C-1)/C * sum(r) / sum(|r|(1-|r|))`` and adds the tree scaled by the
shrinkage factor. Probabilities are the softmax of the summed scores.
"""
import numpy as np

from .._seeding import derive_seed
from ..errors import TrainingError
from .base import N_CLASSES, Classifier, check_xy, one_hot, softmax
from .tree import TreeStructure, regression_tree


def deviance(scores, y):
    """Mean multinomial negative log-likelihood."""
    P = softmax(scores)
    return float(-np.mean(np.log(np.clip(P[np.arange(len(y)), y], 1e-300, None))))


class GradientBoosting(Classifier):
    name = "gb"

    def __init__(self, n_trees=100, shrinkage=0.1, subsample=0.5, max_depth=3,
                 min_leaf=5, min_gain=1e-7, seed=0):
        if n_trees < 0:
            raise ValueError("n_trees must be non-negative")
        if not 0.0 < subsample <= 1.0:
            raise ValueError("subsample fraction must lie in (0, 1]")
        if shrinkage <= 0:
            raise ValueError("shrinkage must be positive")
        self.n_trees = int(n_trees)
        self.shrinkage = float(shrinkage)
        self.subsample = float(subsample)
        self.max_depth = int(max_depth)
        self.min_leaf = min_leaf
        self.min_gain = min_gain
        self.seed = int(seed)
        self.init_scores_ = None
        self.stages_ = []
        self.train_deviance_ = []

    def get_params(self):
        return {"n_trees": self.n_trees, "shrinkage": self.shrinkage,
                "subsample": self.subsample, "max_depth": self.max_depth,
                "min_leaf": self.min_leaf, "min_gain": self.min_gain, "seed": self.seed}

    def fit(self, X, y):
        X, y = check_xy(X, y)
        X = np.ascontiguousarray(X)
        m = len(X)
        freq = np.bincount(y, minlength=N_CLASSES) / m
        self.init_scores_ = np.log(np.clip(freq, 1e-12, None))
        F = np.tile(self.init_scores_, (m, 1))
        Y = one_hot(y)
        n_sub = max(1, int(round(self.subsample * m)))
        self.stages_ = []
        trace = [deviance(F, y)]
        k = N_CLASSES
        for stage in range(self.n_trees):
            rng = np.random.default_rng(derive_seed(self.seed, "stage", stage))
            weight = np.zeros(m)
            if n_sub == m:
                weight[:] = 1.0
            else:
                weight[rng.choice(m, n_sub, replace=False)] = 1.0
            in_bag = weight > 0
            P = softmax(F)
            trees = []
            for c in range(k):
                r = Y[:, c] - P[:, c]
                tree = regression_tree(X, r, weight, self.max_depth, self.min_gain, self.min_leaf)
                leaf_all = tree.apply(X)
                leaf_bag = leaf_all[in_bag]
                rb = r[in_bag]
                num = np.bincount(leaf_bag, weights=rb, minlength=tree.n_nodes)
                den = np.bincount(leaf_bag, weights=np.abs(rb) * (1.0 - np.abs(rb)),
                                  minlength=tree.n_nodes)
                gamma = np.zeros(tree.n_nodes)
                ok = den > 1e-150
                gamma[ok] = (k - 1) / k * num[ok] / den[ok]
                tree.value = gamma[:, None]
                trees.append(tree)
                F[:, c] += self.shrinkage * gamma[leaf_all]
            dev = deviance(F, y)
            if not np.isfinite(dev):
                raise TrainingError(f"non-finite deviance at stage {stage}", stage)
            trace.append(dev)
            self.stages_.append(trees)
        self.train_deviance_ = trace
        return self

    def decision_function(self, X, n_stages=None):
        X = np.ascontiguousarray(check_xy(X))
        F = np.tile(self.init_scores_, (len(X), 1))
        stages = self.stages_ if n_stages is None else self.stages_[:n_stages]
        for trees in stages:
            for c, tree in enumerate(trees):
                F[:, c] += self.shrinkage * tree.value[tree.apply(X), 0]
        return F

    def staged_decision_function(self, X):
        """Scores after 0, 1, ..., T stages."""
        X = np.ascontiguousarray(check_xy(X))
        F = np.tile(self.init_scores_, (len(X), 1))
        yield F.copy()
        for trees in self.stages_:
            for c, tree in enumerate(trees):
                F[:, c] += self.shrinkage * tree.value[tree.apply(X), 0]
            yield F.copy()

    def predict_proba(self, X, n_stages=None):
        return softmax(self.decision_function(X, n_stages))

    def to_dict(self):
        return {"learner": self.name, "params": self.get_params(),
                "init_scores": self.init_scores_.tolist(),
                "stages": [[t.to_dict() for t in trees] for trees in self.stages_]}

    @classmethod
    def from_dict(cls, data):
        model = cls(**data["params"])
        model.init_scores_ = np.asarray(data["init_scores"], dtype=float)
        model.stages_ = [[TreeStructure.from_dict(t) for t in trees] for trees in data["stages"]]
        return model


def gb_fit(X, y, **hyper):
    return GradientBoosting(**hyper).fit(X, y)


def gb_predict_proba(model, rows):
    return model.predict_proba(rows)
