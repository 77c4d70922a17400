"""Permutation feature importance with one-hot blocks permuted as a unit."""
import csv
from dataclasses import dataclass

import numpy as np

from ._seeding import derive_seed


@dataclass
class ImportanceTable:
    features: list            # group names in declaration order
    importance: np.ndarray    # mean increase in classification error
    std: np.ndarray           # spread across repeats (population std)
    baseline_error: float
    repeats: int

    @property
    def ranks(self):
        order = sorted(range(len(self.features)), key=lambda g: (-self.importance[g], g))
        ranks = np.empty(len(order), dtype=int)
        ranks[order] = np.arange(1, len(order) + 1)
        return ranks

    def rows(self):
        ranks = self.ranks
        return [(f, float(self.importance[g]), float(self.std[g]), int(ranks[g]))
                for g, f in enumerate(self.features)]

    def to_dict(self):
        return {"baseline_error": self.baseline_error, "repeats": self.repeats,
                "features": [{"feature": f, "importance": i, "std": s, "rank": r}
                             for f, i, s, r in self.rows()]}

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["feature", "importance", "std", "rank"])
            for f, i, s, r in self.rows():
                w.writerow([f, repr(i), repr(s), r])


def _check_partition(groups, n_columns):
    cols = sorted(c for g in groups.values() for c in g)
    if cols != list(range(n_columns)):
        raise ValueError("groups must partition the matrix columns exactly once each")


def permutation_importance(model, X, y, groups, repeats=10, seed=0):
    """Mean rise in ``1 - accuracy`` when each group's columns are shuffled jointly.

    ``groups`` maps a feature name to its column indices. ``X`` is never
    modified. Importances are left unclipped, so noise may make them negative.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    _check_partition(groups, X.shape[1])
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    base = float(np.mean(model.predict(X) != y))
    names = list(groups)
    imp = np.zeros(len(names))
    std = np.zeros(len(names))
    work = X.copy()
    for g, name in enumerate(names):
        cols = list(groups[name])
        rises = np.empty(repeats)
        for r in range(repeats):
            perm = np.random.default_rng(derive_seed(seed, name, r)).permutation(len(X))
            work[:, cols] = X[perm][:, cols]
            rises[r] = float(np.mean(model.predict(work) != y)) - base
            work[:, cols] = X[:, cols]
        imp[g] = rises.mean()
        std[g] = rises.std()
    return ImportanceTable(names, imp, std, base, repeats)


def top_features(table, n=5):
    """``n`` highest (feature, importance) pairs; ties keep declaration order."""
    order = sorted(range(len(table.features)), key=lambda g: (-table.importance[g], g))
    return [(table.features[g], float(table.importance[g])) for g in order[:n]]
