"""Splits, k-fold cross-validation, grid search, per-class metrics and timing."""
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import multiprocessing as mp
import numpy as np
from threadpoolctl import threadpool_limits

from ._seeding import derive_seed
from .features import DEMAND_LEVELS, FeatureMatrix, fit_bins, fit_encoder, label_samples
from .learners import make_learner

N_CLASSES = len(DEMAND_LEVELS)


# -- splitting --------------------------------------------------------------

def split_indices(M, ratio=0.70, seed=0):
    """Random ``round(ratio*M)`` / rest partition of ``range(M)``, each part sorted."""
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie strictly between 0 and 1")
    perm = np.random.default_rng(seed).permutation(M)
    n_train = int(round(ratio * M))
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split_train_test(rows, ratio=0.70, seed=0):
    """Split a sequence, array or :class:`FeatureMatrix` into (train, test)."""
    M = rows.X.shape[0] if isinstance(rows, FeatureMatrix) else len(rows)
    tr, te = split_indices(M, ratio, seed)
    return take(rows, tr), take(rows, te)


def take(rows, idx):
    if isinstance(rows, FeatureMatrix):
        return FeatureMatrix(rows.X[idx], None if rows.y is None else rows.y[idx],
                             rows.columns, rows.groups)
    if isinstance(rows, np.ndarray):
        return rows[idx]
    return [rows[i] for i in idx]


def kfold_indices(M, k=10, seed=0, labels=None):
    """``k`` disjoint folds covering ``range(M)``; sizes differ by at most one.

    With ``labels`` the folds are stratified: each class is shuffled and dealt
    round-robin, continuing where the previous class stopped.
    """
    if not 1 <= k <= M:
        raise ValueError(f"need 1 <= k <= M, got k={k}, M={M}")
    rng = np.random.default_rng(seed)
    if labels is None:
        return [np.sort(f) for f in np.array_split(rng.permutation(M), k)]
    labels = np.asarray(labels)
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == c))
                            for c in np.unique(labels)])
    return [np.sort(order[i::k]) for i in range(k)]


# -- metrics ----------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray          # rows = actual, columns = predicted

    @property
    def total(self):
        return int(self.counts.sum())

    def __add__(self, other):
        return ConfusionMatrix(self.counts + other.counts)


def confusion(actual, predicted, n_classes=N_CLASSES):
    actual = np.asarray(actual, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (actual, predicted), 1)
    return ConfusionMatrix(counts)


def f1_score(precision, recall):
    """Harmonic mean of precision and recall; 0 when both are 0."""
    p, r = np.asarray(precision, dtype=float), np.asarray(recall, dtype=float)
    s = p + r
    return np.divide(2 * p * r, s, out=np.zeros_like(s), where=s > 0)


@dataclass
class MetricsReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    learner: str | None = None
    K: int | None = None
    train_seconds: float | None = None

    @property
    def macro_precision(self):
        return float(np.mean(self.precision))

    @property
    def macro_recall(self):
        return float(np.mean(self.recall))

    @property
    def macro_f1(self):
        return float(np.mean(self.f1))

    def rows(self):
        """Table-2 style rows: one per demand class, then the Average row."""
        out = [(DEMAND_LEVELS[c], float(self.precision[c]), float(self.recall[c]), float(self.f1[c]))
               for c in range(len(self.f1))]
        out.append(("Average", self.macro_precision, self.macro_recall, self.macro_f1))
        return out


def metrics(cm, train_seconds=None, learner=None, K=None):
    """Per-class precision, recall, F1 and their unweighted means.

    A class never predicted has precision 0, a class never present has
    recall 0, and F1 is 0 whenever precision + recall is 0.
    """
    counts = cm.counts if isinstance(cm, ConfusionMatrix) else np.asarray(cm)
    diag = np.diag(counts).astype(float)
    col, row = counts.sum(axis=0).astype(float), counts.sum(axis=1).astype(float)
    precision = np.divide(diag, col, out=np.zeros_like(diag), where=col > 0)
    recall = np.divide(diag, row, out=np.zeros_like(diag), where=row > 0)
    return MetricsReport(precision, recall, f1_score(precision, recall), learner, K, train_seconds)


def macro_f1(actual, predicted):
    return metrics(confusion(actual, predicted)).macro_f1


def time_training(model, X, y):
    """Wall-clock seconds spent in ``model.fit(X, y)`` alone."""
    start = time.perf_counter()
    model.fit(X, y)
    return time.perf_counter() - start


# -- grids ------------------------------------------------------------------

TREE_COUNTS = tuple(range(100, 1001, 100))
MTRY_CHOICES = ("sqrt", "N/2", "N/3", "N/4")
ANN_RATES = (0.01, 0.05, 0.10)


def default_grid(learner, n_features=None):
    """Built-in search spaces; LR has none."""
    if learner == "lr":
        return []
    if learner == "rf":
        return [{"n_trees": t, "mtry": m} for t in TREE_COUNTS for m in MTRY_CHOICES]
    if learner == "gb":
        return [{"n_trees": t} for t in TREE_COUNTS]
    if learner == "ann":
        if n_features is None:
            raise ValueError("the ANN grid depends on the number of predictors")
        return [{"hidden": h, "rate": r}
                for h in range(1, n_features + 1, 5) for r in ANN_RATES]
    raise ValueError(f"no default grid for learner {learner!r}")


def build_grid(learner, spec, n_features):
    """Expand a config grid ``{param: [values]}`` into cells.

    ``hidden: "1:N:5"`` expands against the number of predictors.
    """
    if spec is None:
        return default_grid(learner, n_features)
    if isinstance(spec, list):
        return [dict(c) for c in spec]
    keys = list(spec)
    values = []
    for key in keys:
        v = spec[key]
        if isinstance(v, str) and v.count(":") == 2:
            lo, hi, step = v.split(":")
            hi = n_features if hi.strip() == "N" else int(hi)
            v = list(range(int(lo), hi + 1, int(step)))
        values.append(v if isinstance(v, (list, tuple)) else [v])
    cells = [{}]
    for key, vals in zip(keys, values):
        cells = [dict(c, **{key: val}) for c in cells for val in vals]
    return cells


# -- cross-validation -------------------------------------------------------

def fold_data(rows, folds):
    """Per-fold (X_train, y_train, X_valid, y_valid).

    For samples, demand bins and the encoder are refit on each fold's
    training part; a :class:`FeatureMatrix` is split as is.
    """
    out = []
    all_idx = np.arange(len(rows.y) if isinstance(rows, FeatureMatrix) else len(rows))
    for f, valid in enumerate(folds):
        train = np.setdiff1d(all_idx, valid, assume_unique=True)
        if isinstance(rows, FeatureMatrix):
            out.append((rows.X[train], rows.y[train], rows.X[valid], rows.y[valid]))
            continue
        tr = [rows[i] for i in train]
        va = [rows[i] for i in valid]
        bins = fit_bins([s.passengers for s in tr])
        tr, va = label_samples(tr, bins), label_samples(va, bins)
        enc = fit_encoder(tr)
        A, B = enc.transform(tr), enc.transform(va)
        out.append((A.X, A.y, B.X, B.y))
    return out


_SEEDED = {"ann", "rf", "gb", "tree"}
_WORKER = {}


def _fit_score(learner, params, seed, data):
    Xtr, ytr, Xva, yva = data
    kwargs = dict(params)
    if learner in _SEEDED:
        kwargs["seed"] = seed
    model = make_learner(learner, **kwargs)
    model.fit(Xtr, ytr)
    cm = confusion(yva, model.predict(Xva))
    return metrics(cm).macro_f1, cm.counts


def _run_unit(unit):
    cell, fold, learner, params, seed = unit
    data = _WORKER["folds"][fold]
    try:
        with threadpool_limits(1):
            score, counts = _fit_score(learner, params, seed, data)
        return cell, fold, score, counts, None
    except Exception as exc:          # a failing cell is recorded, not fatal
        note = f"{type(exc).__name__}: {exc}"
        if os.environ.get("AIRTAXI_DEBUG"):
            note += "\n" + traceback.format_exc()
        return cell, fold, 0.0, np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64), note


def _init_worker(folds):
    _WORKER["folds"] = folds


@dataclass
class GridResult:
    learner: str
    cells: list
    scores: list                      # mean CV macro-F1 per cell
    fold_scores: list
    errors: dict = field(default_factory=dict)
    fold_seeds: list = field(default_factory=list)
    confusions: list = field(default_factory=list)   # pooled out-of-fold, per cell

    @property
    def best_index(self):
        if not self.cells:
            return None
        return int(np.argmax(self.scores))         # first maximum in grid order

    @property
    def best_params(self):
        return {} if self.best_index is None else dict(self.cells[self.best_index])

    @property
    def best_confusion(self):
        if self.best_index is None:
            return None
        return ConfusionMatrix(np.asarray(self.confusions[self.best_index]))

    def to_dict(self):
        return {"learner": self.learner, "cells": self.cells, "scores": self.scores,
                "fold_scores": self.fold_scores,
                "errors": {str(k): v for k, v in sorted(self.errors.items())},
                "best_index": self.best_index, "best_params": self.best_params,
                "fold_seeds": self.fold_seeds,
                "confusions": [np.asarray(c).tolist() for c in self.confusions]}

    @classmethod
    def from_dict(cls, data):
        return cls(data["learner"], data["cells"], data["scores"], data["fold_scores"],
                   {int(k): v for k, v in data.get("errors", {}).items()},
                   data.get("fold_seeds", []), data.get("confusions", []))


def grid_search(learner, grid, rows, k=10, seed=0, jobs=1, stratified=False):
    """Score every grid cell by k-fold CV on ``rows``; see :class:`GridResult`.

    Each (cell, fold) unit uses the model seed ``derive_seed(seed, cell,
    fold)``, so results do not depend on ``jobs``.
    """
    grid = [dict(c) for c in grid]
    if not grid:
        return GridResult(learner, [], [], [])
    M = len(rows.y) if isinstance(rows, FeatureMatrix) else len(rows)
    labels = None
    if stratified:
        labels = rows.y if isinstance(rows, FeatureMatrix) else [s.passengers for s in rows]
        if not isinstance(rows, FeatureMatrix):
            bins = fit_bins(labels)
            labels = [s.demand for s in label_samples(rows, bins)]
    folds = kfold_indices(M, k, derive_seed(seed, "folds"), labels)
    data = fold_data(rows, folds)
    units = [(c, f, learner, grid[c], derive_seed(seed, "cell", c, "fold", f))
             for c in range(len(grid)) for f in range(k)]

    if jobs <= 1:
        _init_worker(data)
        results = [_run_unit(u) for u in units]
    else:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx,
                                 initializer=_init_worker, initargs=(data,)) as pool:
            results = list(pool.map(_run_unit, units, chunksize=1))

    fold_scores = [[0.0] * k for _ in grid]
    pooled = [np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64) for _ in grid]
    errors = {}
    for cell, fold, score, counts, note in results:
        fold_scores[cell][fold] = float(score)
        pooled[cell] += counts
        if note:
            errors.setdefault(cell, note)
    scores = [0.0 if c in errors else float(np.mean(fs)) for c, fs in enumerate(fold_scores)]
    return GridResult(learner, grid, scores, fold_scores, errors,
                      [[u[4] for u in units if u[0] == c] for c in range(len(grid))],
                      [p.tolist() for p in pooled])


def cross_validate(learner, params, rows, k=10, seed=0):
    """Mean CV macro-F1 of one configuration (a one-cell grid search)."""
    return grid_search(learner, [params], rows, k, seed).scores[0]
