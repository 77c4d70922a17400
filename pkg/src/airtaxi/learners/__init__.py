"""The four demand-level classifiers behind a common fit/predict contract."""
import json

from .base import CLASS_NAMES, N_CLASSES, Classifier, softmax
from .boosting import GradientBoosting, gb_fit, gb_predict_proba
from .forest import RandomForest, resolve_mtry, rf_fit, rf_predict, rf_predict_proba
from .logistic import LogisticRegression, lr_fit, lr_loss_grad, lr_predict_proba
from .neural import NeuralNetwork, ann_fit, ann_loss_grad, ann_predict_proba
from .tree import DecisionTree, Split, best_split, entropy, tree_fit

LEARNERS = {
    "lr": LogisticRegression,
    "ann": NeuralNetwork,
    "rf": RandomForest,
    "gb": GradientBoosting,
    "tree": DecisionTree,
}


def make_learner(name, **params):
    try:
        return LEARNERS[name](**params)
    except KeyError:
        raise ValueError(f"unknown learner {name!r}; choose from {sorted(LEARNERS)}") from None


def model_from_dict(data):
    return LEARNERS[data["learner"]].from_dict(data)


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))


__all__ = [
    "CLASS_NAMES", "N_CLASSES", "Classifier", "softmax", "LEARNERS", "make_learner",
    "model_from_dict", "load_model",
    "LogisticRegression", "lr_fit", "lr_loss_grad", "lr_predict_proba",
    "NeuralNetwork", "ann_fit", "ann_loss_grad", "ann_predict_proba",
    "DecisionTree", "Split", "best_split", "entropy", "tree_fit",
    "RandomForest", "resolve_mtry", "rf_fit", "rf_predict", "rf_predict_proba",
    "GradientBoosting", "gb_fit", "gb_predict_proba",
]
