"""The four learners on a toy problem, plus the gradient check."""
import numpy as np

from airtaxi.learners import (GradientBoosting, LogisticRegression, NeuralNetwork, RandomForest,
                              ann_loss_grad, lr_loss_grad)
from airtaxi.learners.base import one_hot

rng = np.random.default_rng(0)

# central differences against the analytic LR gradient
X, Y = rng.normal(size=(5, 4)), one_hot(rng.integers(0, 3, 5))
W = rng.normal(size=(5, 3))
_, g = lr_loss_grad(W, X, Y)
h = 1e-6
E = np.zeros_like(W)
E[2, 1] = h
print("dL/dW[2,1]", g[2, 1], (lr_loss_grad(W + E, X, Y)[0] - lr_loss_grad(W - E, X, Y)[0]) / (2 * h))

# XOR: linear model stuck, hidden layer solves it
Xx = np.array([[0, 0], [0, 1], [1, 0], [1, 1]] * 5, dtype=float)
yx = np.array([0, 2, 2, 0] * 5)
print("LR  xor acc", np.mean(LogisticRegression().fit(Xx, yx).predict(Xx) == yx))
print("ANN xor acc", np.mean(NeuralNetwork(hidden=4, rate=2.0, epochs=3000, seed=1).fit(Xx, yx).predict(Xx) == yx))

# a ring: class depends on radius, not direction
Xr = rng.normal(size=(600, 2))
yr = np.digitize(np.hypot(*Xr.T), [0.8, 1.5])
Xt = rng.normal(size=(600, 2))
yt = np.digitize(np.hypot(*Xt.T), [0.8, 1.5])
for model in (LogisticRegression(), NeuralNetwork(hidden=8, rate=0.5, epochs=2000),
              RandomForest(n_trees=100, seed=2), GradientBoosting(n_trees=100, seed=2)):
    model.fit(Xr, yr)
    print(f"{model.name:4s} test acc {np.mean(model.predict(Xt) == yt):.3f}")

gb = GradientBoosting(n_trees=50, shrinkage=0.05, subsample=1.0).fit(Xr, yr)
print("GB deviance", np.round(gb.train_deviance_[::10], 4))
