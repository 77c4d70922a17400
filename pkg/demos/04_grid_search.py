"""Cross-validated grid search and Table-2-style metrics."""

import numpy as np

from airtaxi.evaluation import confusion, grid_search, metrics, split_train_test
from airtaxi.features import aggregate_samples, fit_bins, fit_encoder, join_weather, label_samples
from airtaxi.geo_cluster import kmeans_fit
from airtaxi.learners import make_learner
from airtaxi.synthetic import SyntheticSpec, generate_synthetic

data = generate_synthetic(SyntheticSpec(n_trips=15000), seed=2)
model = kmeans_fit([(t.origin_lat, t.origin_lon) for t in data.trips], 5)
samples = join_weather(aggregate_samples(data.trips, model), data.weather)
train, test = split_train_test(samples, 0.7, seed=0)

# bins and encoder are refit inside each fold from raw samples
res = grid_search("rf", [{"n_trees": 30, "mtry": m} for m in ("sqrt", "N/2", "N/4")], train, k=5, seed=1)
for cell, score in zip(res.cells, res.scores):
    print(cell, f"cv macro-F1 {score:.4f}")
print("best:", res.best_params)

bins = fit_bins([s.passengers for s in train])
train, test = label_samples(train, bins), label_samples(test, bins)
enc = fit_encoder(train)
A, B = enc.transform(train), enc.transform(test)

rf = make_learner("rf", **res.best_params, seed=3).fit(A.X, A.y)
rep = metrics(confusion(B.y, rf.predict(B.X)), learner="rf", K=5)
print(f"{'demand':9s} {'P':>7s} {'R':>7s} {'F1':>7s}")
for demand, p, r, f in rep.rows():
    print(f"{demand:9s} {p:7.4f} {r:7.4f} {f:7.4f}")
print(confusion(B.y, rf.predict(B.X)).counts)
