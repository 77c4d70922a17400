"""Which feature groups does boosting lean on?"""

from airtaxi.evaluation import split_train_test
from airtaxi.features import aggregate_samples, fit_bins, fit_encoder, join_weather, label_samples
from airtaxi.geo_cluster import kmeans_fit
from airtaxi.importance import permutation_importance, top_features
from airtaxi.learners import GradientBoosting
from airtaxi.synthetic import SyntheticSpec, generate_synthetic

data = generate_synthetic(SyntheticSpec(n_trips=20000), seed=5)
print("planted:", data.manifest["planted_drivers"])
model = kmeans_fit([(t.origin_lat, t.origin_lon) for t in data.trips], 5)
samples = join_weather(aggregate_samples(data.trips, model), data.weather)
train, test = split_train_test(samples, 0.7, seed=0)
bins = fit_bins([s.passengers for s in train])
enc = fit_encoder(label_samples(train, bins))
A, B = enc.transform(label_samples(train, bins)), enc.transform(label_samples(test, bins))

gb = GradientBoosting(n_trees=200, seed=1).fit(A.X, A.y)
# one-hot blocks are shuffled as a unit, so each feature is scored once
table = permutation_importance(gb, B.X, B.y, B.groups, repeats=5, seed=0)
print(f"baseline error {table.baseline_error:.3f}")
for feature, imp, std, rank in sorted(table.rows(), key=lambda r: r[3]):
    print(f"{rank:2d} {feature:12s} {imp:+.4f} ± {std:.4f}")
print("top 5:", [f for f, _ in top_features(table, 5)])
