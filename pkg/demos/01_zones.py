"""Pickup zones from k-means, on a small synthetic week."""
from datetime import date

import numpy as np

from airtaxi.geo_cluster import assign_location, kmeans_fit, wcss_of
from airtaxi.synthetic import SyntheticSpec, generate_synthetic

spec = SyntheticSpec(n_trips=5000, end=date(2015, 5, 10))
data = generate_synthetic(spec, seed=1)
pts = np.array([(t.origin_lat, t.origin_lon) for t in data.trips])
print(len(pts), "pickups")

# objective falls as K grows; the drop flattens past the 5 planted hotspots
for K in (2, 5, 10):
    model = kmeans_fit(pts, K, seed=0)
    print(f"K={K:2d}  wcss={model.wcss:.4f}  iterations={model.iterations_run}")

model = kmeans_fit(pts, 5, seed=0)
print(np.round(model.centroids, 4))
print("planted:", data.manifest["hotspot_centers"])

# the per-iteration trace never goes up
print(np.round(model.trace, 4))

# a pickup right at the airport-like hub
print("zone of hub:", assign_location((spec.hotspots[0].lat, spec.hotspots[0].lon), model))
print("recomputed wcss:", wcss_of(pts, model))
