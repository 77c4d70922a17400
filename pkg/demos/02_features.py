"""From trips and weather to the encoded sample matrix."""
import tempfile
from datetime import date
from pathlib import Path

import numpy as np

from airtaxi.features import (aggregate_samples, clean, fit_bins, fit_encoder, join_weather,
                              label_samples)
from airtaxi.geo_cluster import kmeans_fit
from airtaxi.ingest import parse_trips, parse_weather
from airtaxi.synthetic import SyntheticSpec, generate_synthetic, write_synthetic

data = generate_synthetic(SyntheticSpec(n_trips=8000, end=date(2015, 5, 17), missing_rate=0.02), seed=4)
out = Path(tempfile.mkdtemp())
write_synthetic(data, out)

# corrupted rows are rejected on read, sentinels become missing fields
trips, trip_report = parse_trips(out / "trips.csv")
weather, weather_report = parse_weather(out / "weather.csv")
print("rejected trips:", dict(trip_report.reasons))
print("missing weather fields:", dict(weather_report.missing))

model = kmeans_fit([(t.origin_lat, t.origin_lon) for t in trips], 5)
samples = join_weather(aggregate_samples(trips, model), weather)
print(len(samples), "(zone, date, hour) cells,", sum(s.has_missing() for s in samples), "with a gap")

# compare the cleaning strategies
for strategy in ("listwise", "median_mode", "regression"):
    print(f"{strategy:12s} -> {len(clean(samples, strategy))} rows")
samples = clean(samples, "median_mode")

bins = fit_bins([s.passengers for s in samples])
print("tertile thresholds:", bins)
samples = label_samples(samples, bins)
print({lv: sum(s.demand == lv for s in samples) for lv in ("low", "moderate", "high")})

enc = fit_encoder(samples)
A = enc.transform(samples)
print(A.X.shape, A.columns[:8], "...")
print("temperature mean/std after scaling:",
      np.round(A.X[:, enc.groups["temperature"]].mean(), 12),
      np.round(A.X[:, enc.groups["temperature"]].std(ddof=1), 12))
