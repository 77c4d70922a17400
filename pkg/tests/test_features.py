from dataclasses import replace
from datetime import date, datetime

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airtaxi.errors import EmptyDatasetError
from airtaxi.features import (FEATURES, BinThresholds, Sample, aggregate_samples, bin_demand,
                              clean, derive_temporal, fit_bins, fit_encoder, fit_imputer,
                              join_weather, label_samples, read_prepared, write_prepared)
from airtaxi.geo_cluster import ClusterModel
from airtaxi.ingest import TripRecord, WeatherRecord

ONE_ZONE = ClusterModel(1, np.array([[40.7, -73.9]]), 0, 0, 0.0)


def trip(when, pax=1, lat=40.7, lon=-73.9):
    t = datetime.fromisoformat(when)
    return TripRecord(t, t.replace(minute=59), pax, lat, lon, 40.0, -74.0)


def sample(temp=10.0, cond="Normal", vis=10.0, wind=5.0, hum=50.0, fog=False, pax=1,
           month="May", slot=1, loc=1, demand="low"):
    return Sample(loc, date(2015, 5, 4), slot, month, "Mon", True, temp, cond, vis, wind, hum,
                  fog, pax, demand)


def test_derive_temporal_examples():
    assert derive_temporal(datetime(2015, 5, 4, 17, 30))[:4] == ("May", "Mon", True, 18)
    assert derive_temporal(datetime(2015, 1, 4, 0, 5))[:4] == ("Jan", "Sun", False, 1)
    assert derive_temporal(datetime(2016, 2, 29, 23, 59))[3] == 24


@given(st.datetimes(min_value=datetime(1990, 1, 1), max_value=datetime(2100, 1, 1)))
def test_temporal_fields_agree_with_the_calendar(t):
    month, dow, weekday, slot, day = derive_temporal(t)
    assert day == t.date() and slot == t.hour + 1
    assert dow == t.strftime("%a")
    assert month == t.strftime("%b")
    assert weekday == (t.weekday() < 5)


def test_aggregation_sums_a_cell_and_splits_hours():
    s = aggregate_samples([trip("2015-05-04T17:05", 2), trip("2015-05-04T17:40", 3)], ONE_ZONE)
    assert len(s) == 1 and s[0].passengers == 5 and s[0].time_slot == 18
    s = aggregate_samples([trip("2015-05-04T17:05"), trip("2015-05-04T18:05")], ONE_ZONE)
    assert [x.time_slot for x in s] == [18, 19]


def test_aggregation_conserves_passengers():
    rng = np.random.default_rng(0)
    model = ClusterModel(2, np.array([[40.6, -73.8], [40.8, -74.0]]), 0, 0, 0.0)
    trips = [trip(f"2015-05-0{rng.integers(1, 9)}T{rng.integers(0, 24):02d}:15",
                  int(rng.integers(1, 5)), 40.6 + 0.2 * rng.random(), -74 + 0.2 * rng.random())
             for _ in range(300)]
    samples = aggregate_samples(trips, model)
    assert sum(s.passengers for s in samples) == sum(t.passengers for t in trips)
    keys = [(s.date, s.time_slot, s.location_id) for s in samples]
    assert keys == sorted(set(keys))


def test_bins_nearest_rank():
    assert fit_bins([1, 2, 3]) == BinThresholds(1, 2)
    assert fit_bins([4] * 7) == BinThresholds(4, 4)
    assert fit_bins(range(1, 301)) == BinThresholds(100, 200)
    with pytest.raises(ValueError):
        fit_bins([])


def test_bin_demand_boundaries():
    th = BinThresholds(1, 2)
    assert [bin_demand(p, th) for p in (1, 2, 3)] == ["low", "moderate", "high"]


@given(st.lists(st.integers(0, 500), min_size=1, max_size=60), st.integers(0, 500), st.integers(0, 500))
def test_binning_is_monotone(counts, a, b):
    th = fit_bins(counts)
    assert 0 <= th.t_low <= th.t_high
    order = {"low": 0, "moderate": 1, "high": 2}
    lo, hi = min(a, b), max(a, b)
    assert order[bin_demand(lo, th)] <= order[bin_demand(hi, th)]


def test_join_weather():
    w = WeatherRecord(datetime(2015, 5, 4, 17), 21.0, "Rain", None, 7.0, 80.0, False)
    base = replace(sample(slot=18), temperature=None, condition=None)
    hit, miss = join_weather([base, replace(base, time_slot=3)], [w])
    assert (hit.temperature, hit.condition, hit.wind_speed, hit.humidity, hit.fog) == \
        (21.0, "Rain", 7.0, 80.0, False)
    assert hit.visibility is None
    assert miss.has_missing() and miss.temperature is None and miss.condition is None


def test_median_mode_fills():
    rows = [sample(temp=10.0, cond="Rain"), sample(temp=20.0, cond="Rain"),
            sample(temp=None, cond="Normal"), sample(temp=15.0, cond=None)]
    out = clean(rows, "median_mode")
    assert len(out) == 4
    assert out[2].temperature == 15.0
    assert out[3].condition == "Rain"


def test_listwise_drops_incomplete_rows():
    rows = [sample(), sample(temp=None), sample(), sample(hum=None), sample()]
    out = clean(rows, "listwise")
    assert len(out) == 3 and all(r in rows for r in out)
    with pytest.raises(EmptyDatasetError):
        clean([sample(temp=None)], "listwise")


def test_regression_imputation_recovers_linear_relation():
    rows = [sample(temp=float(t), hum=2.0 * t + 5.0, slot=1 + t % 3) for t in range(10)]
    rows.append(sample(temp=4.5, hum=None))
    out = clean(rows, "regression")
    assert out[-1].humidity == pytest.approx(14.0)


def test_imputer_fitted_on_train_applies_to_test():
    imp = fit_imputer([sample(temp=1.0), sample(temp=3.0)], "median_mode")
    (filled,) = imp.transform([sample(temp=None)])
    assert filled.temperature == 2.0


def test_encoder_layout_and_month_one_hot():
    months = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]
    train = [sample(month=m) for m in months]
    enc = fit_encoder(train)
    month_cols = [c for c in enc.columns if c.startswith("Month_")]
    assert len(month_cols) == 12 and "Month_Jan" in month_cols
    row = enc.transform([sample(month="Jan")]).X[0]
    assert row[enc.columns.index("Month_Jan")] == 1.0
    assert row[enc.groups["month"]].sum() == 1.0
    assert len(set(enc.columns)) == len(enc.columns)
    prefixes = [p for _, p, _ in FEATURES]
    assert [c.split("_")[0] for c in enc.columns][0] == prefixes[0]


def test_encoder_scaling_conventions():
    enc = fit_encoder([sample(temp=0.0), sample(temp=10.0), sample(temp=20.0)])
    assert enc.stats["temperature"] == (10.0, 10.0)       # sample std, n-1
    assert enc.stats["humidity"][1] == 0.0
    X = enc.transform([sample(temp=10.0, hum=60.0)]).X[0]
    assert X[enc.groups["temperature"][0]] == 0.0
    assert X[enc.groups["humidity"][0]] == 10.0           # constant column: centered only


def test_unseen_level_gives_zero_block():
    enc = fit_encoder([sample(cond="Normal"), sample(cond="Rain")])
    X = enc.transform([sample(cond="Snow")]).X[0]
    assert X[enc.groups["condition"]].sum() == 0.0


samples_st = st.lists(st.builds(
    sample,
    temp=st.floats(-20, 40), cond=st.sampled_from(["Normal", "Snow", "Rain", "Thunderstorm"]),
    vis=st.floats(0, 10), wind=st.floats(0, 30), hum=st.floats(0, 100), fog=st.booleans(),
    month=st.sampled_from(["Jan", "May", "Dec"]), slot=st.integers(1, 24), loc=st.integers(1, 5)),
    min_size=2, max_size=30)


@settings(max_examples=60, deadline=None)
@given(samples_st)
def test_encoded_training_data_is_standardized(rows):
    enc = fit_encoder(rows)
    A = enc.transform(rows)
    for f, cols in enc.groups.items():
        block = A.X[:, cols]
        if f in enc.levels:
            np.testing.assert_array_equal(block.sum(axis=1), 1.0)
        elif enc.stats[f][1] > 1e-9 * (1 + abs(enc.stats[f][0])):
            assert abs(block.mean()) < 1e-9
            assert block.std(ddof=1) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(samples_st, st.integers(0, 3))
def test_cleaning_properties(rows, n_holes):
    rows = [replace(r, temperature=None) if i < n_holes else r for i, r in enumerate(rows)]
    kept = clean(rows, "listwise") if n_holes < len(rows) else []
    assert all(r in rows for r in kept)
    if n_holes < len(rows):
        filled = clean(rows, "median_mode")
        assert len(filled) == len(rows)
        assert not any(r.has_missing() for r in filled)


def test_prepared_file_round_trip(tmp_path):
    rows = label_samples([sample(pax=p, temp=None if p == 2 else 1.5) for p in (1, 2, 3)],
                         BinThresholds(1, 2))
    write_prepared(rows, tmp_path / "d.csv", ["train", "test", "train"])
    back, splits = read_prepared(tmp_path / "d.csv")
    assert back == rows and splits == ["train", "test", "train"]
