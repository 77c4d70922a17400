"""Modeling dataset: temporal features, demand aggregation and binning,
weather join, missing-value cleaning, one-hot encoding and scaling.
"""
import csv
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field, fields, replace
from datetime import date, datetime, timedelta

import numpy as np

from .errors import EmptyDatasetError
from .geo_cluster import assign_locations
from .ingest import CONDITIONS, format_number

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
DAYS = ("Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat")
DEMAND_LEVELS = ("low", "moderate", "high")
WEATHER_ATTRS = ("temperature", "condition", "visibility", "wind_speed", "humidity", "fog")
CONTINUOUS = ("temperature", "visibility", "wind_speed", "humidity")
CATEGORICAL = ("month", "day_of_week", "time_slot", "weekday", "location_id", "condition", "fog")

# Predictors in Table-1 order: (attribute, column prefix, kind)
FEATURES = (
    ("month", "Month", "cat"),
    ("day_of_week", "DayOfWeek", "cat"),
    ("time_slot", "TimeSlot", "cat"),
    ("weekday", "Weekday", "cat"),
    ("location_id", "LocationID", "cat"),
    ("temperature", "Temperature", "num"),
    ("condition", "Weather", "cat"),
    ("visibility", "Visibility", "num"),
    ("wind_speed", "WindSpeed", "num"),
    ("humidity", "Humidity", "num"),
    ("fog", "Fog", "cat"),
)

_LEVEL_ORDER = {
    "month": MONTHS,
    "day_of_week": DAYS,
    "time_slot": tuple(range(1, 25)),
    "weekday": (True, False),
    "condition": CONDITIONS,
    "fog": (True, False),
}


@dataclass(frozen=True)
class Sample:
    """One (location, date, hour) cell. ``None`` marks a missing value."""
    location_id: int
    date: date
    time_slot: int
    month: str
    day_of_week: str
    weekday: bool
    temperature: float | None = None
    condition: str | None = None
    visibility: float | None = None
    wind_speed: float | None = None
    humidity: float | None = None
    fog: bool | None = None
    passengers: int = 0
    demand: str | None = None

    def has_missing(self):
        return any(getattr(self, a) is None for a in WEATHER_ATTRS)


def derive_temporal(pickup_at):
    """``(month, day_of_week, weekday, time_slot, date)`` for a pickup time.

    Slot t covers local hours [t-1, t).
    """
    dow = DAYS[(pickup_at.weekday() + 1) % 7]
    return (MONTHS[pickup_at.month - 1], dow, dow not in ("Sat", "Sun"),
            pickup_at.hour + 1, pickup_at.date())


def aggregate_samples(trips, cluster_model):
    """Sum passengers per (location, date, slot) cell that has trips.

    Output is sorted by date, slot, location; ``demand`` is left unset.
    """
    if not trips:
        return []
    ids = assign_locations([(t.origin_lat, t.origin_lon) for t in trips], cluster_model)
    totals = defaultdict(int)
    for trip, loc in zip(trips, ids):
        totals[(trip.pickup_at.date(), trip.pickup_at.hour + 1, int(loc))] += trip.passengers
    samples = []
    for (day, slot, loc), pax in sorted(totals.items()):
        month, dow, weekday, _, _ = derive_temporal(datetime(day.year, day.month, day.day))
        samples.append(Sample(loc, day, slot, month, dow, weekday, passengers=pax))
    return samples


@dataclass(frozen=True)
class BinThresholds:
    t_low: int
    t_high: int

    def to_dict(self):
        return {"t_low": self.t_low, "t_high": self.t_high}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["t_low"]), int(data["t_high"]))


def fit_bins(passenger_counts):
    """Tertile thresholds by the nearest-rank rule: ranks ceil(n/3), ceil(2n/3)."""
    counts = sorted(int(c) for c in passenger_counts)
    n = len(counts)
    if n == 0:
        raise ValueError("cannot fit demand bins on an empty list")
    return BinThresholds(counts[(n + 2) // 3 - 1], counts[(2 * n + 2) // 3 - 1])


def bin_demand(passengers, thresholds):
    if passengers <= thresholds.t_low:
        return "low"
    if passengers > thresholds.t_high:
        return "high"
    return "moderate"


def label_samples(samples, thresholds):
    return [replace(s, demand=bin_demand(s.passengers, thresholds)) for s in samples]


def join_weather(samples, weather):
    """Attach the weather observed at each sample's date and hour."""
    by_hour = {w.observed_at: w for w in weather}
    out = []
    for s in samples:
        w = by_hour.get(datetime(s.date.year, s.date.month, s.date.day) + timedelta(hours=s.time_slot - 1))
        if w is None:
            out.append(replace(s, **{a: None for a in WEATHER_ATTRS}))
        else:
            out.append(replace(s, **{a: getattr(w, a) for a in WEATHER_ATTRS}))
    return out


# -- cleaning ---------------------------------------------------------------

STRATEGIES = ("listwise", "median_mode", "regression")


def _mode(values, order):
    counts = Counter(values)
    best = max(counts.values())
    # ties resolved by canonical level order
    return next(v for v in order if counts.get(v, 0) == best)


@dataclass
class Imputer:
    """Missing-value policy fitted on training samples and reusable on test rows."""
    strategy: str
    medians: dict = field(default_factory=dict)
    modes: dict = field(default_factory=dict)
    # regression: target -> (predictor encoder, coefficients)
    models: dict = field(default_factory=dict)

    def transform(self, samples):
        if self.strategy == "listwise":
            kept = [s for s in samples if not s.has_missing()]
            if samples and not kept:
                raise EmptyDatasetError("listwise deletion removed every row")
            return kept
        out = []
        for s in samples:
            if not s.has_missing():
                out.append(s)
                continue
            patch = {}
            for attr in ("condition", "fog"):
                if getattr(s, attr) is None:
                    patch[attr] = self.modes[attr]
            for attr in CONTINUOUS:
                if getattr(s, attr) is None:
                    patch[attr] = self._predict(attr, s)
            out.append(replace(s, **patch))
        return out

    def _predict(self, attr, sample):
        if attr in self.models:
            encoder, coef = self.models[attr]
            try:
                row = encoder.transform_row(sample)
            except _MissingPredictor:
                return self.medians[attr]
            return float(np.dot(np.append(row, 1.0), coef))
        return self.medians[attr]


class _MissingPredictor(Exception):
    pass


def fit_imputer(samples, strategy="listwise"):
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    imp = Imputer(strategy)
    if strategy == "listwise":
        return imp
    complete = [s for s in samples if not s.has_missing()]
    if not complete:
        raise EmptyDatasetError(f"{strategy} imputation needs at least one fully observed sample")
    for attr in CONTINUOUS:
        observed = [getattr(s, attr) for s in samples if getattr(s, attr) is not None]
        imp.medians[attr] = float(np.median(observed))
    for attr in ("condition", "fog"):
        observed = [getattr(s, attr) for s in samples if getattr(s, attr) is not None]
        imp.modes[attr] = _mode(observed, _LEVEL_ORDER[attr])
    if strategy == "regression":
        full_cols = [f for f, _, _ in FEATURES
                     if all(getattr(s, f) is not None for s in samples)]
        for attr in CONTINUOUS:
            if attr in full_cols:
                continue
            predictors = [f for f in full_cols if f != attr]
            enc = fit_encoder(complete, features=predictors, scale=False)
            design = np.column_stack([enc.transform(complete).X, np.ones(len(complete))])
            target = np.array([getattr(s, attr) for s in complete])
            coef, *_ = np.linalg.lstsq(design, target, rcond=None)
            imp.models[attr] = (enc, coef)
    return imp


def clean(samples, strategy="listwise"):
    """Remove or fill missing weather fields; see :class:`Imputer`."""
    return fit_imputer(samples, strategy).transform(samples)


# -- encoding ---------------------------------------------------------------

@dataclass
class FeatureMatrix:
    X: np.ndarray
    y: np.ndarray | None
    columns: list
    groups: dict                    # feature name -> list of column indices

    @property
    def shape(self):
        return self.X.shape


@dataclass
class Encoder:
    """Column layout plus training-set statistics.

    ``levels`` maps each categorical feature to the training levels observed,
    in canonical order; ``stats`` maps each continuous feature to
    ``(mean, std)`` with the n-1 denominator. Columns with std 0 are centered
    but not divided.
    """
    features: list
    levels: dict
    stats: dict
    scale: bool = True
    columns: list = field(default_factory=list)
    groups: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.columns:
            self._layout()

    def _layout(self):
        prefix = {f: p for f, p, _ in FEATURES}
        self.columns, self.groups = [], {}
        for f in self.features:
            start = len(self.columns)
            if f in self.levels:
                self.columns += [f"{prefix[f]}_{_level_name(f, lv)}" for lv in self.levels[f]]
            else:
                self.columns.append(prefix[f])
            self.groups[f] = list(range(start, len(self.columns)))

    @property
    def n_columns(self):
        return len(self.columns)

    def transform_row(self, s):
        row = np.zeros(len(self.columns))
        for f in self.features:
            cols = self.groups[f]
            value = getattr(s, f)
            if value is None:
                raise _MissingPredictor(f)
            if f in self.levels:
                try:
                    row[cols[self.levels[f].index(value)]] = 1.0
                except ValueError:
                    pass                # unseen level: all-zero block
            else:
                mean, std = self.stats[f]
                x = float(value)
                if self.scale:
                    x -= mean
                    if std > 0:
                        x /= std
                row[cols[0]] = x
        return row

    def transform(self, samples):
        X = np.zeros((len(samples), len(self.columns)))
        for i, s in enumerate(samples):
            X[i] = self.transform_row(s)
        labels = None
        if samples and all(s.demand is not None for s in samples):
            labels = np.array([DEMAND_LEVELS.index(s.demand) for s in samples], dtype=np.int64)
        return FeatureMatrix(X, labels, list(self.columns),
                             {k: list(v) for k, v in self.groups.items()})

    def to_dict(self):
        return {"features": list(self.features),
                "levels": {f: [_jsonable(v) for v in lv] for f, lv in self.levels.items()},
                "stats": {f: list(v) for f, v in self.stats.items()},
                "scale": self.scale,
                "columns": list(self.columns)}

    @classmethod
    def from_dict(cls, data):
        levels = {}
        for f, lv in data["levels"].items():
            levels[f] = [_from_json_level(f, v) for v in lv]
        enc = cls(list(data["features"]), levels,
                  {f: tuple(v) for f, v in data["stats"].items()}, data.get("scale", True))
        if enc.columns != data.get("columns", enc.columns):
            raise ValueError("encoder column layout does not match its levels")
        return enc

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _level_name(feature, level):
    if feature in ("weekday", "fog"):
        return "Yes" if level else "No"
    return str(level)


def _jsonable(v):
    return v if isinstance(v, (bool, int, str)) else str(v)


def _from_json_level(feature, v):
    if feature in ("time_slot", "location_id"):
        return int(v)
    return v


def fit_encoder(samples, features=None, scale=True):
    """Learn level vocabularies and (mean, sample std) from training samples."""
    if not samples:
        raise EmptyDatasetError("cannot fit an encoder on zero samples")
    features = [f for f, _, _ in FEATURES] if features is None else list(features)
    levels, stats = {}, {}
    for f in features:
        values = [getattr(s, f) for s in samples]
        if any(v is None for v in values):
            raise ValueError(f"feature {f!r} has missing values; clean first")
        if f in CONTINUOUS:
            arr = np.asarray(values, dtype=float)
            std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
            stats[f] = (float(arr.mean()), std)
        else:
            seen = set(values)
            order = _LEVEL_ORDER.get(f) or sorted(seen)
            levels[f] = [lv for lv in order if lv in seen]
    return Encoder(features, levels, stats, scale)


def apply_encoder(encoder, samples):
    return encoder.transform(samples)


# -- prepared-dataset file --------------------------------------------------

PREPARED_FIELDS = [f.name for f in fields(Sample)] + ["split"]


def write_prepared(samples, path, splits=None):
    """Write samples (plus optional train/test tags) as delimited text."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREPARED_FIELDS)
        for i, s in enumerate(samples):
            row = []
            for name in PREPARED_FIELDS[:-1]:
                v = getattr(s, name)
                if v is None:
                    row.append("")
                elif isinstance(v, bool):
                    row.append("1" if v else "0")
                elif isinstance(v, (int, float)):
                    row.append(format_number(v))
                elif isinstance(v, date):
                    row.append(v.isoformat())
                else:
                    row.append(str(v))
            row.append("" if splits is None else splits[i])
            writer.writerow(row)


def read_prepared(path):
    """Inverse of :func:`write_prepared`; returns ``(samples, splits)``."""
    samples, splits = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for r in reader:
            def num(key):
                return None if r[key] == "" else float(r[key])

            def flag(key):
                return None if r[key] == "" else r[key] == "1"

            samples.append(Sample(
                location_id=int(r["location_id"]),
                date=date.fromisoformat(r["date"]),
                time_slot=int(r["time_slot"]),
                month=r["month"], day_of_week=r["day_of_week"],
                weekday=r["weekday"] == "1",
                temperature=num("temperature"),
                condition=r["condition"] or None,
                visibility=num("visibility"),
                wind_speed=num("wind_speed"),
                humidity=num("humidity"),
                fog=flag("fog"),
                passengers=int(r["passengers"]),
                demand=r["demand"] or None))
            splits.append(r.get("split", ""))
    return samples, splits


def column_summary(samples):
    """Per-column mean/std (continuous) or level shares (categorical)."""
    out = {}
    for attr in CONTINUOUS + ("passengers",):
        vals = [getattr(s, attr) for s in samples if getattr(s, attr) is not None]
        if vals:
            arr = np.asarray(vals, dtype=float)
            out[attr] = {"n": len(vals), "mean": round(float(arr.mean()), 6),
                         "std": round(float(arr.std(ddof=1)) if len(arr) > 1 else 0.0, 6)}
        else:
            out[attr] = {"n": 0}
    for attr in ("condition", "weekday", "fog", "location_id"):
        vals = [getattr(s, attr) for s in samples if getattr(s, attr) is not None]
        counts = Counter(vals)
        out[attr] = {_level_name(attr, k) if attr in ("weekday", "fog") else str(k):
                     round(v / len(vals), 6) for k, v in sorted(counts.items(), key=lambda kv: str(kv[0]))}
    return out
