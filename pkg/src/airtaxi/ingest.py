"""Trip and weather file parsing, validation and serialization.

Both files are comma-delimited with a header row. Trips that violate a
record invariant are rejected and tallied; weather rows are kept with the
offending field marked missing (``None``) unless the timestamp itself is
unusable or the hour was already seen.
"""
import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import FormatError

TRIP_FIELDS = ("pickup_at", "dropoff_at", "passengers",
               "origin_lat", "origin_lon", "dest_lat", "dest_lon")
WEATHER_FIELDS = ("observed_at", "temperature", "condition", "visibility",
                  "wind_speed", "humidity", "fog")
CONDITIONS = ("Normal", "Snow", "Rain", "Thunderstorm")

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"
_ACCEPTED_FORMATS = (TIMESTAMP_FORMAT, "%Y-%m-%d %H:%M")
_MISSING_TOKENS = {"", "na", "nan", "null", "none"}


@dataclass(frozen=True)
class TripRecord:
    pickup_at: datetime
    dropoff_at: datetime
    passengers: int
    origin_lat: float
    origin_lon: float
    dest_lat: float
    dest_lon: float


@dataclass(frozen=True)
class WeatherRecord:
    """One hourly observation; ``None`` marks a missing value."""
    observed_at: datetime
    temperature: float | None
    condition: str | None
    visibility: float | None
    wind_speed: float | None
    humidity: float | None
    fog: bool | None


@dataclass
class ValidationReport:
    total: int = 0
    accepted: int = 0
    rejected: int = 0
    reasons: Counter = field(default_factory=Counter)
    # retained weather rows with a field flagged missing, tallied per field
    missing: Counter = field(default_factory=Counter)

    def reject(self, reason):
        self.rejected += 1
        self.reasons[reason] += 1

    def to_dict(self):
        return {"total": self.total, "accepted": self.accepted,
                "rejected": self.rejected,
                "reasons": dict(sorted(self.reasons.items())),
                "missing": dict(sorted(self.missing.items()))}


def trip_violation(rec):
    """Name of the first invariant ``rec`` breaks, or None if it is valid."""
    if not rec.dropoff_at > rec.pickup_at:
        return "non-positive duration"
    if rec.passengers < 1:
        return "invalid passengers"
    for lat in (rec.origin_lat, rec.dest_lat):
        if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
            return "coordinate out of range"
    for lon in (rec.origin_lon, rec.dest_lon):
        if not (math.isfinite(lon) and -180.0 <= lon <= 180.0):
            return "coordinate out of range"
    return None


# -- low-level field parsing; each returns None for missing/unparsable -----

def _parse_time(text):
    text = text.strip()
    for fmt in _ACCEPTED_FORMATS:
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            pass
    return None


def _parse_float(text):
    text = text.strip()
    if text.lower() in _MISSING_TOKENS:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _parse_int(text):
    value = _parse_float(text)
    if value is None or value != int(value):
        return None
    return int(value)


def _parse_flag(text):
    text = text.strip().lower()
    if text in ("1", "yes", "true"):
        return True
    if text in ("0", "no", "false"):
        return False
    return None


def _open_text(source):
    if isinstance(source, (str, Path)):
        return open(source, newline="", encoding="utf-8")
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return source
    raise TypeError(f"cannot read delimited text from {type(source).__name__}")


def _read_rows(source, expected):
    handle = _open_text(source)
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise FormatError("empty file")
        header = [h.strip() for h in header]
        unknown = [h for h in header if h not in expected]
        if unknown:
            raise FormatError(f"unknown column(s): {', '.join(unknown)}")
        absent = [h for h in expected if h not in header]
        if absent:
            raise FormatError(f"missing column(s): {', '.join(absent)}")
        if len(set(header)) != len(header):
            raise FormatError("duplicate column in header")
        pos = [header.index(name) for name in expected]
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                yield None
                continue
            yield [row[i] for i in pos]
    finally:
        if handle is not source:
            handle.close()


def parse_trips(source):
    """Read a trips file; return ``(records, report)``.

    Rows with a missing or unparsable field, or violating a TripRecord
    invariant, are rejected and counted by reason.
    """
    report = ValidationReport()
    records = []
    for row in _read_rows(source, TRIP_FIELDS):
        report.total += 1
        if row is None:
            report.reject("wrong field count")
            continue
        pickup, dropoff = _parse_time(row[0]), _parse_time(row[1])
        passengers = _parse_int(row[2])
        coords = [_parse_float(c) for c in row[3:]]
        if pickup is None or dropoff is None:
            report.reject("invalid timestamp")
            continue
        if passengers is None or any(c is None for c in coords):
            report.reject("missing value")
            continue
        rec = TripRecord(pickup, dropoff, passengers, *coords)
        reason = trip_violation(rec)
        if reason:
            report.reject(reason)
            continue
        records.append(rec)
        report.accepted += 1
    return records, report


def parse_weather(source):
    """Read an hourly weather file; return ``(records, report)``.

    Negative visibility (the -9999 sentinel included), negative wind speed,
    humidity outside [0, 100] and unknown condition strings are kept as
    missing fields. Rows whose timestamp is unusable or not on the hour are
    rejected, as is any repeat of an hour already read.
    """
    report = ValidationReport()
    records = []
    seen = set()
    for row in _read_rows(source, WEATHER_FIELDS):
        report.total += 1
        if row is None:
            report.reject("wrong field count")
            continue
        observed = _parse_time(row[0])
        if observed is None:
            report.reject("invalid timestamp")
            continue
        if observed.minute != 0:
            report.reject("unaligned timestamp")
            continue
        if observed in seen:
            report.reject("duplicate hour")
            continue
        seen.add(observed)

        temperature = _parse_float(row[1])
        condition = row[2].strip()
        if condition not in CONDITIONS:
            condition = None
        visibility = _parse_float(row[3])
        if visibility is not None and visibility < 0:
            visibility = None
        wind = _parse_float(row[4])
        if wind is not None and wind < 0:
            wind = None
        humidity = _parse_float(row[5])
        if humidity is not None and not 0.0 <= humidity <= 100.0:
            humidity = None
        fog = _parse_flag(row[6])

        rec = WeatherRecord(observed, temperature, condition, visibility,
                            wind, humidity, fog)
        for name in WEATHER_FIELDS[1:]:
            if getattr(rec, name) is None:
                report.missing[name] += 1
        records.append(rec)
        report.accepted += 1
    return records, report


# -- serialization ----------------------------------------------------------

def format_number(value):
    """Canonical text for a number: shortest round-trip repr, ints bare."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _write_csv(dest, header, rows):
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            _write_csv(fh, header, rows)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def trip_row(rec):
    return [rec.pickup_at.strftime(TIMESTAMP_FORMAT),
            rec.dropoff_at.strftime(TIMESTAMP_FORMAT),
            str(rec.passengers),
            *(format_number(v) for v in (rec.origin_lat, rec.origin_lon,
                                         rec.dest_lat, rec.dest_lon))]


def weather_row(rec):
    return [rec.observed_at.strftime(TIMESTAMP_FORMAT),
            format_number(rec.temperature),
            rec.condition or "",
            format_number(rec.visibility),
            format_number(rec.wind_speed),
            format_number(rec.humidity),
            "" if rec.fog is None else ("1" if rec.fog else "0")]


def write_trips(records, dest):
    _write_csv(dest, TRIP_FIELDS, (trip_row(r) for r in records))


def write_weather(records, dest):
    _write_csv(dest, WEATHER_FIELDS, (weather_row(r) for r in records))
