"""Synthetic trip and weather data with planted demand drivers.

Stand-in for the proprietary trip estimates. Trips are spread over
(hour, hotspot) cells with weights

    intensity[hotspot] * weekday_multiplier[if weekday] * hour_profile[hour]
        * rain_suppression[if precipitating]

where weekends may use a flat hour profile (``weekend_flat``), so the
evening peak is a weekday-only commute effect. The daily total on a weekday
is still exactly ``weekday_multiplier`` times a weekend day before rain.
"""
import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path

import numpy as np

from .errors import SpecError
from .ingest import CONDITIONS, TripRecord, WeatherRecord, write_trips, write_weather

# Evening-peak profile: quiet nights, morning shoulder, 4-6 PM peak, late spike.
EVENING_PEAK = (0.15, 0.1, 0.08, 0.08, 0.1, 0.2, 0.45, 0.8, 1.0, 0.85, 0.7, 0.7,
                0.75, 0.7, 0.75, 0.95, 2.6, 3.0, 2.6, 1.3, 0.9, 1.1, 1.0, 0.5)


@dataclass(frozen=True)
class Hotspot:
    lat: float
    lon: float
    spread: float       # std-dev of the bell-shaped scatter, degrees
    intensity: float    # relative share of trips


DEFAULT_HOTSPOTS = (
    Hotspot(40.6413, -73.7781, 0.006, 3.0),   # airport-like hub
    Hotspot(40.7580, -73.9855, 0.006, 1.6),
    Hotspot(40.6872, -73.9418, 0.006, 1.0),
    Hotspot(40.8448, -73.8648, 0.006, 0.6),
    Hotspot(40.5795, -74.1502, 0.006, 0.35),
)


@dataclass(frozen=True)
class SyntheticSpec:
    n_trips: int = 50_000
    start: date = date(2015, 5, 4)
    end: date = date(2015, 5, 24)             # inclusive
    hotspots: tuple = DEFAULT_HOTSPOTS
    weekday_multiplier: float = 2.0
    hour_profile: tuple = EVENING_PEAK
    weekend_flat: bool = True
    rain_suppression: float = 0.5             # demand factor in Rain/Thunderstorm hours
    rain_chance: float = 0.12                 # stationary share of wet hours
    missing_rate: float = 0.0

    def validate(self):
        if self.end < self.start:
            raise SpecError("empty date range")
        if not self.hotspots:
            raise SpecError("at least one hotspot is required")
        if self.n_trips < 0:
            raise SpecError("n_trips must be non-negative")
        if len(self.hour_profile) != 24 or min(self.hour_profile) < 0:
            raise SpecError("hour_profile needs 24 non-negative weights")
        if sum(self.hour_profile) <= 0:
            raise SpecError("hour_profile is all zero")
        if any(h.intensity < 0 or h.spread < 0 for h in self.hotspots):
            raise SpecError("hotspot intensity and spread must be non-negative")
        if sum(h.intensity for h in self.hotspots) <= 0:
            raise SpecError("hotspot intensities are all zero")
        if self.weekday_multiplier <= 0 or self.rain_suppression < 0:
            raise SpecError("multipliers must be positive")
        if not 0.0 <= self.missing_rate <= 1.0:
            raise SpecError("missing_rate must lie in [0, 1]")
        if not 0.0 <= self.rain_chance < 1.0:
            raise SpecError("rain_chance must lie in [0, 1)")

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        try:
            for key in ("start", "end"):
                if key in data and not isinstance(data[key], date):
                    data[key] = date.fromisoformat(str(data[key]))
            if "hotspots" in data:
                data["hotspots"] = tuple(
                    h if isinstance(h, Hotspot) else Hotspot(**h) for h in data["hotspots"])
            if "hour_profile" in data:
                data["hour_profile"] = tuple(float(v) for v in data["hour_profile"])
            spec = cls(**data)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad synthetic spec: {exc}") from exc
        spec.validate()
        return spec

    def to_dict(self):
        out = asdict(self)
        out["start"] = self.start.isoformat()
        out["end"] = self.end.isoformat()
        out["hotspots"] = [asdict(h) for h in self.hotspots]
        out["hour_profile"] = list(self.hour_profile)
        return out


@dataclass
class SyntheticData:
    trips: list
    weather: list
    manifest: dict = field(default_factory=dict)


def _weather_series(spec, hours, rng):
    """Hourly weather: Markov wet/dry spells, diurnal temperature, fog at dawn."""
    n = len(hours)
    # two-state chain with mean wet-spell length of 4 hours
    p_end = 0.25
    p_start = p_end * spec.rain_chance / (1.0 - spec.rain_chance)
    wet = np.zeros(n, dtype=bool)
    state = rng.random() < spec.rain_chance
    u = rng.random(n)
    for i in range(n):
        wet[i] = state
        state = (u[i] >= p_end) if state else (u[i] < p_start)

    doy = np.array([h.timetuple().tm_yday for h in hours])
    hod = np.array([h.hour for h in hours])
    seasonal = 12.0 - 12.0 * np.cos(2 * np.pi * (doy - 15) / 365.25)
    diurnal = 4.0 * np.sin(2 * np.pi * (hod - 9) / 24.0)
    noise = np.cumsum(rng.normal(0.0, 0.3, n))
    noise -= np.linspace(0.0, noise[-1], n)            # keep the walk bounded
    temperature = np.round(seasonal + diurnal + noise, 1)

    storm = rng.random(n) < 0.2
    condition = np.where(~wet, "Normal",
                         np.where(temperature < 0.5, "Snow",
                                  np.where(storm, "Thunderstorm", "Rain")))
    humidity = np.clip(np.round(55 + 30 * wet + rng.normal(0, 8, n), 0), 5, 100)
    fog = (hod >= 3) & (hod <= 8) & (rng.random(n) < np.where(wet, 0.35, 0.08))
    visibility = np.round(np.clip(10.0 - 5.0 * wet - 6.0 * fog + rng.normal(0, 0.6, n),
                                  0.2, 10.0), 1)
    wind = np.round(np.abs(rng.normal(9 + 6 * wet, 4, n)), 1)
    return temperature, condition, visibility, wind, humidity, fog


def generate_synthetic(spec, seed):
    """Draw trips and hourly weather for ``spec``; deterministic in ``(spec, seed)``.

    With ``missing_rate > 0`` some trip rows are corrupted (non-positive
    duration, zero passengers, sentinel coordinates) and some weather rows
    carry the -9999 visibility sentinel; ``parse_*`` must catch them.
    """
    spec.validate()
    rng = np.random.default_rng(seed)
    n_days = (spec.end - spec.start).days + 1
    t0 = datetime.combine(spec.start, datetime.min.time())
    hours = [t0 + timedelta(hours=i) for i in range(24 * n_days)]

    temperature, condition, visibility, wind, humidity, fog = _weather_series(spec, hours, rng)

    profile = np.asarray(spec.hour_profile, dtype=float)
    flat = np.full(24, profile.mean())
    is_weekday = np.array([h.weekday() < 5 for h in hours])
    hod = np.array([h.hour for h in hours])
    hour_w = np.where(is_weekday, spec.weekday_multiplier * profile[hod],
                      (flat if spec.weekend_flat else profile)[hod])
    precip = np.isin(condition, ("Rain", "Thunderstorm"))
    hour_w = hour_w * np.where(precip, spec.rain_suppression, 1.0)

    intensity = np.array([h.intensity for h in spec.hotspots], dtype=float)
    cell_w = np.outer(hour_w, intensity).ravel()
    counts = rng.multinomial(spec.n_trips, cell_w / cell_w.sum())

    cell = np.repeat(np.arange(cell_w.size), counts)
    hour_idx, spot = np.divmod(cell, len(spec.hotspots))
    n = cell.size
    centers = np.array([(h.lat, h.lon) for h in spec.hotspots])
    spreads = np.array([h.spread for h in spec.hotspots])
    origin = centers[spot] + rng.normal(size=(n, 2)) * spreads[spot, None]
    dest_spot = rng.integers(0, len(spec.hotspots), n)
    dest = centers[dest_spot] + rng.normal(size=(n, 2)) * 0.02
    minute = rng.integers(0, 60, n)
    duration = rng.integers(5, 46, n)
    passengers = rng.choice([1, 2, 3, 4], size=n, p=[0.6, 0.25, 0.1, 0.05])
    origin = np.round(origin, 6)
    dest = np.round(dest, 6)

    corrupt = rng.random(n) < spec.missing_rate
    kind = rng.integers(0, 3, n)

    trips = []
    for i in range(n):
        pickup = hours[hour_idx[i]] + timedelta(minutes=int(minute[i]))
        dropoff = pickup + timedelta(minutes=int(duration[i]))
        pax = int(passengers[i])
        olat = float(origin[i, 0])
        if corrupt[i]:
            if kind[i] == 0:
                dropoff = pickup - timedelta(minutes=int(duration[i]))
            elif kind[i] == 1:
                pax = 0
            else:
                olat = -9999.0
        trips.append(TripRecord(pickup, dropoff, pax, olat, float(origin[i, 1]),
                                float(dest[i, 0]), float(dest[i, 1])))
    trips.sort(key=lambda r: r.pickup_at)

    vis_missing = rng.random(len(hours)) < spec.missing_rate
    weather = []
    for i, h in enumerate(hours):
        weather.append(WeatherRecord(
            h, float(temperature[i]), str(condition[i]),
            -9999.0 if vis_missing[i] else float(visibility[i]),
            float(wind[i]), float(humidity[i]), bool(fog[i])))

    manifest = {
        "seed": int(seed),
        "spec": spec.to_dict(),
        "hotspot_centers": [[h.lat, h.lon] for h in spec.hotspots],
        "hotspot_intensity": [h.intensity for h in spec.hotspots],
        "dominant_hotspot": int(np.argmax(intensity)),
        "planted_drivers": ["location_id", "weekday", "time_slot", "condition"],
        "multipliers": {
            "weekday": spec.weekday_multiplier,
            "rain_suppression": spec.rain_suppression,
            "weekend_flat_profile": spec.weekend_flat,
        },
        "conditions": list(CONDITIONS),
        "n_trips": int(n),
        "n_corrupted_trips": int(corrupt.sum()),
        "n_missing_visibility": int(vis_missing.sum()),
    }
    return SyntheticData(trips, weather, manifest)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_synthetic(data, out_dir):
    """Write ``trips.csv``, ``weather.csv`` and ``manifest.json`` to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trips_path, weather_path = out / "trips.csv", out / "weather.csv"
    write_trips(data.trips, trips_path)
    write_weather(data.weather, weather_path)
    manifest = dict(data.manifest)
    manifest["files"] = {"trips.csv": _sha256(trips_path),
                         "weather.csv": _sha256(weather_path)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return trips_path, weather_path, out / "manifest.json"
