"""Run configuration: a YAML mapping with the keys of :class:`RunConfig`.

Example::

    output: runs/demo
    seed: 2021
    k_values: [5, 10, 15, 20]
    imputation: listwise          # or median_mode, regression
    split_ratio: 0.7
    cv_folds: 10
    learners: [lr, ann, rf, gb]
    grids:                        # omitted learners use the built-in grids
      rf: {n_trees: [100, 300], mtry: [sqrt, N/2, N/3, N/4]}
      gb: {n_trees: [100, 300]}
      ann: {hidden: "1:N:5", rate: [0.01, 0.05, 0.1]}
    learner_params:               # fixed (non-searched) hyperparameters
      ann: {epochs: 500}
      gb: {shrinkage: 0.1, subsample: 0.5, max_depth: 3}
    importance: {repeats: 10, top: 5, learners: null}
    synthetic: {n_trips: 50000, start: 2015-05-04, end: 2015-05-24}
"""
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .errors import SpecError
from .features import STRATEGIES
from .learners import LEARNERS
from .synthetic import SyntheticSpec

DEFAULT_LEARNERS = ("lr", "ann", "rf", "gb")


@dataclass
class RunConfig:
    output: Path = Path("runs/default")
    trips: Path | None = None
    weather: Path | None = None
    seed: int = 2021
    k_values: tuple = (5, 10, 15, 20)
    imputation: str = "listwise"
    split_ratio: float = 0.70
    cv_folds: int = 10
    stratified: bool = False
    learners: tuple = DEFAULT_LEARNERS
    grids: dict = field(default_factory=dict)
    learner_params: dict = field(default_factory=dict)
    kmeans: dict = field(default_factory=lambda: {"max_iter": 100, "tol": 1e-8, "n_init": 20})
    importance: dict = field(default_factory=lambda: {"repeats": 10, "top": 5, "learners": None})
    synthetic: dict = field(default_factory=dict)
    jobs: int = 1

    @property
    def data_dir(self):
        return self.output / "data"

    @property
    def trips_path(self):
        return self.trips if self.trips is not None else self.data_dir / "trips.csv"

    @property
    def weather_path(self):
        return self.weather if self.weather is not None else self.data_dir / "weather.csv"

    def prepared_dir(self, K):
        return self.output / "prepared" / f"K{K}"

    def model_dir(self, K):
        return self.output / "models" / f"K{K}"

    @property
    def report_dir(self):
        return self.output / "reports"

    def synthetic_spec(self):
        return SyntheticSpec.from_dict(self.synthetic)

    def validate(self):
        if not self.k_values or any(int(k) < 1 for k in self.k_values):
            raise SpecError("k_values must be a non-empty list of integers >= 1")
        if not 0.0 < self.split_ratio < 1.0:
            raise SpecError("split_ratio must lie strictly between 0 and 1")
        if self.cv_folds < 2:
            raise SpecError("cv_folds must be >= 2")
        if self.imputation not in STRATEGIES:
            raise SpecError(f"imputation must be one of {STRATEGIES}")
        unknown = [name for name in self.learners if name not in LEARNERS]
        if unknown:
            raise SpecError(f"unknown learner(s): {unknown}")
        if self.jobs < 1:
            raise SpecError("jobs must be >= 1")
        repeats = self.importance.get("repeats", 10)
        if not isinstance(repeats, int) or repeats < 1:
            raise SpecError("importance.repeats must be a positive integer")
        return self


def load_config(path=None, **overrides):
    """Read a YAML config (or start from defaults) and apply non-None overrides."""
    raw = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise SpecError(f"config file not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as exc:
            raise SpecError(f"config is not valid YAML: {exc}".replace("\n", " ")) from exc
        if not isinstance(raw, dict):
            raise SpecError("config must be a mapping")
    known = {f.name for f in fields(RunConfig)}
    bad = sorted(set(raw) - known)
    if bad:
        raise SpecError(f"unknown config key(s): {', '.join(bad)}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        for key in ("output", "trips", "weather"):
            if raw.get(key) is not None:
                raw[key] = Path(raw[key])
        for key in ("k_values", "learners"):
            if key in raw:
                raw[key] = tuple(raw[key])
        if "k_values" in raw:
            raw["k_values"] = tuple(int(k) for k in raw["k_values"])
        defaults = RunConfig()
        for key in ("kmeans", "importance"):
            if key in raw:
                raw[key] = {**getattr(defaults, key), **(raw[key] or {})}
        cfg = RunConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad config: {exc}") from exc
    return cfg.validate()
