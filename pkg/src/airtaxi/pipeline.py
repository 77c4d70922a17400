"""Experiment stages. Each reads and writes only files under ``cfg.output``.

    generate   -> data/{trips,weather}.csv, data/manifest.json
    prepare    -> prepared/K{K}/{dataset.csv, clusters.json, bins.json, encoder.json, log.json}
    train      -> models/K{K}/{<learner>.json, grid_<learner>.json, timing.json}
    evaluate   -> reports/{metrics,timing}.{csv,json}
    importance -> reports/importance_K{K}_<learner>.{csv,json}, reports/top_features.{csv,json}
    report     -> reports/summary.md, reports/hist_{day_of_week,month}.csv
"""
import csv
import json
import logging
from collections import defaultdict
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from ._seeding import derive_seed
from .errors import SpecError
from .evaluation import (build_grid, confusion, grid_search, metrics, split_indices,
                         time_training, GridResult)
from .features import (DAYS, DEMAND_LEVELS, MONTHS, BinThresholds, Encoder, aggregate_samples,
                       column_summary, derive_temporal, fit_bins, fit_encoder, fit_imputer,
                       join_weather, label_samples, read_prepared, write_prepared)
from .geo_cluster import ClusterModel, kmeans_fit
from .importance import permutation_importance, top_features
from .ingest import parse_trips, parse_weather
from .learners import load_model, make_learner
from .synthetic import generate_synthetic, write_synthetic

log = logging.getLogger("airtaxi")

TIMING_FILES = ("timing.json", "timing.csv")


def _dump(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _load(path):
    return json.loads(Path(path).read_text())


def _require(path, hint):
    if not Path(path).exists():
        raise FileNotFoundError(f"{path} not found; run `airtaxi {hint}` first")
    return path


# -- generate ---------------------------------------------------------------

def run_generate(cfg):
    spec = cfg.synthetic_spec()
    data = generate_synthetic(spec, derive_seed(cfg.seed, "generate"))
    data.manifest["master_seed"] = cfg.seed
    paths = write_synthetic(data, cfg.data_dir)
    log.info("generated %d trips, %d weather hours", len(data.trips), len(data.weather))
    return paths


# -- prepare ----------------------------------------------------------------

def run_prepare(cfg):
    trips_path = _require(cfg.trips_path, "generate")
    weather_path = _require(cfg.weather_path, "generate")
    trips, trip_report = parse_trips(trips_path)
    weather, weather_report = parse_weather(weather_path)
    if not trips:
        raise ValueError("no valid trips to prepare")
    points = np.array([(t.origin_lat, t.origin_lon) for t in trips])
    written = []
    for K in cfg.k_values:
        out = cfg.prepared_dir(K)
        out.mkdir(parents=True, exist_ok=True)
        model = kmeans_fit(points, K, seed=derive_seed(cfg.seed, "kmeans", K), **cfg.kmeans)
        model.save(out / "clusters.json")

        samples = join_weather(aggregate_samples(trips, model), weather)
        tr_idx, te_idx = split_indices(len(samples), cfg.split_ratio, derive_seed(cfg.seed, "split", K))
        split_of = np.empty(len(samples), dtype=object)
        split_of[tr_idx] = "train"
        split_of[te_idx] = "test"

        imputer = fit_imputer([samples[i] for i in tr_idx], cfg.imputation)
        kept, kept_split, removed = [], [], []
        for s, tag in zip(samples, split_of):
            cleaned = imputer.transform([s]) if (cfg.imputation != "listwise" or not s.has_missing()) else []
            if cleaned:
                kept.append(cleaned[0])
                kept_split.append(tag)
            else:
                removed.append(s)
        train = [s for s, tag in zip(kept, kept_split) if tag == "train"]
        if not train:
            raise ValueError(f"K={K}: cleaning left no training rows")
        bins = fit_bins([s.passengers for s in train])
        kept = label_samples(kept, bins)
        encoder = fit_encoder([s for s, tag in zip(kept, kept_split) if tag == "train"])

        write_prepared(kept, out / "dataset.csv", kept_split)
        _dump(bins.to_dict(), out / "bins.json")
        encoder.save(out / "encoder.json")
        prep_log = {
            "K": K,
            "imputation": cfg.imputation,
            "trips": trip_report.to_dict(),
            "weather": weather_report.to_dict(),
            "kmeans": {"iterations": model.iterations_run, "wcss": model.wcss},
            "samples_before_cleaning": len(samples),
            "samples_after_cleaning": len(kept),
            "samples_removed": len(removed),
            "train_rows": len(train),
            "test_rows": len(kept) - len(train),
            "n_columns": encoder.n_columns,
            "bins": bins.to_dict(),
            "class_counts": {lv: sum(s.demand == lv for s in kept) for lv in DEMAND_LEVELS},
        }
        if removed:
            prep_log["retained_vs_removed"] = {"retained": column_summary(kept),
                                               "removed": column_summary(removed)}
        _dump(prep_log, out / "log.json")
        log.info("K=%d: %d samples (%d removed), %d columns", K, len(kept), len(removed),
                 encoder.n_columns)
        written.append(out / "dataset.csv")
    return written


def load_prepared(cfg, K):
    out = cfg.prepared_dir(K)
    samples, splits = read_prepared(_require(out / "dataset.csv", "prepare"))
    encoder = Encoder.load(out / "encoder.json")
    train = [s for s, t in zip(samples, splits) if t == "train"]
    test = [s for s, t in zip(samples, splits) if t == "test"]
    return train, test, encoder


# -- train ------------------------------------------------------------------

_SEEDED = {"ann", "rf", "gb"}


def run_train(cfg):
    written = []
    with threadpool_limits(1):
        for K in cfg.k_values:
            train, _, encoder = load_prepared(cfg, K)
            A = encoder.transform(train)
            out = cfg.model_dir(K)
            out.mkdir(parents=True, exist_ok=True)
            timing = {}
            for name in cfg.learners:
                fixed = dict(cfg.learner_params.get(name, {}))
                grid = [{**fixed, **cell}
                        for cell in build_grid(name, cfg.grids.get(name), A.X.shape[1])]
                result = grid_search(name, grid, train, cfg.cv_folds,
                                     derive_seed(cfg.seed, "cv", K, name), cfg.jobs, cfg.stratified)
                grid_doc = result.to_dict()
                if not grid:
                    grid_doc["note"] = "no tunable parameters; search skipped"
                _dump(grid_doc, out / f"grid_{name}.json")
                params = {**fixed, **result.best_params}
                if name in _SEEDED:
                    params["seed"] = derive_seed(cfg.seed, "final", K, name)
                model = make_learner(name, **params)
                timing[name] = time_training(model, A.X, A.y)
                model.save(out / f"{name}.json")
                written.append(out / f"{name}.json")
                log.info("K=%d %s: best %s, fit %.2fs", K, name, result.best_params, timing[name])
            _dump({k: round(v, 6) for k, v in timing.items()}, out / "timing.json")
    return written


# -- evaluate ---------------------------------------------------------------

def run_evaluate(cfg):
    rows, timing_rows, doc = [], [], []
    with threadpool_limits(1):
        for K in cfg.k_values:
            train, test, encoder = load_prepared(cfg, K)
            B = encoder.transform(test)
            majority = int(np.argmax(np.bincount(encoder.transform(train).y, minlength=3)))
            report = metrics(confusion(B.y, np.full(len(B.y), majority)), learner="majority", K=K)
            entries = [("test", report)]
            mdir = cfg.model_dir(K)
            timing = _load(mdir / "timing.json") if (mdir / "timing.json").exists() else {}
            for name in cfg.learners:
                model = load_model(_require(mdir / f"{name}.json", "train"))
                cm = confusion(B.y, model.predict(B.X))
                entries.append(("test", metrics(cm, timing.get(name), name, K)))
                grid_path = mdir / f"grid_{name}.json"
                if grid_path.exists():
                    gr = GridResult.from_dict(_load(grid_path))
                    if gr.best_confusion is not None:
                        entries.append(("cv", metrics(gr.best_confusion, None, name, K)))
                if name in timing:
                    timing_rows.append((K, name, timing[name]))
            for split, rep in entries:
                for demand, p, r, f in rep.rows():
                    rows.append((K, demand, rep.learner, split, p, r, f))
                doc.append({"K": K, "learner": rep.learner, "eval_set": split,
                            "classes": {d: {"precision": p, "recall": r, "f1": f}
                                        for d, p, r, f in rep.rows()}})
    out = cfg.report_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "demand", "learner", "eval_set", "precision", "recall", "f1"])
        for K, demand, learner, split, p, r, f in rows:
            w.writerow([K, demand, learner, split, f"{p:.4f}", f"{r:.4f}", f"{f:.4f}"])
    _dump(doc, out / "metrics.json")
    with open(out / "timing.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "learner", "seconds"])
        for K, name, sec in timing_rows:
            w.writerow([K, name, f"{sec:.2f}"])
    _dump([{"K": K, "learner": n, "seconds": s} for K, n, s in timing_rows], out / "timing.json")
    return out / "metrics.csv"


# -- importance -------------------------------------------------------------

def _best_learner(cfg, K):
    path = cfg.report_dir / "metrics.json"
    if path.exists():
        scored = [(e["classes"]["Average"]["f1"], e["learner"]) for e in _load(path)
                  if e["K"] == K and e["eval_set"] == "test" and e["learner"] in cfg.learners]
    else:
        scored = []
        for name in cfg.learners:
            gp = cfg.model_dir(K) / f"grid_{name}.json"
            if gp.exists():
                gr = GridResult.from_dict(_load(gp))
                if gr.best_index is not None:
                    scored.append((gr.scores[gr.best_index], name))
    if not scored:
        raise FileNotFoundError("no metrics or grid results; run `airtaxi evaluate` first")
    best = max(s for s, _ in scored)
    return next(n for s, n in scored if s == best)


def run_importance(cfg):
    settings = cfg.importance
    top_rows, doc = [], []
    with threadpool_limits(1):
        for K in cfg.k_values:
            _, test, encoder = load_prepared(cfg, K)
            B = encoder.transform(test)
            names = settings.get("learners") or [_best_learner(cfg, K)]
            for name in names:
                model = load_model(_require(cfg.model_dir(K) / f"{name}.json", "train"))
                table = permutation_importance(model, B.X, B.y, B.groups, settings.get("repeats", 10),
                                               derive_seed(cfg.seed, "importance", K, name))
                stem = cfg.report_dir / f"importance_K{K}_{name}"
                stem.parent.mkdir(parents=True, exist_ok=True)
                table.write_csv(stem.with_suffix(".csv"))
                _dump(table.to_dict(), stem.with_suffix(".json"))
                top = top_features(table, settings.get("top", 5))
                top_rows.append((K, name, [f for f, _ in top]))
                doc.append({"K": K, "learner": name,
                            "top": [{"feature": f, "importance": v} for f, v in top]})
    n = max((len(t) for _, _, t in top_rows), default=0)
    with open(cfg.report_dir / "top_features.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "learner"] + [f"#{i + 1}" for i in range(n)])
        for K, name, feats in top_rows:
            w.writerow([K, name] + feats)
    _dump(doc, cfg.report_dir / "top_features.json")
    return cfg.report_dir / "top_features.csv"


# -- report -----------------------------------------------------------------

def demand_histograms(trips):
    """Passenger totals and per-date averages by day of week and by month."""
    by_dow, by_month = defaultdict(int), defaultdict(int)
    dates_dow, dates_month = defaultdict(set), defaultdict(set)
    for t in trips:
        month, dow, _, _, day = derive_temporal(t.pickup_at)
        by_dow[dow] += t.passengers
        by_month[month] += t.passengers
        dates_dow[dow].add(day)
        dates_month[month].add(day)

    def table(levels, totals, dates):
        return [(lv, totals.get(lv, 0), len(dates.get(lv, ())),
                 totals.get(lv, 0) / len(dates[lv]) if dates.get(lv) else 0.0) for lv in levels]

    return table(DAYS, by_dow, dates_dow), table(MONTHS, by_month, dates_month)


def _write_hist(path, key, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([key, "passengers", "n_dates", "mean_per_date"])
        for lv, total, n, mean in rows:
            w.writerow([lv, total, n, f"{mean:.4f}"])


def _md_table(header, rows):
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines)


def run_report(cfg):
    out = cfg.report_dir
    out.mkdir(parents=True, exist_ok=True)
    md = ["# Air-taxi demand experiment summary", "",
          f"- master seed: {cfg.seed}", f"- K values: {list(cfg.k_values)}",
          f"- learners: {list(cfg.learners)}", f"- imputation: {cfg.imputation}",
          f"- split: {cfg.split_ratio:.2f} train, {cfg.cv_folds}-fold CV", ""]
    gaps = []

    md.append("## Demand by day of week and month")
    if Path(cfg.trips_path).exists():
        trips, _ = parse_trips(cfg.trips_path)
        dow, month = demand_histograms(trips)
        _write_hist(out / "hist_day_of_week.csv", "day_of_week", dow)
        _write_hist(out / "hist_month.csv", "month", month)
        md.append(_md_table(["day", "passengers", "dates", "mean/date"],
                            [(d, t, n, f"{m:.1f}") for d, t, n, m in dow]))
        md.append("")
        md.append(_md_table(["month", "passengers", "dates", "mean/date"],
                            [(d, t, n, f"{m:.1f}") for d, t, n, m in month if n]))
    else:
        gaps.append("trips file missing: histograms skipped")
    md.append("")

    md.append("## Prepared datasets")
    prep_rows = []
    for K in cfg.k_values:
        p = cfg.prepared_dir(K) / "log.json"
        if p.exists():
            lg = _load(p)
            prep_rows.append((K, lg["samples_before_cleaning"], lg["samples_removed"],
                              lg["train_rows"], lg["test_rows"], lg["n_columns"],
                              f"{lg['bins']['t_low']}/{lg['bins']['t_high']}"))
        else:
            gaps.append(f"K={K}: not prepared")
    if prep_rows:
        md.append(_md_table(["K", "samples", "removed", "train", "test", "columns", "bins low/high"],
                            prep_rows))
    md.append("")

    md.append("## Selected hyperparameters (mean CV macro-F1)")
    grid_rows = []
    for K in cfg.k_values:
        for name in cfg.learners:
            gp = cfg.model_dir(K) / f"grid_{name}.json"
            if gp.exists():
                gr = GridResult.from_dict(_load(gp))
                score = "" if gr.best_index is None else f"{gr.scores[gr.best_index]:.4f}"
                grid_rows.append((K, name, len(gr.cells), json.dumps(gr.best_params, sort_keys=True), score))
            else:
                gaps.append(f"K={K} {name}: not trained")
    if grid_rows:
        md.append(_md_table(["K", "learner", "cells", "best", "CV macro-F1"], grid_rows))
    md.append("")

    md.append("## Test-set performance")
    mp_ = out / "metrics.json"
    if mp_.exists():
        rows = []
        for e in _load(mp_):
            if e["eval_set"] != "test":
                continue
            for demand in DEMAND_LEVELS + ("Average",):
                v = e["classes"][demand]
                rows.append((e["K"], e["learner"], demand, f"{v['precision']:.4f}",
                             f"{v['recall']:.4f}", f"{v['f1']:.4f}"))
        md.append(_md_table(["K", "learner", "demand", "precision", "recall", "F1"], rows))
        md.append("")
        md.append("Wall-clock training times are in `timing.csv`.")
    else:
        gaps.append("metrics missing: run `airtaxi evaluate`")
    md.append("")

    md.append("## Top features (permutation importance)")
    tp = out / "top_features.json"
    if tp.exists():
        rows = [(e["K"], e["learner"], ", ".join(t["feature"] for t in e["top"])) for e in _load(tp)]
        md.append(_md_table(["K", "learner", "top features"], rows))
    else:
        gaps.append("importance missing: run `airtaxi importance`")
    md.append("")

    if gaps:
        md.append("## Gaps")
        md += [f"- {g}" for g in gaps]
        md.append("")
    (out / "summary.md").write_text("\n".join(md))
    return out / "summary.md", gaps


STAGES = {
    "generate": run_generate,
    "prepare": run_prepare,
    "train": run_train,
    "evaluate": run_evaluate,
    "importance": run_importance,
    "report": run_report,
}


def run_all(cfg, stages=("generate", "prepare", "train", "evaluate", "importance", "report")):
    for stage in stages:
        if stage not in STAGES:
            raise SpecError(f"unknown stage {stage!r}")
        STAGES[stage](cfg)
