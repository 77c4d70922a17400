"""Acceptance suite: one PASS/FAIL line per criterion.

Under pytest the lines are collected into the terminal summary (see
``conftest.py``); ``python tests/test_acceptance.py`` prints them directly.
Criteria 6 and 8 share one full pipeline run on the 50k-trip synthetic set.
"""
import filecmp
import json
import os
import sys
import time
from pathlib import Path

import numpy as np
import pytest
import yaml

sys.path.insert(0, str(Path(__file__).parent))

from airtaxi.cli import main as cli_main
from airtaxi.evaluation import MetricsReport, metrics
from airtaxi.geo_cluster import kmeans_fit
from airtaxi.learners import (DecisionTree, GradientBoosting, RandomForest, ann_loss_grad,
                              best_split, lr_loss_grad)
from airtaxi.learners.base import one_hot
from airtaxi.pipeline import TIMING_FILES
from oracles import (best_two_partition, brute_force_split, central_difference, confusion_with,
                     relative_error)
from table2 import ROWS

RESULTS = {}


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS[n] = line
    print(line, flush=True)
    return ok


# -- 1. metric arithmetic against the printed table ---------------------------

def check_1():
    worst_f1 = worst_avg = 0.0
    n_pairs = n_avg = 0
    blocks = {}
    for K, demand, values in ROWS:
        blocks.setdefault(K, {})[demand] = values
        if demand == "Average":
            continue
        for j in range(4):
            p, r, f1 = values[3 * j:3 * j + 3]
            worst_f1 = max(worst_f1, abs(metrics(confusion_with(p, r)).f1[0] - f1))
            n_pairs += 1
    for rows in blocks.values():
        for j in range(4):
            cls = np.array([rows[d][3 * j:3 * j + 3] for d in ("Low", "Medium", "High")])
            rep = MetricsReport(cls[:, 0], cls[:, 1], cls[:, 2])
            got = (rep.macro_precision, rep.macro_recall, rep.macro_f1)
            worst_avg = max(worst_avg, *(abs(a - b) for a, b in zip(got, rows["Average"][3 * j:3 * j + 3])))
            n_avg += 1
    example = metrics(confusion_with(0.8999, 0.7215)).f1[0]
    gb5 = MetricsReport(np.zeros(3), np.zeros(3), np.array([0.8009, 0.4715, 0.6949])).macro_f1
    ok = (n_pairs == 48 and n_avg == 16 and worst_f1 < 5e-4 and worst_avg < 5e-4
          and abs(example - 0.8009) < 5e-4 and abs(gb5 - 0.6558) < 5e-4)
    return ok, (f"{n_pairs} F1 values max err {worst_f1:.2e}, {n_avg} Average rows max err "
                f"{worst_avg:.2e}; (0.8999, 0.7215) -> {example:.4f}; GB K=5 average {gb5:.4f}")


# -- 2. gradient oracles ----------------------------------------------------

def check_2():
    rng = np.random.default_rng(20210)
    lr_err = ann_err = 0.0
    for _ in range(20):
        m, n = rng.integers(3, 9), rng.integers(2, 6)
        X, Y = rng.normal(size=(m, n)), one_hot(rng.integers(0, 3, m))
        W = rng.normal(size=(n + 1, 3))
        _, g = lr_loss_grad(W, X, Y)
        lr_err = max(lr_err, relative_error(g, central_difference(lambda: lr_loss_grad(W, X, Y)[0], W)))
    for _ in range(20):
        m, n, h = rng.integers(3, 9), rng.integers(2, 5), rng.integers(1, 6)
        X, Y = rng.normal(size=(m, n)), one_hot(rng.integers(0, 3, m))
        params = [rng.normal(size=(n, h)), rng.normal(size=h), rng.normal(size=(h, 3)), rng.normal(size=3)]
        _, grads = ann_loss_grad(params, X, Y)
        for p, g in zip(params, grads):
            num = central_difference(lambda: ann_loss_grad(params, X, Y)[0], p)
            ann_err = max(ann_err, relative_error(g, num))
    return lr_err < 1e-5 and ann_err < 1e-5, \
        f"max relative error LR {lr_err:.2e}, ANN {ann_err:.2e} over 20 instances each (h=1e-6)"


# -- 3. split oracle ----------------------------------------------------------

def check_3():
    rng = np.random.default_rng(3)
    mismatches = 0
    for _ in range(200):
        m, n = rng.integers(2, 9), rng.integers(1, 4)
        X = rng.choice([0.0, 1.0, 0.25, 2.5, 3.0], size=(m, n))
        y = rng.integers(0, 3, m)
        s = best_split(X, y, min_gain=1e-9)
        ref = brute_force_split(X, y)
        if ref is None or ref[2] < 1e-9:
            mismatches += s is not None
        elif s is None or (s.feature, s.threshold) != ref[:2] or abs(s.gain - ref[2]) > 1e-12:
            mismatches += 1
    return mismatches == 0, f"{200 - mismatches}/200 random tables (<=8 rows, <=3 features) match enumeration"


# -- 4. k-means ---------------------------------------------------------------

def check_4():
    rng = np.random.default_rng(4)
    non_monotone = 0
    for _ in range(50):
        n = rng.integers(5, 60)
        pts = rng.normal(size=(n, 2)) * rng.uniform(0.5, 5)
        trace = np.array(kmeans_fit(pts, int(rng.integers(1, 6)), seed=int(rng.integers(1 << 30))).trace)
        non_monotone += bool(np.any(np.diff(trace) > 1e-9 * (1 + trace[:-1])))
    pts = [(0, 0), (0, 1), (10, 10), (10, 11)]
    best_cost, _ = best_two_partition(pts)
    recovered = 0
    for seed in range(10):
        m = kmeans_fit(pts, 2, seed=seed)
        recovered += (sorted(map(tuple, m.centroids.tolist())) == [(0, 0.5), (10, 10.5)]
                      and abs(m.wcss - best_cost) < 1e-12)
    return non_monotone == 0 and recovered == 10, \
        f"WCSS monotone on {50 - non_monotone}/50 instances; K=2 optimum recovered for {recovered}/10 seeds"


# -- 5. ensemble degeneracies ---------------------------------------------------

def check_5():
    rng = np.random.default_rng(5)
    X, y = rng.normal(size=(150, 6)), rng.integers(0, 3, 150)
    Q = rng.normal(size=(500, 6))
    forest = RandomForest(n_trees=1, mtry=6, bootstrap=False).fit(X, y)
    same_tree = bool(np.all(forest.predict(Q) == DecisionTree().fit(X, y).predict(Q)))
    prior = np.bincount(y, minlength=3) / len(y)
    gb0 = GradientBoosting(n_trees=0).fit(X, y).predict_proba(Q)
    prior_err = float(np.abs(gb0 - prior).max())
    dev = np.array(GradientBoosting(n_trees=100, shrinkage=0.05, subsample=1.0).fit(X, y).train_deviance_)
    rises = int(np.sum(np.diff(dev) > 1e-12))
    ok = same_tree and prior_err < 1e-12 and rises == 0
    return ok, (f"RF(T=1,mtry=N,no bootstrap) == tree on 500 rows: {same_tree}; "
                f"GB(T=0) vs prior max err {prior_err:.1e}; GB deviance rises over 100 stages: {rises}")


# -- 6 and 8. end-to-end run ----------------------------------------------------

E2E_CONFIG = {
    "seed": 2021,
    "k_values": [5],
    "grids": {"rf": {"n_trees": [100, 300], "mtry": ["sqrt", "N/2", "N/3", "N/4"]},
              "gb": {"n_trees": [100, 300]}},
    "importance": {"learners": ["gb"]},
    "synthetic": {"n_trips": 50000, "weekday_multiplier": 2.0, "rain_suppression": 0.5},
}


def run_pipeline(out, config, jobs):
    out = Path(out)
    cfg_path = out.parent / f"{out.name}.yaml"
    cfg_path.write_text(yaml.safe_dump({**config, "output": str(out)}))
    start = time.perf_counter()
    code = cli_main(["--config", str(cfg_path), "--jobs", str(jobs), "all"])
    return code, time.perf_counter() - start


def _macro_f1_by_learner(out):
    doc = json.loads((out / "reports" / "metrics.json").read_text())
    return {e["learner"]: e["classes"]["Average"]["f1"] for e in doc
            if e["eval_set"] == "test" and e["K"] == 5}


def check_6(out, seconds):
    f1 = _macro_f1_by_learner(out)
    floor = max(f1["lr"], f1["majority"]) + 0.05
    top = json.loads((out / "reports" / "top_features.json").read_text())
    gb_top = [t["feature"] for e in top if e["learner"] == "gb" for t in e["top"]]
    planted = {"weekday", "location_id"} <= set(gb_top[:5])
    ok = f1["gb"] >= floor and f1["rf"] >= floor and planted
    return ok, (f"test macro-F1 GB {f1['gb']:.4f}, RF {f1['rf']:.4f}, LR {f1['lr']:.4f}, "
                f"majority {f1['majority']:.4f} (need >= {floor:.4f}); GB top 5 {gb_top[:5]}; "
                f"pipeline {seconds / 60:.1f} min on {os.cpu_count()} core(s)")


def check_8(out):
    t = json.loads((out / "models" / "K5" / "timing.json").read_text())
    ratios = {k: t[k] / t["lr"] for k in ("ann", "rf", "gb")}
    ok = all(r >= 10 for r in ratios.values())
    return ok, (f"LR {t['lr']:.3f}s; ANN {t['ann']:.2f}s ({ratios['ann']:.0f}x), "
                f"RF {t['rf']:.2f}s ({ratios['rf']:.0f}x), GB {t['gb']:.2f}s ({ratios['gb']:.0f}x)")


# -- 7. determinism across --jobs ------------------------------------------------

DET_CONFIG = {
    "seed": 77,
    "k_values": [5, 10],
    "cv_folds": 5,
    "grids": {"rf": {"n_trees": [20, 40], "mtry": ["sqrt", "N/3"]}, "gb": {"n_trees": [20, 40]},
              "ann": {"hidden": [1, 6], "rate": [0.05, 0.1]}},
    "learner_params": {"ann": {"epochs": 100}},
    "importance": {"repeats": 3},
    "synthetic": {"n_trips": 8000, "start": "2015-05-04", "end": "2015-05-17"},
}


def compare_trees(a, b):
    """Relative paths that differ or exist on one side only, timing files excluded."""
    diffs, compared = [], 0
    files_a = {p.relative_to(a) for p in a.rglob("*") if p.is_file()}
    files_b = {p.relative_to(b) for p in b.rglob("*") if p.is_file()}
    for rel in sorted(files_a | files_b):
        if rel.name in TIMING_FILES:
            continue
        if rel not in files_a or rel not in files_b or not filecmp.cmp(a / rel, b / rel, shallow=False):
            diffs.append(str(rel))
        compared += 1
    return diffs, compared


def check_7(tmp):
    code1, _ = run_pipeline(tmp / "jobs1", DET_CONFIG, 1)
    code8, _ = run_pipeline(tmp / "jobs8", DET_CONFIG, 8)
    diffs, compared = compare_trees(tmp / "jobs1", tmp / "jobs8")
    ok = code1 == code8 == 0 and not diffs and compared > 0
    return ok, (f"--jobs 1 vs --jobs 8: {compared} files compared, {len(diffs)} differ"
                + (f" {diffs[:5]}" if diffs else "") + "; wall-clock timing files excluded")


# -- pytest entry points ----------------------------------------------------------

@pytest.fixture(scope="module")
def e2e(tmp_path_factory):
    out = tmp_path_factory.mktemp("e2e") / "run"
    code, seconds = run_pipeline(out, E2E_CONFIG, min(4, os.cpu_count() or 1))
    assert code == 0
    return out, seconds


def test_criterion_1_table_metrics():
    ok, detail = check_1()
    assert report(1, ok, detail), detail


def test_criterion_2_gradients():
    ok, detail = check_2()
    assert report(2, ok, detail), detail


def test_criterion_3_split_oracle():
    ok, detail = check_3()
    assert report(3, ok, detail), detail


def test_criterion_4_kmeans():
    ok, detail = check_4()
    assert report(4, ok, detail), detail


def test_criterion_5_degeneracies():
    ok, detail = check_5()
    assert report(5, ok, detail), detail


@pytest.mark.slow
def test_criterion_6_planted_signal(e2e):
    ok, detail = check_6(*e2e)
    assert report(6, ok, detail), detail


@pytest.mark.slow
def test_criterion_7_determinism(tmp_path):
    ok, detail = check_7(tmp_path)
    assert report(7, ok, detail), detail


@pytest.mark.slow
def test_criterion_8_timing_order(e2e):
    ok, detail = check_8(e2e[0])
    assert report(8, ok, detail), detail


if __name__ == "__main__":
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for n, check in ((1, check_1), (2, check_2), (3, check_3), (4, check_4), (5, check_5)):
            report(n, *check())
        out = tmp / "e2e"
        code, seconds = run_pipeline(out, E2E_CONFIG, min(4, os.cpu_count() or 1))
        report(6, *check_6(out, seconds)) if code == 0 else report(6, False, f"exit {code}")
        report(7, *check_7(tmp))
        report(8, *check_8(out)) if code == 0 else report(8, False, f"exit {code}")
    sys.exit(0 if all(line.startswith("PASS") for line in RESULTS.values()) else 1)
