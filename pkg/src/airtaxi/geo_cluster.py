"""Lloyd's k-means over pickup coordinates and nearest-centroid location IDs.

Distances are squared Euclidean in raw degrees. Location IDs are 1-based.
"""
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ClusterModel:
    K: int
    centroids: np.ndarray          # (K, 2) lat/lon
    seed: int
    iterations_run: int
    wcss: float
    trace: tuple = field(default=(), compare=False)   # objective after each assignment

    def to_dict(self):
        return {"K": self.K, "seed": self.seed, "iterations_run": self.iterations_run,
                "wcss": self.wcss, "centroids": self.centroids.tolist()}

    @classmethod
    def from_dict(cls, data):
        centroids = np.asarray(data["centroids"], dtype=float).reshape(-1, 2)
        if centroids.shape[0] != data["K"]:
            raise ValueError("centroid count does not match K")
        return cls(int(data["K"]), centroids, int(data["seed"]),
                   int(data.get("iterations_run", 0)), float(data.get("wcss", 0.0)))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        pts = pts.reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinates")
    return pts


def _sq_dists(pts, centroids):
    diff = pts[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _assign(pts, centroids):
    d = _sq_dists(pts, centroids)
    labels = np.argmin(d, axis=1)          # first minimum: lowest index wins ties
    return labels, d[np.arange(len(pts)), labels]


def _lloyd(pts, centroids, max_iter, tol):
    K = len(centroids)
    labels, d = _assign(pts, centroids)
    trace = [float(d.sum())]
    iterations = 0
    for _ in range(max_iter):
        new = np.empty_like(centroids)
        sizes = np.bincount(labels, minlength=K)
        for dim in range(2):
            sums = np.bincount(labels, weights=pts[:, dim], minlength=K)
            new[:, dim] = np.divide(sums, sizes, out=centroids[:, dim].copy(),
                                    where=sizes > 0)
        for k in np.flatnonzero(sizes == 0):
            far = int(np.argmax(d))
            new[k] = pts[far]
            d[far] = 0.0
        shift = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        centroids = new
        new_labels, d = _assign(pts, centroids)
        iterations += 1
        trace.append(float(d.sum()))
        changed = np.any(new_labels != labels)
        labels = new_labels
        if not changed or shift < tol:
            break
    return centroids, iterations, float(d.sum()), tuple(trace)


def kmeans_fit(points, K, seed=0, max_iter=100, tol=1e-8, n_init=20):
    """Fit K centroids by alternating reassignment and centroid recomputation.

    Initial centroids are K distinct points drawn with ``seed`` from the
    lexicographically sorted unique points, so the start does not depend on
    input order. Stops when no assignment changes, the largest centroid move
    is below ``tol``, or after ``max_iter`` recomputations. An emptied
    cluster is reseeded at the point farthest from its current centroid.

    ``n_init`` starts are run and the lowest final WCSS kept (first on ties);
    ``trace`` is the objective after each assignment of that run.
    """
    pts = _as_points(points)
    n = len(pts)
    if n == 0:
        raise ValueError("no points to cluster")
    if not 1 <= K <= n:
        raise ValueError(f"K={K} must lie in [1, {n}]")
    if max_iter < 1 or tol < 0 or n_init < 1:
        raise ValueError("max_iter and n_init must be >= 1 and tol >= 0")

    rng = np.random.default_rng(seed)
    uniq = np.unique(pts, axis=0)
    pool = uniq if len(uniq) >= K else pts
    best = None
    for _ in range(n_init):
        start = pool[np.sort(rng.choice(len(pool), K, replace=False))].copy()
        run = _lloyd(pts, start, max_iter, tol)
        if best is None or run[2] < best[2]:
            best = run
    centroids, iterations, wcss, trace = best
    return ClusterModel(K, centroids, int(seed), iterations, wcss, trace)


def assign_locations(points, model):
    """Vectorized :func:`assign_location`: 1-based nearest-centroid IDs."""
    labels, _ = _assign(_as_points(points), model.centroids)
    return labels + 1


def assign_location(point, model):
    return int(assign_locations([point], model)[0])


def wcss_of(points, model):
    """Sum of squared distances from each point to its nearest centroid."""
    _, d = _assign(_as_points(points), model.centroids)
    return float(d.sum())
