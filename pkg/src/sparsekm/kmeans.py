"""Weighted k-means: k-means++ seeding, Lloyd iterations, multi-restart.

All distances are weighted per-feature, which is implemented by scaling
column j of the data by sqrt(w_j) and running plain Euclidean k-means on
the result. Reported WCSS uses the ordered-pair scale of data.weighted_wcss
(twice the classical value), so KmeansResult.wcss and weighted_wcss agree
to round-off.

An optional refinement stage (refine="swap") runs first-improvement
single-point relocation sweeps after Lloyd converges, using the exact
change in WCSS including the cluster-size factors n_b/(n_b+1) and
n_a/(n_a-1). A relocation-stable labeling is also Lloyd-stable, so the
returned state is still a fixed point. Lloyd alone stalls in shallow local
minima when clusters overlap in many dimensions; the sweeps recover the
deeper optima at small extra cost, and benchmarks enable them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._rng import rng_for
from .errors import AllZeroWeights, DataError, DegenerateData, NumericalError
from .data import as_matrix

REFINE_MODES = ("none", "swap")


@dataclass
class KmeansConfig:
    k: int
    restarts: int = 10
    max_iters: int = 100
    tol: float = 1e-8
    seed: int = 0
    refine: str = "none"

    def validated(self, n: int) -> "KmeansConfig":
        if self.k < 1 or self.k > n:
            raise DataError(f"k must be in [1, {n}], got {self.k}")
        if self.restarts < 1:
            raise DataError(f"restarts must be >= 1, got {self.restarts}")
        if self.refine not in REFINE_MODES:
            raise DataError(f"refine must be one of {REFINE_MODES}")
        return self


@dataclass
class KmeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    wcss: float
    iters_used: int
    restart_index: int
    repairs: int = 0


def _check_weights(w, p: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (p,):
        raise DataError(f"weights must have shape ({p},), got {w.shape}")
    if (w < 0).any():
        raise DataError("weights must be nonnegative")
    if not (w > 0).any():
        raise AllZeroWeights("all feature weights are zero")
    return w


def _pp_indices(Y: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ row selection on a pre-scaled matrix."""
    n = Y.shape[0]
    idx = np.empty(k, dtype=int)
    idx[0] = int(rng.integers(n))
    d2 = ((Y - Y[idx[0]]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # fewer than j distinct rows under this metric
            warnings.warn("fewer distinct rows than clusters; falling back to "
                          "duplicate-tolerant seeding", DegenerateData)
            remaining = np.setdiff1d(np.arange(n), idx[:j])
            idx[j:] = rng.choice(remaining, size=k - j, replace=False)
            break
        idx[j] = int(rng.choice(n, p=d2 / total))
        d2 = np.minimum(d2, ((Y - Y[idx[j]]) ** 2).sum(axis=1))
    return idx


def kmeans_pp_init(m, w, k: int, seed: int) -> np.ndarray:
    """Choose k rows of m by weighted k-means++ and return them as centroids.

    Draws from the same stream as restart 0 of run_kmeans, so a single
    restart reproduces lloyd_weighted from this seeding exactly.
    """
    m = as_matrix(m)
    w = _check_weights(w, m.shape[1])
    if k > m.shape[0]:
        raise DataError(f"k={k} exceeds n={m.shape[0]}")
    Y = m * np.sqrt(w)
    idx = _pp_indices(Y, k, rng_for(seed, 0))
    return m[idx]


def _assign(Y, centers):
    d = ((Y**2).sum(axis=1)[:, None] - 2.0 * (Y @ centers.T)
         + (centers**2).sum(axis=1)[None, :])
    return np.argmin(d, axis=1), d


def _lloyd_core(Y: np.ndarray, centers: np.ndarray, max_iters: int, tol: float):
    """Plain Lloyd on a pre-scaled matrix. Returns labels, classical WCSS,
    iterations used, and the number of empty-cluster repairs."""
    n, _ = Y.shape
    k = centers.shape[0]
    sq = (Y**2).sum()
    prev_labels = None
    prev_wcss = np.inf
    labels = None
    wcss = np.inf
    repairs = 0
    iters = 0
    for it in range(1, max_iters + 1):
        new_labels, d = _assign(Y, centers)
        counts = np.bincount(new_labels, minlength=k)
        while (counts == 0).any():
            empty = int(np.flatnonzero(counts == 0)[0])
            dist_own = d[np.arange(n), new_labels]
            movable = counts[new_labels] >= 2
            donor = int(np.argmax(np.where(movable, dist_own, -np.inf)))
            counts[new_labels[donor]] -= 1
            new_labels[donor] = empty
            counts[empty] = 1
            repairs += 1
        if prev_labels is not None and np.array_equal(new_labels, prev_labels):
            iters = it - 1
            break
        sums = np.zeros((k, Y.shape[1]))
        np.add.at(sums, new_labels, Y)
        centers = sums / counts[:, None]
        wcss = float(sq - counts @ (centers**2).sum(axis=1))
        labels = new_labels
        iters = it
        if wcss > prev_wcss + 1e-7 * (1.0 + abs(prev_wcss)):
            raise NumericalError("WCSS increased across a Lloyd iteration")
        if prev_wcss - wcss < tol * max(1.0, abs(prev_wcss)):
            break
        prev_labels = new_labels
        prev_wcss = wcss
    return labels, wcss, iters, repairs


def _swap_refine(Y: np.ndarray, labels: np.ndarray, k: int,
                 max_sweeps: int = 100):
    """First-improvement single-point relocation until no move lowers WCSS.

    The move criterion uses the exact WCSS change: removing point i from
    cluster a recovers n_a/(n_a-1) d(i, mu_a)^2 while inserting it into b
    costs n_b/(n_b+1) d(i, mu_b)^2.
    """
    n = Y.shape[0]
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k).astype(float)
    sums = np.zeros((k, Y.shape[1]))
    np.add.at(sums, labels, Y)
    for _ in range(max_sweeps):
        moved = False
        for i in range(n):
            a = labels[i]
            if counts[a] <= 1:
                continue
            mu = sums / counts[:, None]
            d2 = ((Y[i] - mu) ** 2).sum(axis=1)
            gain = counts[a] / (counts[a] - 1.0) * d2[a]
            cost = counts / (counts + 1.0) * d2
            cost[a] = np.inf
            b = int(np.argmin(cost))
            if cost[b] < gain - 1e-12:
                sums[a] -= Y[i]
                counts[a] -= 1.0
                sums[b] += Y[i]
                counts[b] += 1.0
                labels[i] = b
                moved = True
        if not moved:
            break
    return labels


def _finish(m, Y, labels, k, iters, restart_index, repairs) -> KmeansResult:
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, m.shape[1]))
    np.add.at(sums, labels, m)
    centroids = sums / np.maximum(counts, 1)[:, None]
    ysums = np.zeros((k, Y.shape[1]))
    np.add.at(ysums, labels, Y)
    ymu = ysums / np.maximum(counts, 1)[:, None]
    classical = float((Y**2).sum() - counts @ (ymu**2).sum(axis=1))
    return KmeansResult(labels=labels, centroids=centroids,
                        wcss=2.0 * max(classical, 0.0), iters_used=iters,
                        restart_index=restart_index, repairs=repairs)


def lloyd_weighted(m, w, init_centroids, cfg: KmeansConfig) -> KmeansResult:
    """Lloyd iterations from explicit starting centroids."""
    m = as_matrix(m)
    cfg.validated(m.shape[0])
    w = _check_weights(w, m.shape[1])
    root = np.sqrt(w)
    Y = m * root
    centers = np.asarray(init_centroids, dtype=float) * root
    if centers.shape[1] != m.shape[1]:
        raise DataError("init centroids and data disagree on p")
    labels, _, iters, repairs = _lloyd_core(Y, centers, cfg.max_iters, cfg.tol)
    if cfg.refine == "swap":
        labels = _swap_refine(Y, labels, cfg.k)
    return _finish(m, Y, labels, cfg.k, iters, 0, repairs)


def run_kmeans(m, w, cfg: KmeansConfig, path: tuple = ()) -> KmeansResult:
    """Best result over cfg.restarts independent k-means++ seedings.

    path extends the RNG stream name so nested callers (the sparse outer
    loop, gap tuning cells) draw non-overlapping streams from one seed.
    """
    m = as_matrix(m)
    cfg.validated(m.shape[0])
    w = _check_weights(w, m.shape[1])
    Y = m * np.sqrt(w)
    best = None
    for r in range(cfg.restarts):
        rng = rng_for(cfg.seed, *path, r)
        idx = _pp_indices(Y, cfg.k, rng)
        labels, wcss, iters, repairs = _lloyd_core(Y, Y[idx], cfg.max_iters,
                                                   cfg.tol)
        if cfg.refine == "swap":
            labels = _swap_refine(Y, labels, cfg.k)
            counts = np.bincount(labels, minlength=cfg.k)
            sums = np.zeros((cfg.k, Y.shape[1]))
            np.add.at(sums, labels, Y)
            mu = sums / np.maximum(counts, 1)[:, None]
            wcss = float((Y**2).sum() - counts @ (mu**2).sum(axis=1))
        if best is None or wcss < best[1]:
            best = (labels, wcss, iters, r, repairs)
    labels, _, iters, r, repairs = best
    return _finish(m, Y, labels, cfg.k, iters, r, repairs)
