"""Data matrix handling and all sum-of-squares computations.

Scale convention: the dissimilarity sums below run over ordered pairs
(i, i'), so each unordered pair is counted twice. The per-feature
between-cluster dispersion a_j therefore equals exactly twice the
classical between-group sum of squares, and the decomposition

    sum_j w_j a_j  +  weighted_wcss  =  total_ss

holds identically for any partition and any weights. Only the ordering of
the a_j matters to the clustering algorithms, but the convention is pinned
here so every module (and every test oracle) agrees on the numbers.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import DataError, EmptyCluster, LengthMismatch, NonFiniteInput

NONZERO_TOL = 1e-12  # shared definition of "this weight is nonzero"


def as_matrix(values, *, name: str = "data") -> np.ndarray:
    """Validate and return an n x p float matrix (finite, n >= 2, p >= 1)."""
    m = np.asarray(values, dtype=float)
    if m.ndim != 2:
        raise DataError(f"{name} must be 2-dimensional, got shape {m.shape}")
    n, p = m.shape
    if n < 2 or p < 1:
        raise DataError(f"{name} needs n >= 2 and p >= 1, got {n} x {p}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteInput(f"{name} contains NaN or infinity")
    return m


def check_labels(labels, k: int, n: int) -> np.ndarray:
    lab = np.asarray(labels, dtype=int)
    if lab.shape != (n,):
        raise LengthMismatch(f"expected {n} labels, got shape {lab.shape}")
    if lab.min() < 0 or lab.max() >= k:
        raise DataError(f"labels must lie in [0, {k})")
    return lab


def standardize(m, *, allow_constant: bool = False) -> np.ndarray:
    """Center every column; scale non-constant columns to sample sd 1.

    The sd uses the n-1 divisor. Constant columns are an error unless
    allow_constant is set, in which case they are centered and left
    unscaled (all zeros).
    """
    m = as_matrix(m)
    centered = m - m.mean(axis=0)
    sd = centered.std(axis=0, ddof=1)
    constant = sd <= 0.0
    if constant.any() and not allow_constant:
        idx = int(np.flatnonzero(constant)[0])
        raise DataError(f"column {idx} is constant; pass allow_constant to keep it")
    scale = np.where(constant, 1.0, sd)
    return centered / scale


def cluster_sizes(labels, k: int) -> np.ndarray:
    return np.bincount(np.asarray(labels, dtype=int), minlength=k)


def between_group_ss(m, labels, k: int) -> np.ndarray:
    """Classical per-feature between-group sum of squares.

    b_j = sum_k n_k (mean_kj - mean_j)^2, computed in O(np). This is the
    centroid form; the public bcss_per_feature doubles it to match the
    ordered-pair convention.
    """
    m = np.asarray(m, dtype=float)
    n, p = m.shape
    lab = check_labels(labels, k, n)
    counts = cluster_sizes(lab, k)
    if (counts == 0).any():
        raise EmptyCluster(f"cluster {int(np.flatnonzero(counts == 0)[0])} is empty")
    sums = np.zeros((k, p))
    np.add.at(sums, lab, m)
    centroids = sums / counts[:, None]
    grand = m.mean(axis=0)
    return counts @ (centroids - grand) ** 2


def bcss_per_feature(m, labels, k: int) -> np.ndarray:
    """Per-feature between-cluster dispersion a_j (ordered-pair scale).

    a_j = (1/n) sum_{i,i'} d_{ii'j} - sum_k (1/n_k) sum_{i,i' in C_k} d_{ii'j}
    with d_{ii'j} = (x_ij - x_i'j)^2 over ordered pairs; equals twice
    between_group_ss. Tiny negatives from round-off are clamped to 0.
    """
    a = 2.0 * between_group_ss(m, labels, k)
    a[(a < 0.0) & (a > -1e-9)] = 0.0
    return a


def _within_group_ss(m, labels, k: int) -> np.ndarray:
    """Classical per-feature within-group sum of squares."""
    m = np.asarray(m, dtype=float)
    n, p = m.shape
    lab = check_labels(labels, k, n)
    counts = cluster_sizes(lab, k)
    if (counts == 0).any():
        raise EmptyCluster(f"cluster {int(np.flatnonzero(counts == 0)[0])} is empty")
    sums = np.zeros((k, p))
    np.add.at(sums, lab, m)
    centroids = sums / counts[:, None]
    return (m**2).sum(axis=0) - counts @ centroids**2


def weighted_wcss(m, labels, w, k: int) -> float:
    """Weighted within-cluster dispersion, ordered-pair scale.

    sum_k (1/n_k) sum_{i,i' in C_k} sum_j w_j (x_ij - x_i'j)^2
    = 2 sum_j w_j (classical within-group SS of feature j).
    """
    w = np.asarray(w, dtype=float)
    return float(2.0 * (w @ _within_group_ss(m, labels, k)))


def total_ss(m, w) -> float:
    """Weighted total dispersion (1/n) sum_{i,i'} sum_j w_j d_{ii'j}."""
    m = np.asarray(m, dtype=float)
    w = np.asarray(w, dtype=float)
    centered = m - m.mean(axis=0)
    return float(2.0 * (w @ (centered**2).sum(axis=0)))


def read_csv_matrix(path, *, header: bool = False) -> np.ndarray:
    """Read an n x p numeric CSV. Raises DataError with the offending line
    number on parse failure."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if header and lineno == 1:
                continue
            try:
                vals = [float(cell) for cell in row]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise DataError(
                    f"{path}:{lineno}: expected {width} columns, got {len(vals)}")
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return as_matrix(np.array(rows), name=path)


def write_csv_matrix(path, m) -> None:
    m = np.asarray(m, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in m:
            writer.writerow([repr(float(v)) for v in row])
