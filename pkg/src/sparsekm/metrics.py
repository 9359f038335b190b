"""Evaluation criteria: CER, purity/ECR, and feature-count summaries."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .data import NONZERO_TOL
from .errors import IndexOutOfRange, LengthMismatch

_PAIRWISE_LIMIT = 5000


def _as_labels(x, name):
    lab = np.asarray(x)
    if lab.ndim != 1:
        raise LengthMismatch(f"{name} must be 1-dimensional")
    return lab


def _check_pair(est, truth):
    est = _as_labels(est, "estimated")
    truth = _as_labels(truth, "truth")
    if est.shape != truth.shape:
        raise LengthMismatch(
            f"partitions disagree on n: {est.shape[0]} vs {truth.shape[0]}")
    if est.shape[0] < 2:
        raise LengthMismatch("need at least 2 samples")
    return est, truth


def contingency(truth, est) -> np.ndarray:
    """Count matrix N[k, k'] = #{i : truth_i = k, est_i = k'}."""
    _, ti = np.unique(truth, return_inverse=True)
    _, ei = np.unique(est, return_inverse=True)
    table = np.zeros((ti.max() + 1, ei.max() + 1), dtype=int)
    np.add.at(table, (ti, ei), 1)
    return table


def cer(estimated, truth) -> float:
    """Fraction of sample pairs whose co-membership the two partitions
    disagree on.

    Pair enumeration up to n = 5000; above that an equivalent contingency
    identity (disagreements = est-pairs + truth-pairs - 2 * joint-pairs)
    avoids the n^2 bitmap.
    """
    est, tru = _check_pair(estimated, truth)
    n = est.shape[0]
    if n <= _PAIRWISE_LIMIT:
        same_e = est[:, None] == est[None, :]
        same_t = tru[:, None] == tru[None, :]
        iu = np.triu_indices(n, k=1)
        return float(np.mean(same_e[iu] != same_t[iu]))
    table = contingency(tru, est)

    def pairs(counts):
        counts = counts.astype(float)
        return (counts * (counts - 1) / 2).sum()

    joint = pairs(table.ravel())
    disagreements = pairs(table.sum(axis=1)) + pairs(table.sum(axis=0)) - 2 * joint
    return float(disagreements / (n * (n - 1) / 2))


def confusion_proportions(truth, est) -> np.ndarray:
    """pi[k, k'] = fraction of samples in true cluster k and estimated
    cluster k'."""
    tru, e = _check_pair(truth, est)
    return contingency(tru, e) / tru.shape[0]


def purity(estimated, truth) -> float:
    pi = confusion_proportions(truth, estimated)
    return float(pi.max(axis=0).sum())


def ecr(estimated, truth) -> float:
    """1 - purity: the fraction left over after crediting each estimated
    cluster with its best-matching true cluster."""
    return 1.0 - purity(estimated, truth)


class FeatureCounts(NamedTuple):
    nw: int    # nonzero estimated weights
    pzw: int   # true-noise features correctly given zero weight
    pnw: int   # true-relevant features correctly given nonzero weight


def feature_counts(w, support) -> FeatureCounts:
    w = np.asarray(w, dtype=float)
    p = w.shape[0]
    support = np.asarray(support, dtype=int)
    if support.size and (support.min() < 0 or support.max() >= p):
        raise IndexOutOfRange(f"support indices must lie in [0, {p})")
    relevant = np.zeros(p, dtype=bool)
    relevant[support] = True
    nonzero = np.abs(w) > NONZERO_TOL
    return FeatureCounts(nw=int(nonzero.sum()),
                         pzw=int((~nonzero & ~relevant).sum()),
                         pnw=int((nonzero & relevant).sum()))
