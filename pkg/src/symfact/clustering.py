"""Cluster extraction and scoring.

Labels come from the signed row-wise argmax of the factor matrix (a large
negative score counts against a cluster, so magnitudes are not compared).
Scoring offers permutation-matched accuracy, normalized mutual information,
and a seeded k-means baseline.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .validation import check_labels, check_matrix, check_rank


def assign_labels(H):
    """Row-wise argmax labels from raw signed factor values; ties take the
    lowest column index."""
    H = check_matrix(H, "H")
    return np.argmax(H, axis=1)


def _contingency(pred, truth):
    pred = check_labels(pred, "pred")
    truth = check_labels(truth, "truth")
    if pred.shape[0] != truth.shape[0]:
        raise ValueError(f"label vectors differ in length: {pred.shape[0]} vs {truth.shape[0]}")
    k = int(max(pred.max(), truth.max())) + 1
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (pred, truth), 1)
    return pred, truth, C


def accuracy(pred, truth):
    """Best-permutation label accuracy and the matching itself.

    Builds the confusion matrix C[p, t] (padded square so differing cluster
    counts stay well-posed), solves the maximum-weight assignment, and
    returns (matched count / n, permutation) with permutation[p] = t.
    """
    pred, truth, C = _contingency(pred, truth)
    rows, cols = linear_sum_assignment(C, maximize=True)
    permutation = np.empty(C.shape[0], dtype=np.int64)
    permutation[rows] = cols
    ac = float(C[rows, cols].sum()) / pred.shape[0]
    return ac, permutation


def nmi(pred, truth):
    """Normalized mutual information with geometric-mean normalization.

    Natural-log entropies over empirical counts, 0*log(0) = 0.  Identical
    partitions give exactly 1.0 (including the all-single-cluster pair);
    any other partition against a single cluster gives 0.0.
    """
    pred, truth, C = _contingency(pred, truth)
    n = pred.shape[0]
    a = C.sum(axis=1)
    b = C.sum(axis=0)
    nz_rows = (C > 0).sum(axis=1)
    nz_cols = (C > 0).sum(axis=0)
    if nz_rows.max() == 1 and nz_cols.max() == 1:
        return 1.0  # one-to-one block structure: the partitions coincide
    ha = float(-sum(x / n * np.log(x / n) for x in a if x > 0))
    hb = float(-sum(x / n * np.log(x / n) for x in b if x > 0))
    if ha == 0.0 or hb == 0.0:
        return 0.0
    mi = 0.0
    for i, j in zip(*np.nonzero(C)):
        c = C[i, j]
        mi += c / n * np.log(n * c / (a[i] * b[j]))
    return float(min(max(mi / np.sqrt(ha * hb), 0.0), 1.0))


@dataclass(frozen=True)
class ClusteringReport:
    """Prediction bundled with its scores against a reference labeling."""

    predicted: np.ndarray
    ac: float
    nmi: float
    confusion: np.ndarray
    permutation: np.ndarray


def evaluate_clustering(pred, truth):
    """Score a predicted labeling against truth in one report."""
    pred, truth, C = _contingency(pred, truth)
    ac, permutation = accuracy(pred, truth)
    return ClusteringReport(
        predicted=pred,
        ac=ac,
        nmi=nmi(pred, truth),
        confusion=C,
        permutation=permutation,
    )


def _kmeans_pp_centers(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[int(rng.integers(n))]
    d2 = np.square(X - centers[0]).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[j] = X[idx]
        np.minimum(d2, np.square(X - centers[j]).sum(axis=1), out=d2)
    return centers


def _lloyd(X, k, rng, max_iter):
    """Lloyd iterations from a k-means++ start.

    Returns (labels, centers, per-iteration WCSS measured right after each
    assignment step).  An empty cluster is re-seeded to the point currently
    farthest from its own centroid.
    """
    n = X.shape[0]
    centers = _kmeans_pp_centers(X, k, rng)
    labels = None
    wcss = []
    for _ in range(max_iter):
        d2 = np.square(X[:, None, :] - centers[None, :, :]).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        wcss.append(float(d2[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts > 0):
            centers[j] = X[labels == j].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            resid = np.square(X - centers[labels]).sum(axis=1)
            for j in empty:
                far = int(np.argmax(resid))
                centers[j] = X[far]
                resid[far] = -1.0  # keep later empty clusters off the same point
    return labels, centers, wcss


def kmeans(X, k, seed=0, max_iter=100):
    """Seeded k-means labels (k-means++ start, Lloyd iterations)."""
    X = check_matrix(X, "X")
    k = check_rank(k, X.shape[0], name="k")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    labels, _, _ = _lloyd(X, k, np.random.default_rng(seed), max_iter)
    return labels
