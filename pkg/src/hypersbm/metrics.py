"""Mismatch ratio under the best global relabeling."""

from __future__ import annotations

from typing import Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import check_labels

__all__ = ["confusion_matrix", "unpermuted_loss", "mismatch_ratio"]


def confusion_matrix(est, truth, k: int | None = None) -> np.ndarray:
    """``C[s, t] = |{v : est(v) = s, truth(v) = t}|``."""
    est = check_labels(est)
    truth = check_labels(truth)
    if est.shape != truth.shape:
        raise ValueError(f"length mismatch: {est.shape[0]} vs {truth.shape[0]}")
    if k is None:
        k = int(max(est.max(initial=-1), truth.max(initial=-1))) + 1
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (est, truth), 1)
    return cm


def unpermuted_loss(a, b) -> float:
    """Normalized Hamming distance between two labelings."""
    a = check_labels(a)
    b = check_labels(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        return 0.0
    return float(np.count_nonzero(a != b)) / a.shape[0]


def _best_matching_weight(weights: np.ndarray) -> int:
    if weights.size == 0:
        return 0
    rows, cols = linear_sum_assignment(weights, maximize=True)
    return int(weights[rows, cols].sum())


def mismatch_ratio(est, truth, k: int | None = None) -> Tuple[float, Tuple[int, ...]]:
    """Fraction of misclassified nodes minimized over label permutations.

    Solves a maximum-weight assignment on the confusion matrix. Among the
    optimal permutations the lexicographically smallest is returned, found by
    fixing ``perm[s]`` to the smallest label that keeps the optimum reachable.

    Returns
    -------
    ratio : float
    perm : tuple of int
        ``perm[s]`` is the truth label matched to estimated label ``s``; the
        relabeled estimate is ``perm[est]``.
    """
    est = check_labels(est)
    truth = check_labels(truth)
    inferred = int(max(est.max(initial=-1), truth.max(initial=-1))) + 1
    if k is None:
        k = inferred
    elif inferred > k:
        raise ValueError(f"labels exceed k={k}")
    cm = confusion_matrix(est, truth, k)
    n = est.shape[0]
    best = _best_matching_weight(cm)

    perm = []
    free_rows = list(range(k))
    free_cols = list(range(k))
    acc = 0
    for s in range(k):
        free_rows.remove(s)
        for t in sorted(free_cols):
            rest = [c for c in free_cols if c != t]
            sub = cm[np.ix_(free_rows, rest)]
            if acc + cm[s, t] + _best_matching_weight(sub) == best:
                perm.append(t)
                acc += cm[s, t]
                free_cols.remove(t)
                break
    ratio = (n - best) / n if n else 0.0
    return float(ratio), tuple(perm)
