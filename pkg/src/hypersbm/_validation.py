"""Input validation helpers shared by the estimators and functions."""

from __future__ import annotations

import numbers

import numpy as np

from .model import Hypergraph


def check_labels(labels, n: int | None = None, k: int | None = None) -> np.ndarray:
    """Coerce ``labels`` to a 1-d intp array and check its range."""
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"labels must be 1-d, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("labels must be integers")
    arr = arr.astype(np.intp, copy=False)
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected {n} labels, got {arr.shape[0]}")
    if arr.size and arr.min() < 0:
        raise ValueError("labels must be non-negative")
    if k is not None and arr.size and arr.max() >= k:
        raise ValueError(f"labels must lie in [0, {k})")
    return arr


def check_hypergraph(X, n: int | None = None, d: int | None = None) -> Hypergraph:
    """Accept a :class:`Hypergraph` or an ``(m, d)`` edge array.

    A bare edge array needs ``n``; ``d`` defaults to its column count.
    """
    if isinstance(X, Hypergraph):
        if d is not None and X.d != d:
            raise ValueError(f"expected order d={d}, got {X.d}")
        return X
    edges = np.asarray(X)
    if edges.ndim != 2:
        raise ValueError("expected a Hypergraph or an (m, d) array of node ids")
    if n is None:
        raise ValueError("n is required when passing a bare edge array")
    return Hypergraph(n, edges.shape[1] if d is None else d, edges)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
