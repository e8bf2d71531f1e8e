"""Spectral initialization on the trimmed hypergraph co-degree matrix.

The co-degree matrix ``H H^T - D`` has entry ``(u, v)`` equal to the number
of hyperedges containing both ``u`` and ``v``. High-degree nodes are trimmed
by deleting every hyperedge that touches them, the ``k`` leading singular
vectors are extracted, and rows are clustered by greedy ball covering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, ClusterMixin

from ._validation import check_hypergraph, check_positive_int
from .exceptions import ConvergenceError
from .model import Hypergraph

DEFAULT_MU = 0.5
DEFAULT_TAU_FACTOR = 3.0
DEFAULT_TOL = 1e-8

__all__ = [
    "SpectralEmbedding",
    "TrimReport",
    "laplacian",
    "degrees",
    "trim",
    "top_k_subspace",
    "ball_cover_cluster",
    "spectral_init",
    "HypergraphSpectralClustering",
]


@dataclass(frozen=True)
class SpectralEmbedding:
    """Leading singular subspace of a symmetric matrix.

    ``vectors`` is ``(n, k)`` with orthonormal columns; row ``u`` embeds node
    ``u``. ``values`` are the singular values in non-increasing order and
    ``eigenvalues`` the signed eigenvalues they came from.
    """

    vectors: np.ndarray
    values: np.ndarray
    eigenvalues: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class TrimReport:
    threshold: float
    trimmed: Tuple[int, ...]
    mean_degree: float


def degrees(h: Hypergraph) -> Tuple[np.ndarray, float]:
    """Per-node degree and the mean degree."""
    deg = np.bincount(h.edges.ravel(), minlength=h.n).astype(np.int64)
    return deg, float(deg.sum()) / h.n if h.n else 0.0


def laplacian(h: Hypergraph) -> np.ndarray:
    """Dense co-degree matrix ``H H^T - D`` (symmetric, zero diagonal)."""
    if h.n_edges == 0:
        return np.zeros((h.n, h.n), dtype=np.int64)
    H = h.incidence()
    L = (H @ H.T).toarray()
    np.fill_diagonal(L, 0)
    return L


def trim(h: Hypergraph, tau: float) -> Tuple[Hypergraph, TrimReport]:
    """Remove every hyperedge incident to a node of degree ``>= tau``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    deg, mean = degrees(h)
    heavy = deg >= tau
    keep = ~heavy[h.edges].any(axis=1) if h.n_edges else np.zeros(0, bool)
    report = TrimReport(float(tau), tuple(np.flatnonzero(heavy).tolist()), mean)
    return Hypergraph(h.n, h.d, h.edges[keep]), report


def _apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        nz = np.flatnonzero(np.abs(out[:, j]) > 1e-12)
        if nz.size and out[nz[0], j] < 0:
            out[:, j] = -out[:, j]
    return out


def top_k_subspace(matrix, k: int, tol: float = DEFAULT_TOL) -> SpectralEmbedding:
    """Top-``k`` singular vectors of a symmetric matrix.

    For a symmetric matrix these are the eigenvectors of the ``k`` largest
    eigenvalues in absolute value. Every column must satisfy
    ``||M v - lambda v|| <= tol * ||M||_F``.

    Raises
    ------
    ConvergenceError
        If some column misses the residual tolerance.
    """
    M = np.asarray(matrix, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {M.shape}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not np.allclose(M, M.T):
        raise ValueError("matrix must be symmetric")
    evals, evecs = np.linalg.eigh(M)
    # ties in |lambda| keep the larger signed eigenvalue first
    order = np.lexsort((-evals, -np.abs(evals)))[:k]
    lam = evals[order]
    vecs = _apply_sign_convention(evecs[:, order])
    residuals = np.linalg.norm(M @ vecs - vecs * lam, axis=0)
    bound = tol * np.linalg.norm(M)
    if np.any(residuals > bound):
        raise ConvergenceError(
            f"eigen-solver residual {residuals.max():.3e} exceeds {bound:.3e}",
            residual=float(residuals.max()),
        )
    return SpectralEmbedding(vecs, np.abs(lam), lam, residuals)


def ball_cover_cluster(embedding, k: int, mu: float = DEFAULT_MU) -> np.ndarray:
    """Greedy ball covering of embedding rows with radius ``mu * sqrt(k / n)``.

    For ``t = 1..k`` the remaining node whose open ball covers the most
    remaining nodes becomes a center (ties to the lowest id) and its ball
    becomes cluster ``t``. Leftover nodes join the non-empty cluster with the
    smallest mean distance (ties to the lowest label).
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    U = embedding.vectors if isinstance(embedding, SpectralEmbedding) else np.asarray(embedding, float)
    n = U.shape[0]
    radius = mu * np.sqrt(k / n)
    dist = cdist(U, U)
    close = dist < radius
    labels = np.full(n, -1, dtype=np.intp)
    remaining = np.ones(n, dtype=bool)
    for t in range(k):
        if not remaining.any():
            break
        cover = close[:, remaining].sum(axis=1)
        cover[~remaining] = -1
        center = int(np.argmax(cover))
        members = remaining & close[center]
        labels[members] = t
        remaining &= ~members
    left = np.flatnonzero(remaining)
    if left.size:
        used = [t for t in range(k) if np.any(labels == t)]
        means = np.column_stack([dist[np.ix_(left, np.flatnonzero(labels == t))].mean(axis=1) for t in used])
        labels[left] = np.asarray(used)[np.argmin(means, axis=1)]
    return labels


def spectral_init(
    h: Hypergraph,
    k: int,
    mu: float = DEFAULT_MU,
    tau_factor: float = DEFAULT_TAU_FACTOR,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Cluster nodes from the trimmed co-degree matrix.

    Uses ``tau = tau_factor * mean_degree``. A hypergraph without edges gets
    the all-zeros labeling.
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    _, mean = degrees(h)
    if mean == 0:
        return np.zeros(h.n, dtype=np.intp)
    trimmed, _ = trim(h, tau_factor * mean)
    emb = top_k_subspace(laplacian(trimmed), min(k, h.n), tol)
    return ball_cover_cluster(emb, k, mu)


class HypergraphSpectralClustering(ClusterMixin, BaseEstimator):
    """Spectral clustering of a d-uniform hypergraph.

    Parameters
    ----------
    n_clusters : int, default=2
    mu : float, default=0.5
        Ball radius factor; the radius is ``mu * sqrt(n_clusters / n)``.
    tau_factor : float, default=3.0
        Trimming threshold as a multiple of the mean degree.
    tol : float, default=1e-8
        Relative residual tolerance of the eigen-solver.

    Attributes
    ----------
    labels_ : ndarray of shape (n,)
    embedding_ : SpectralEmbedding or None
        ``None`` when the hypergraph has no edges.
    trim_report_ : TrimReport or None
    """

    def __init__(self, n_clusters=2, mu=DEFAULT_MU, tau_factor=DEFAULT_TAU_FACTOR, tol=DEFAULT_TOL):
        self.n_clusters = n_clusters
        self.mu = mu
        self.tau_factor = tau_factor
        self.tol = tol

    def fit(self, X, y=None, n=None):
        h = check_hypergraph(X, n=n)
        k = check_positive_int(self.n_clusters, "n_clusters", 2)
        _, mean = degrees(h)
        self.embedding_ = None
        self.trim_report_ = None
        if mean == 0:
            self.labels_ = np.zeros(h.n, dtype=np.intp)
            return self
        trimmed, self.trim_report_ = trim(h, self.tau_factor * mean)
        self.embedding_ = top_k_subspace(laplacian(trimmed), min(k, h.n), self.tol)
        self.labels_ = ball_cover_cluster(self.embedding_, k, self.mu)
        return self
