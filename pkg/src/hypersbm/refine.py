"""Local maximum-likelihood refinement and consensus.

``detect`` runs spectral initialization, estimates the relation
probabilities by sample means, and relabels each node by maximizing its
local log-likelihood. In ``"full"`` mode the initialization is repeated on
every leave-one-out hypergraph and the ``n`` resulting labelings are merged
by consensus; ``"simplified"`` mode initializes once and refines all nodes
against that frozen labeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Tuple

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClusterMixin

from ._validation import check_hypergraph, check_labels, check_positive_int
from .model import Hypergraph, community_sizes
from .relations import (
    RelationTable,
    _hist_of_composition,
    enumerate_relations,
    relation_codes,
    subset_counts,
)
from .spectral import DEFAULT_MU, DEFAULT_TAU_FACTOR, DEFAULT_TOL, spectral_init

MODES = ("simplified", "full")
_TIE_RTOL = 1e-12

__all__ = [
    "EstimatedParams",
    "default_eps",
    "estimate_params",
    "log_likelihood",
    "local_log_likelihood",
    "local_likelihood_table",
    "local_mle",
    "refine_labels",
    "hypergraph_minus_node",
    "consensus",
    "detect",
    "HypergraphSBMDetector",
]


def default_eps(n: int, d: int) -> float:
    """Probability floor ``1 / (2 n^(d-1))``."""
    return 1.0 / (2.0 * float(n) ** (d - 1))


@dataclass(frozen=True)
class EstimatedParams:
    """Sample-mean relation probabilities.

    ``p_hat[i - 1]`` estimates relation ``i`` from ``present[i - 1]`` edges
    among ``total[i - 1]`` candidate subsets, clamped to ``[eps, 1 - eps]``.
    """

    p_hat: np.ndarray
    present: np.ndarray
    total: np.ndarray
    eps: float

    @property
    def p(self) -> np.ndarray:
        return self.p_hat


def _relation_totals(sizes, d: int, k: int, table: RelationTable) -> np.ndarray:
    totals = np.zeros(table.kappa, dtype=np.int64)
    for comp, weight in subset_counts(sizes, d, k):
        totals[table.index[_hist_of_composition(comp, d)] - 1] += weight
    return totals


def estimate_params(
    h: Hypergraph,
    labels,
    table: RelationTable,
    eps: float | None = None,
) -> EstimatedParams:
    """Estimate every relation probability by its sample mean.

    Relations with no candidate subset under ``labels`` fall back to the
    global edge density.
    """
    labels = check_labels(labels, n=h.n, k=table.k)
    eps = default_eps(h.n, h.d) if eps is None else float(eps)
    present = np.bincount(
        relation_codes(labels[h.edges], table), minlength=table.kappa
    ).astype(np.int64)
    total = _relation_totals(community_sizes(labels, table.k), h.d, table.k, table)
    n_subsets = comb(h.n, h.d)
    density = h.n_edges / n_subsets if n_subsets else 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        p_hat = np.where(total > 0, present / np.maximum(total, 1), density)
    p_hat = np.clip(p_hat, eps, 1.0 - eps)
    return EstimatedParams(p_hat, present, total, eps)


def _as_probs(params) -> np.ndarray:
    p = getattr(params, "p", params)
    return np.asarray(p, dtype=float)


def _log_terms(p: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore"):
        return np.log(p), np.log1p(-p)


def _context_totals(labels: np.ndarray, k: int, table: RelationTable) -> np.ndarray:
    """``T[s, t, r]``: contexts of a node with label ``s`` relabelled ``t``.

    Counts the (d-1)-subsets of the other nodes whose union with the node has
    relation ``r`` when the node carries label ``t``.
    """
    d = table.d
    sizes = community_sizes(labels, k)
    T = np.zeros((k, k, table.kappa), dtype=np.int64)
    for s in range(k):
        if sizes[s] == 0:
            continue
        others = sizes.copy()
        others[s] -= 1
        for t in range(k):
            for comp, weight in subset_counts(others, d - 1, k, fixed=(t,)):
                T[s, t, table.index[_hist_of_composition(comp, d)] - 1] += weight
    return T


def _incident_counts(h: Hypergraph, labels: np.ndarray, k: int, table: RelationTable) -> np.ndarray:
    """``P[v, t, r]``: present edges at ``v`` with relation ``r`` if ``v`` had label ``t``."""
    P = np.zeros((h.n, k, table.kappa), dtype=np.int64)
    if h.n_edges == 0:
        return P
    edge_labels = labels[h.edges]
    for j in range(h.d):
        nodes = h.edges[:, j]
        for t in range(k):
            swapped = edge_labels.copy()
            swapped[:, j] = t
            r = relation_codes(swapped, table)
            np.add.at(P, (nodes, t, r), 1)
    return P


def local_likelihood_table(h: Hypergraph, labels, params, table: RelationTable) -> np.ndarray:
    """``L[u, t]``: local log-likelihood of node ``u`` relabelled to ``t``.

    Absent-edge terms come from per-relation context counts minus the
    present ones, so the cost is linear in the number of edges.
    """
    labels = check_labels(labels, n=h.n, k=table.k)
    k = table.k
    log_p, log_q = _log_terms(_as_probs(params))
    P = _incident_counts(h, labels, k, table)
    T = _context_totals(labels, k, table)[labels]
    return P @ log_p + (T - P) @ log_q


def local_log_likelihood(h: Hypergraph, labels, u: int, t: int, params, table: RelationTable) -> float:
    """Log-likelihood of the subsets containing ``u`` when ``u`` has label ``t``."""
    labels = check_labels(labels, n=h.n, k=table.k)
    if not 0 <= u < h.n:
        raise ValueError(f"node {u} outside [0, {h.n})")
    if not 0 <= t < table.k:
        raise ValueError(f"label {t} outside [0, {table.k})")
    log_p, log_q = _log_terms(_as_probs(params))
    mine = h.edges[np.any(h.edges == u, axis=1)]
    relabeled = labels.copy()
    relabeled[u] = t
    present = np.bincount(relation_codes(relabeled[mine], table), minlength=table.kappa)
    others = community_sizes(labels, table.k)
    others[labels[u]] -= 1
    totals = np.zeros(table.kappa, dtype=np.int64)
    for comp, weight in subset_counts(others, h.d - 1, table.k, fixed=(t,)):
        totals[table.index[_hist_of_composition(comp, h.d)] - 1] += weight
    return float(present @ log_p + (totals - present) @ log_q)


def log_likelihood(h: Hypergraph, labels, params, table: RelationTable) -> float:
    """Global log-likelihood of the hypergraph under ``labels``."""
    labels = check_labels(labels, n=h.n, k=table.k)
    log_p, log_q = _log_terms(_as_probs(params))
    present = np.bincount(relation_codes(labels[h.edges], table), minlength=table.kappa)
    total = _relation_totals(community_sizes(labels, table.k), h.d, table.k, table)
    return float(present @ log_p + (total - present) @ log_q)


def _pick(values: np.ndarray, current: int) -> int:
    best = values.max()
    tied = np.flatnonzero(values >= best - _TIE_RTOL * max(1.0, abs(best)))
    return int(current) if current in tied else int(tied[0])


def local_mle(h: Hypergraph, labels, u: int, params, table: RelationTable) -> int:
    """Label maximizing the local log-likelihood of ``u``.

    Ties (up to a relative 1e-12) keep the current label, then the lowest.
    """
    labels = check_labels(labels, n=h.n, k=table.k)
    values = np.array(
        [local_log_likelihood(h, labels, u, t, params, table) for t in range(table.k)]
    )
    return _pick(values, labels[u])


def refine_labels(h: Hypergraph, labels, params, table: RelationTable) -> np.ndarray:
    """One synchronous local-MLE sweep: every node against the frozen ``labels``."""
    labels = check_labels(labels, n=h.n, k=table.k)
    L = local_likelihood_table(h, labels, params, table)
    return np.array([_pick(L[u], labels[u]) for u in range(h.n)], dtype=np.intp)


def hypergraph_minus_node(h: Hypergraph, u: int) -> Tuple[Hypergraph, np.ndarray]:
    """Drop node ``u`` and its edges, compacting ids in order.

    Returns the sub-hypergraph and ``ids`` with ``ids[new] = old``.
    """
    if not 0 <= u < h.n:
        raise ValueError(f"node {u} outside [0, {h.n})")
    ids = np.delete(np.arange(h.n), u)
    keep = ~np.any(h.edges == u, axis=1)
    edges = h.edges[keep]
    edges = edges - (edges > u)
    return Hypergraph(h.n - 1, h.d, edges), ids


def consensus(assignments, k: int | None = None) -> np.ndarray:
    """Merge ``n`` labelings into one by majority neighbor voting.

    Row ``u`` of ``assignments`` is the labeling produced for node ``u``.
    Node 0 keeps its label from row 0; node ``u`` gets the label ``t`` whose
    class in row 0 overlaps most with ``u``'s own class in row ``u`` (ties to
    the lowest ``t``).
    """
    S = np.asarray(assignments, dtype=np.intp)
    n = S.shape[0]
    if S.shape != (n, n):
        raise ValueError(f"expected an (n, n) array of labelings, got {S.shape}")
    if n == 0:
        return np.zeros(0, dtype=np.intp)
    k = int(S.max()) + 1 if k is None else k
    out = np.empty(n, dtype=np.intp)
    out[0] = S[0, 0]
    for u in range(1, n):
        same = S[u] == S[u, u]
        out[u] = int(np.argmax(np.bincount(S[0, same], minlength=k)))
    return out


def _leave_one_out(h, u, k, mu, tau_factor, tol, eps, table):
    sub, ids = hypergraph_minus_node(h, u)
    init = spectral_init(sub, k, mu, tau_factor, tol)
    est = estimate_params(sub, init, table, eps)
    labels = np.zeros(h.n, dtype=np.intp)
    labels[ids] = init
    values = np.array(
        [local_log_likelihood(h, labels, u, t, est, table) for t in range(k)]
    )
    best = values.max()
    labels[u] = int(np.flatnonzero(values >= best - _TIE_RTOL * max(1.0, abs(best)))[0])
    return labels


def detect(
    h: Hypergraph,
    k: int,
    mode: str = "simplified",
    mu: float = DEFAULT_MU,
    tau_factor: float = DEFAULT_TAU_FACTOR,
    eps: float | None = None,
    tol: float = DEFAULT_TOL,
    n_jobs: int | None = None,
) -> np.ndarray:
    """Two-step community detection; returns 0-based labels."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    table = enumerate_relations(h.d, k)
    if mode == "simplified":
        init = spectral_init(h, k, mu, tau_factor, tol)
        est = estimate_params(h, init, table, eps)
        return refine_labels(h, init, est, table)
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_leave_one_out)(h, u, k, mu, tau_factor, tol, eps, table) for u in range(h.n)
    )
    return consensus(np.vstack(rows), k)


class HypergraphSBMDetector(ClusterMixin, BaseEstimator):
    """Community detection in a d-uniform hypergraph SBM.

    Spectral initialization followed by local maximum-likelihood refinement
    with unknown relation probabilities.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of communities ``k``.
    mode : {"simplified", "full"}, default="simplified"
        ``"full"`` repeats the initialization on every leave-one-out
        hypergraph and merges the results by consensus.
    mu, tau_factor, tol
        Forwarded to the spectral initialization.
    eps_clamp : float or None, default=None
        Probability floor; ``None`` uses ``1 / (2 n^(d-1))``.
    n_jobs : int or None, default=None
        joblib parallelism for the leave-one-out loop.

    Attributes
    ----------
    labels_ : ndarray of shape (n,)
    init_labels_ : ndarray of shape (n,)
        Spectral initialization on the whole hypergraph.
    params_ : EstimatedParams
        Estimates under ``init_labels_``.
    """

    def __init__(
        self,
        n_clusters=2,
        mode="simplified",
        mu=DEFAULT_MU,
        tau_factor=DEFAULT_TAU_FACTOR,
        eps_clamp=None,
        tol=DEFAULT_TOL,
        n_jobs=None,
    ):
        self.n_clusters = n_clusters
        self.mode = mode
        self.mu = mu
        self.tau_factor = tau_factor
        self.eps_clamp = eps_clamp
        self.tol = tol
        self.n_jobs = n_jobs

    def fit(self, X, y=None, n=None):
        h = check_hypergraph(X, n=n)
        k = check_positive_int(self.n_clusters, "n_clusters", 2)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        table = enumerate_relations(h.d, k)
        self.init_labels_ = spectral_init(h, k, self.mu, self.tau_factor, self.tol)
        self.params_ = estimate_params(h, self.init_labels_, table, self.eps_clamp)
        if self.mode == "simplified":
            self.labels_ = refine_labels(h, self.init_labels_, self.params_, table)
        else:
            self.labels_ = detect(
                h, k, "full", self.mu, self.tau_factor, self.eps_clamp, self.tol, self.n_jobs
            )
        return self
