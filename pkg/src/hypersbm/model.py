"""Hypergraph SBM parameters, assignments, sampling and text formats.

Labels are 0-based integers ``0..k-1`` and node ids are 0-based in memory;
both text formats are 1-based.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from os import PathLike
from typing import List, Sequence, Tuple, Union

import numpy as np

from ._random import uniforms
from .exceptions import BudgetExceededError, ParseError
from .relations import (
    RelationTable,
    _hist_of_composition,
    subset_counts,
    balanced_sizes,
    enumerate_relations,
    relation_codes,
    relation_of,
)

DEFAULT_ENUMERATION_BUDGET = 10**8

PathOrFile = Union[str, PathLike, io.TextIOBase]

__all__ = [
    "ModelParams",
    "Hypergraph",
    "validate_params",
    "balanced_assignment",
    "community_sizes",
    "in_parameter_space",
    "edge_probability",
    "colex_subsets",
    "sample_hypergraph",
    "expected_edge_count",
    "read_hypergraph",
    "write_hypergraph",
    "read_assignment",
    "write_assignment",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameters of a d-uniform hypergraph SBM.

    Parameters
    ----------
    n, k, d : int
        Number of nodes, communities and the hyperedge order.
    eta : float
        Balance slack: community sizes lie in ``[(1-eta) n', (1+eta) n']``
        with ``n' = n // k``.
    p : sequence of float
        Edge probability per relation, ``p[i - 1]`` for relation ``i``.
        Values must lie in ``[0, 1]``; the endpoints are accepted for test
        instances and flagged by :func:`validate_params`.
    """

    n: int
    k: int
    d: int
    eta: float
    p: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if self.d < 2 or self.k < 2:
            raise ValueError(f"need d >= 2 and k >= 2, got d={self.d}, k={self.k}")
        if self.n < self.k:
            raise ValueError(f"need n >= k, got n={self.n}, k={self.k}")
        if len(self.p) != self.table.kappa:
            raise ValueError(
                f"p has {len(self.p)} entries, (d={self.d}, k={self.k}) has "
                f"{self.table.kappa} relations"
            )
        if any(not 0.0 <= x <= 1.0 for x in self.p):
            raise ValueError(f"probabilities must lie in [0, 1], got {self.p}")

    @classmethod
    def from_scaled(cls, n, k, d, a, eta=0.5):
        """Build ``p = a / n**(d-1)`` from an a-vector."""
        scale = float(n) ** (d - 1)
        return cls(n, k, d, eta, tuple(float(x) / scale for x in a))

    @cached_property
    def table(self) -> RelationTable:
        return enumerate_relations(self.d, self.k)

    @property
    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)

    def with_n(self, n: int) -> "ModelParams":
        return ModelParams(n, self.k, self.d, self.eta, self.p)


def validate_params(params: ModelParams, strict_monotone: bool = False) -> List[str]:
    """Diagnose a parameter set without raising.

    Returns a list of human-readable violations; empty means valid.
    """
    problems = []
    for i, x in enumerate(params.p, start=1):
        if not 0.0 < x < 1.0:
            problems.append(f"probability outside (0,1): p_{i} = {x}")
    n_prime = params.n // params.k
    if params.eta < 1.0 / n_prime:
        problems.append(f"eta = {params.eta} below 1/n' = {1.0 / n_prime:.6g}")
    if strict_monotone:
        for i in range(len(params.p) - 1):
            if params.p[i] < params.p[i + 1]:
                problems.append(
                    f"monotonicity: p_{i + 1} = {params.p[i]} < p_{i + 2} = {params.p[i + 1]}"
                )
    return problems


def balanced_assignment(n: int, k: int) -> np.ndarray:
    """Canonical balanced labeling: node ``v`` gets label ``v mod k``.

    Community sizes are ``n // k`` or ``n // k + 1``, the extra nodes going to
    the lowest labels.
    """
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    return np.arange(n, dtype=np.intp) % k


def community_sizes(labels: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(np.asarray(labels, dtype=np.intp), minlength=k)


def in_parameter_space(labels: np.ndarray, k: int, eta: float) -> bool:
    """True if every community size lies in ``[(1-eta) n', (1+eta) n']``."""
    sizes = community_sizes(labels, k)
    n_prime = len(labels) // k
    return bool(np.all((sizes >= (1 - eta) * n_prime) & (sizes <= (1 + eta) * n_prime)))


def edge_probability(nodes: Sequence[int], labels, params: ModelParams) -> float:
    """Probability that the hyperedge on ``nodes`` is present."""
    if len(set(nodes)) != len(nodes):
        raise ValueError(f"hyperedge nodes must be distinct, got {tuple(nodes)}")
    if len(nodes) != params.d:
        raise ValueError(f"expected {params.d} nodes, got {len(nodes)}")
    r = relation_of([int(labels[v]) for v in nodes], params.table)
    return params.p[r - 1]


@dataclass(frozen=True)
class Hypergraph:
    """A d-uniform hypergraph on nodes ``0..n-1``.

    ``edges`` is an ``(m, d)`` integer array; rows are strictly increasing,
    unique and sorted lexicographically.
    """

    n: int
    d: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64)
        if e.size == 0:
            e = np.zeros((0, self.d), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != self.d:
            raise ValueError(f"edges must have shape (m, {self.d}), got {e.shape}")
        e = np.sort(e, axis=1)
        if e.shape[0]:
            if e.min() < 0 or e.max() >= self.n:
                raise ValueError(f"node ids must lie in [0, {self.n})")
            if self.d > 1 and np.any(e[:, 1:] == e[:, :-1]):
                raise ValueError("hyperedges must have distinct nodes")
            e = np.unique(e, axis=0)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.edges, other.edges)
        )

    def __hash__(self):
        return hash((self.n, self.d, self.edges.tobytes()))

    def incidence(self):
        """Sparse node-by-edge incidence matrix ``H`` (CSR, int64)."""
        from scipy import sparse

        m = self.n_edges
        rows = self.edges.ravel()
        cols = np.repeat(np.arange(m), self.d)
        return sparse.csr_matrix(
            (np.ones(m * self.d, dtype=np.int64), (rows, cols)), shape=(self.n, m)
        )


def colex_subsets(n: int, d: int) -> np.ndarray:
    """All d-subsets of ``range(n)`` as sorted rows, in colexicographic order.

    Row ``r`` is the subset of colex rank ``r``, i.e. the rank of
    ``c_1 < ... < c_d`` is ``sum_i C(c_i, i)``.
    """
    rows = np.arange(n, dtype=np.int64).reshape(-1, 1)
    for size in range(2, d + 1):
        blocks = []
        for top in range(size - 1, n):
            head = rows[: comb(top, size - 1)]
            blocks.append(np.hstack([head, np.full((head.shape[0], 1), top, np.int64)]))
        rows = np.vstack(blocks) if blocks else np.zeros((0, size), np.int64)
    return rows


def _check_budget(n: int, d: int, budget: int) -> int:
    total = comb(n, d)
    if total > budget:
        raise BudgetExceededError(
            f"C({n}, {d}) = {total} subsets exceeds the enumeration budget {budget}"
        )
    return total


def _iter_colex_blocks(n: int, d: int):
    # yields (first colex rank, block of subsets) grouped by largest element
    heads = colex_subsets(n - 1, d - 1) if d > 1 else None
    for top in range(d - 1, n):
        count = comb(top, d - 1)
        block = np.hstack([heads[:count], np.full((count, 1), top, np.int64)])
        yield comb(top, d), block


def sample_hypergraph(
    params: ModelParams,
    labels,
    seed: int,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Hypergraph:
    """Draw one hypergraph with an independent Bernoulli per d-subset.

    The subset of colex rank ``r`` is present iff ``uniforms(seed, r) < p``
    for its relation, so the result depends only on ``(params, labels,
    seed)`` and not on enumeration chunking.
    """
    labels = np.asarray(labels, dtype=np.intp)
    if labels.shape != (params.n,):
        raise ValueError(f"labels must have length n={params.n}")
    if labels.min() < 0 or labels.max() >= params.k:
        raise ValueError(f"labels must lie in [0, {params.k})")
    _check_budget(params.n, params.d, budget)
    p = params.p_array
    table = params.table
    kept = []
    for start, block in _iter_colex_blocks(params.n, params.d):
        probs = p[relation_codes(labels[block], table)]
        u = uniforms(seed, np.arange(start, start + block.shape[0], dtype=np.uint64))
        kept.append(block[u < probs])
    edges = np.vstack(kept) if kept else np.zeros((0, params.d), np.int64)
    return Hypergraph(params.n, params.d, edges)


def expected_edge_count(params: ModelParams, labels) -> float:
    """Exact expected number of hyperedges, summed over relation counts."""
    sizes = community_sizes(labels, params.k)
    total = 0.0
    for comp, weight in subset_counts(sizes, params.d, params.k):
        r = params.table.index[_hist_of_composition(comp, params.d)]
        total += weight * params.p[r - 1]
    return total


def _open(target: PathOrFile, mode: str):
    if isinstance(target, io.TextIOBase) or hasattr(target, "write" if "w" in mode else "read"):
        return target, False
    return open(target, mode, encoding="ascii", newline="\n"), True


def write_hypergraph(h: Hypergraph, target: PathOrFile) -> None:
    """Write the ``HSBM <d> <n> <m>`` text format (1-based ids)."""
    fh, close = _open(target, "w")
    try:
        fh.write(f"HSBM {h.d} {h.n} {h.n_edges}\n")
        for row in h.edges + 1:
            fh.write(" ".join(map(str, row.tolist())) + "\n")
    finally:
        if close:
            fh.close()


def _int_fields(line: str, lineno: int, count: int | None = None) -> List[int]:
    parts = line.split()
    if count is not None and len(parts) != count:
        raise ParseError(f"expected {count} fields, got {len(parts)}", lineno)
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise ParseError(f"non-integer field in {line.strip()!r}", lineno) from None


def read_hypergraph(source: PathOrFile) -> Hypergraph:
    fh, close = _open(source, "r")
    try:
        lines = fh.read().splitlines()
    finally:
        if close:
            fh.close()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "HSBM":
        raise ParseError("header must be 'HSBM <d> <n> <edge_count>'", 1)
    d, n, m = _int_fields(" ".join(head[1:]), 1, 3)
    body = [ln for ln in lines[1:]]
    if len(body) != m:
        raise ParseError(f"header announces {m} edges, found {len(body)}", 1)
    edges = np.zeros((m, d), dtype=np.int64)
    prev = None
    for i, line in enumerate(body):
        lineno = i + 2
        row = _int_fields(line, lineno, d)
        if any(not 1 <= v <= n for v in row):
            raise ParseError(f"node id outside [1, {n}]", lineno)
        if any(a >= b for a, b in zip(row, row[1:])):
            raise ParseError("node ids must be strictly increasing", lineno)
        if prev is not None and row <= prev:
            raise ParseError("edges must be unique and sorted lexicographically", lineno)
        prev = row
        edges[i] = row
    return Hypergraph(n, d, edges - 1)


def write_assignment(labels, k: int, target: PathOrFile) -> None:
    """Write the ``LABELS <n> <k>`` text format (1-based labels)."""
    labels = np.asarray(labels)
    fh, close = _open(target, "w")
    try:
        fh.write(f"LABELS {labels.shape[0]} {k}\n")
        for lab in labels.tolist():
            fh.write(f"{lab + 1}\n")
    finally:
        if close:
            fh.close()


def read_assignment(source: PathOrFile) -> Tuple[np.ndarray, int]:
    """Read a labeling; returns ``(labels, k)`` with 0-based labels."""
    fh, close = _open(source, "r")
    try:
        lines = fh.read().splitlines()
    finally:
        if close:
            fh.close()
    if not lines:
        raise ParseError("empty file", 1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != "LABELS":
        raise ParseError("header must be 'LABELS <n> <k>'", 1)
    n, k = _int_fields(" ".join(head[1:]), 1, 2)
    if len(lines) - 1 != n:
        raise ParseError(f"header announces {n} labels, found {len(lines) - 1}", 1)
    labels = np.zeros(n, dtype=np.intp)
    for i, line in enumerate(lines[1:]):
        (lab,) = _int_fields(line, i + 2, 1)
        if not 1 <= lab <= k:
            raise ParseError(f"label {lab} outside [1, {k}]", i + 2)
        labels[i] = lab - 1
    return labels, k
