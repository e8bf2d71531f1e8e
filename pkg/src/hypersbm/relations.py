"""Community relations of d-uniform hyperedges.

A relation is the sorted label histogram of the d nodes of a hyperedge.
Relations are indexed from 1 (most concentrated, ``(d, 0, ..., 0)``) to
``kappa`` (least concentrated) along a linear extension of majorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb, prod
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Histogram = Tuple[int, ...]
Pair = Tuple[int, int]

__all__ = [
    "RelationTable",
    "ConfusionCoefficients",
    "histogram",
    "majorizes",
    "enumerate_relations",
    "relation_of",
    "relation_codes",
    "neighbor_pairs",
    "confusion_coefficients",
    "directional_counts",
    "subset_counts",
    "balanced_sizes",
]


def histogram(labels: Iterable[int], d: int | None = None) -> Histogram:
    """Sorted (descending) label histogram, zero-padded to length ``d``."""
    labels = list(labels)
    d = len(labels) if d is None else d
    counts: Dict[int, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    parts = sorted(counts.values(), reverse=True)
    return tuple(parts + [0] * (d - len(parts)))


def majorizes(a: Sequence[int], b: Sequence[int]) -> bool:
    """True if ``a`` majorizes ``b`` (prefix sums of the sorted vectors dominate)."""
    if sum(a) != sum(b):
        return False
    sa = np.cumsum(sorted(a, reverse=True))
    sb = np.cumsum(sorted(b, reverse=True))
    return bool(np.all(sa >= sb))


def _partitions(d: int, max_parts: int, largest: int | None = None):
    largest = d if largest is None else largest
    if d == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(d, largest), 0, -1):
        for rest in _partitions(d - first, max_parts - 1, first):
            yield (first,) + rest


@dataclass(frozen=True)
class RelationTable:
    """Catalogue of the relations achievable by label tuples in ``[k]^d``.

    Attributes
    ----------
    d, k : int
        Hyperedge order and number of communities.
    histograms : tuple of Histogram
        Relations in majorization-respecting order; ``histograms[i - 1]`` is
        relation ``i``.
    index : dict
        Inverse map histogram -> 1-based relation index.
    """

    d: int
    k: int
    histograms: Tuple[Histogram, ...]
    index: Mapping[Histogram, int] = field(repr=False)

    @property
    def kappa(self) -> int:
        return len(self.histograms)

    def __len__(self) -> int:
        return len(self.histograms)

    def __getitem__(self, i: int) -> Histogram:
        return self.histograms[i - 1]

    @property
    def _codes(self) -> np.ndarray:
        # base-(d+1) encoding of every histogram, aligned with relation order
        return np.array([_encode(h, self.d) for h in self.histograms], dtype=np.int64)


def _encode(h: Sequence[int], d: int) -> int:
    code = 0
    for part in h:
        code = code * (d + 1) + int(part)
    return code


def enumerate_relations(d: int, k: int) -> RelationTable:
    """Enumerate the relations of a ``(d, k)`` hypergraph SBM.

    Histograms are integer partitions of ``d`` into at most ``min(d, k)``
    parts, sorted lexicographically descending. That order is a linear
    extension of majorization (strict majorization implies a lexicographically
    larger histogram), and it breaks the ties between incomparable partitions
    that appear from ``d = 6`` on.

    Examples
    --------
    >>> enumerate_relations(4, 4).histograms
    ((4, 0, 0, 0), (3, 1, 0, 0), (2, 2, 0, 0), (2, 1, 1, 0), (1, 1, 1, 1))
    """
    if d < 2 or k < 2:
        raise ValueError(f"need d >= 2 and k >= 2, got d={d}, k={k}")
    hists = sorted(
        (p + (0,) * (d - len(p)) for p in _partitions(d, min(d, k))), reverse=True
    )
    hists = tuple(hists)
    return RelationTable(d, k, hists, {h: i + 1 for i, h in enumerate(hists)})


def relation_of(labels: Sequence[int], table: RelationTable) -> int:
    """1-based relation index of a d-tuple of labels in ``{0, ..., k-1}``."""
    if len(labels) != table.d:
        raise ValueError(f"expected {table.d} labels, got {len(labels)}")
    for lab in labels:
        if not 0 <= lab < table.k:
            raise ValueError(f"label {lab} outside [0, {table.k})")
    return table.index[histogram(labels, table.d)]


def relation_codes(labels: np.ndarray, table: RelationTable) -> np.ndarray:
    """Vectorized :func:`relation_of` over the rows of an ``(m, d)`` label array.

    Returns 0-based relation positions (``relation index - 1``) so the result
    can index probability arrays directly.
    """
    labels = np.asarray(labels)
    d, k = table.d, table.k
    if labels.size == 0:
        return np.zeros(labels.shape[0] if labels.ndim == 2 else 0, dtype=np.intp)
    counts = np.zeros((labels.shape[0], k), dtype=np.int64)
    rows = np.arange(labels.shape[0])
    for j in range(d):
        np.add.at(counts, (rows, labels[:, j]), 1)
    counts = -np.sort(-counts, axis=1)
    if k < d:
        counts = np.hstack([counts, np.zeros((counts.shape[0], d - k), np.int64)])
    else:
        counts = counts[:, :d]
    weights = (d + 1) ** np.arange(d - 1, -1, -1, dtype=np.int64)
    codes = counts @ weights
    ref = table._codes
    order = np.argsort(ref)
    pos = np.searchsorted(ref[order], codes)
    return order[pos]


def _neighbors_of(h: Histogram, k: int) -> set:
    parts = [x for x in h if x > 0]
    if len(parts) < k:
        parts.append(0)
    out = set()
    for x in range(len(parts)):
        if parts[x] == 0:
            continue
        for y in range(len(parts)):
            if y == x:
                continue
            moved = list(parts)
            moved[x] -= 1
            moved[y] += 1
            out.add(tuple(sorted((v for v in moved if v > 0), reverse=True)))
    return out


def neighbor_pairs(d: int, k: int, table: RelationTable | None = None) -> frozenset:
    """Relation pairs that a single relabelled node can turn into one another.

    Moving one node from one community to another moves one unit between two
    parts of the histogram (possibly into an empty part when fewer than ``k``
    communities are present).

    Returns
    -------
    frozenset of (i, j)
        1-based relation index pairs with ``i < j``.
    """
    table = enumerate_relations(d, k) if table is None else table
    if (table.d, table.k) != (d, k):
        raise ValueError("relation table does not match (d, k)")
    pairs = set()
    for h in table.histograms:
        i = table.index[h]
        for nb in _neighbors_of(h, k):
            j = table.index[nb + (0,) * (d - len(nb))]
            if i != j:
                pairs.add((min(i, j), max(i, j)))
    return frozenset(pairs)


@dataclass(frozen=True)
class ConfusionCoefficients:
    """Matched-pair counts ``m[(i, j)]`` for the confusing relation pairs.

    ``forward[(i, j)]`` counts contexts whose relation is ``i`` under the truth
    and ``j`` after the flip; ``backward[(i, j)]`` the reverse.
    """

    d: int
    k: int
    n: int
    m: Mapping[Pair, int]
    forward: Mapping[Pair, int] = field(default_factory=dict, repr=False)
    backward: Mapping[Pair, int] = field(default_factory=dict, repr=False)

    def __getitem__(self, pair: Pair) -> int:
        return self.m[pair]

    def total(self) -> int:
        return int(sum(self.m.values()))


def balanced_sizes(n: int, k: int) -> Tuple[int, ...]:
    """Community sizes ``floor(n/k)`` with the remainder on the lowest labels."""
    base, extra = divmod(n, k)
    return tuple(base + (1 if t < extra else 0) for t in range(k))


def subset_counts(sizes: Sequence[int], size: int, k: int, fixed: Sequence[int] = ()):
    """Count subsets by label composition.

    Enumerates the multisets of ``size`` labels drawn from communities with
    the given ``sizes`` and yields ``(composition, count)`` where
    ``composition[t]`` includes the labels in ``fixed`` and ``count`` is the
    number of node subsets realizing it.
    """
    for combo in combinations_with_replacement(range(k), size):
        comp = [0] * k
        for t in combo:
            comp[t] += 1
        weight = prod(comb(sizes[t], comp[t]) for t in range(k))
        if weight == 0:
            continue
        for t in fixed:
            comp[t] += 1
        yield comp, weight


def _hist_of_composition(comp: Sequence[int], d: int) -> Histogram:
    parts = sorted((c for c in comp if c > 0), reverse=True)
    return tuple(parts + [0] * (d - len(parts)))


def directional_counts(d: int, k: int, n: int, table: RelationTable | None = None):
    """Count flip transitions of a fixed node ``u`` in community 1 moved to 2.

    Returns a dict ``(a, b) -> count`` over 1-based relation indices: the
    number of (d-1)-subsets of the other nodes for which ``{u} + S`` has
    relation ``a`` under the balanced truth and ``b`` after the flip.
    """
    table = enumerate_relations(d, k) if table is None else table
    sizes = list(balanced_sizes(n, k))
    sizes[0] -= 1
    out: Dict[Pair, int] = {}
    for comp, weight in subset_counts(sizes, d - 1, k):
        truth = list(comp)
        truth[0] += 1
        flip = list(comp)
        flip[1] += 1
        a = table.index[_hist_of_composition(truth, d)]
        b = table.index[_hist_of_composition(flip, d)]
        out[(a, b)] = out.get((a, b), 0) + weight
    return out


def confusion_coefficients(
    d: int,
    k: int,
    n: int,
    table: RelationTable | None = None,
    pairs: Iterable[Pair] | None = None,
) -> ConfusionCoefficients:
    """Matched-pair counts for the confusing pairs on the balanced assignment.

    ``m[(i, j)] = min(count(i -> j), count(j -> i))`` where the counts refer to
    node 1 of community 1 relabelled into community 2.

    Examples
    --------
    >>> confusion_coefficients(2, 2, 10).m
    {(1, 2): 4}
    """
    if n < d * k:
        raise ValueError(f"need n >= d*k = {d * k}, got n={n}")
    table = enumerate_relations(d, k) if table is None else table
    pairs = neighbor_pairs(d, k, table) if pairs is None else pairs
    counts = directional_counts(d, k, n, table)
    fwd, bwd, m = {}, {}, {}
    for i, j in sorted(pairs):
        fwd[(i, j)] = counts.get((i, j), 0)
        bwd[(i, j)] = counts.get((j, i), 0)
        m[(i, j)] = min(fwd[(i, j)], bwd[(i, j)])
    return ConfusionCoefficients(d, k, n, m, fwd, bwd)
