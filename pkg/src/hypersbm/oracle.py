"""Brute-force references for testing.

Nothing here reuses the relation, likelihood or matching helpers of the
modules it checks; every oracle enumerates from scratch and refuses inputs
beyond a hard budget.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations, permutations, product

import numpy as np

from .exceptions import BudgetExceededError
from .relations import ConfusionCoefficients

MLE_BUDGET = 10**7
PERMUTATION_BUDGET = 10**6
SUBSET_BUDGET = 10**7
TESTING_BUDGET = 10**4

__all__ = [
    "brute_force_relations",
    "brute_force_neighbor_pairs",
    "brute_force_m",
    "exhaustive_log_likelihood",
    "exhaustive_mle",
    "exhaustive_permutation_loss",
    "exact_testing_probability",
]


def _hist(labels, d):
    parts = sorted(Counter(labels).values(), reverse=True)
    return tuple(parts + [0] * (d - len(parts)))


def brute_force_relations(d: int, k: int):
    """All histograms of tuples in ``[k]^d``, lexicographically descending."""
    if k**d > SUBSET_BUDGET:
        raise BudgetExceededError(f"k^d = {k ** d} tuples")
    return sorted({_hist(t, d) for t in product(range(k), repeat=d)}, reverse=True)


def brute_force_neighbor_pairs(d: int, k: int):
    """Relation pairs reachable by relabeling one coordinate of one tuple."""
    if k**d * d * k > SUBSET_BUDGET:
        raise BudgetExceededError("tuple enumeration too large")
    index = {h: i + 1 for i, h in enumerate(brute_force_relations(d, k))}
    pairs = set()
    for t in product(range(k), repeat=d):
        a = index[_hist(t, d)]
        for pos in range(d):
            for lab in range(k):
                s = list(t)
                s[pos] = lab
                b = index[_hist(s, d)]
                if a != b:
                    pairs.add((min(a, b), max(a, b)))
    return frozenset(pairs)


def brute_force_m(d: int, k: int, n: int) -> ConfusionCoefficients:
    """Direct subset enumeration of the matched-pair counts.

    Node 0 of community 0 is flipped to community 1 on the balanced
    assignment (remainder on the lowest labels); every (d-1)-subset of the
    remaining nodes is classified before and after the flip.
    """
    if math.comb(n - 1, d - 1) > SUBSET_BUDGET:
        raise BudgetExceededError(f"C({n - 1}, {d - 1}) subsets")
    sizes = [n // k + (1 if t < n % k else 0) for t in range(k)]
    labels = [t for t in range(k) for _ in range(sizes[t])]
    u = 0
    index = {h: i + 1 for i, h in enumerate(brute_force_relations(d, k))}
    directional = Counter()
    for S in combinations(range(1, n), d - 1):
        ctx = [labels[v] for v in S]
        a = index[_hist([labels[u]] + ctx, d)]
        b = index[_hist([1] + ctx, d)]
        directional[(a, b)] += 1
    fwd, bwd, m = {}, {}, {}
    for i, j in sorted(brute_force_neighbor_pairs(d, k)):
        fwd[(i, j)] = directional[(i, j)]
        bwd[(i, j)] = directional[(j, i)]
        m[(i, j)] = min(fwd[(i, j)], bwd[(i, j)])
    return ConfusionCoefficients(d, k, n, m, fwd, bwd)


def exhaustive_log_likelihood(h, labels, p, k: int) -> float:
    """Global log-likelihood by a loop over every d-subset."""
    d = h.d
    index = {hh: i for i, hh in enumerate(brute_force_relations(d, k))}
    present = {tuple(e) for e in h.edges.tolist()}
    total = 0.0
    for S in combinations(range(h.n), d):
        q = p[index[_hist([labels[v] for v in S], d)]]
        total += math.log(q) if S in present else math.log(1.0 - q)
    return total


def exhaustive_mle(h, k: int, p) -> np.ndarray:
    """Global MLE over all ``k^n`` labelings; ties go to the lexicographically
    smallest labeling."""
    n, d = h.n, h.d
    if k**n > MLE_BUDGET:
        raise BudgetExceededError(f"k^n = {k ** n} labelings")
    p = np.asarray(p, dtype=float)
    hists = brute_force_relations(d, k)
    index = {hh: i for i, hh in enumerate(hists)}
    subsets = list(combinations(range(n), d))
    present = {tuple(e) for e in h.edges.tolist()}
    A = np.array([S in present for S in subsets], dtype=bool)
    # relation of each subset depends only on the labels of its nodes
    tuple_rel = {t: index[_hist(t, d)] for t in product(range(k), repeat=d)}
    log_p = np.log(p)
    log_q = np.log1p(-p)
    best, best_val = None, -math.inf
    for lab in product(range(k), repeat=n):
        rel = np.fromiter((tuple_rel[tuple(lab[v] for v in S)] for S in subsets), dtype=np.intp, count=len(subsets))
        val = float(np.where(A, log_p[rel], log_q[rel]).sum())
        if best is None or val > best_val + 1e-12 * max(1.0, abs(best_val)):
            best, best_val = lab, val
    return np.array(best, dtype=np.intp)


def exhaustive_permutation_loss(est, truth, k: int | None = None) -> float:
    """Mismatch ratio by scanning all ``k!`` relabelings."""
    est = [int(x) for x in est]
    truth = [int(x) for x in truth]
    if len(est) != len(truth):
        raise ValueError("length mismatch")
    k = max(est + truth) + 1 if k is None else k
    if math.factorial(k) > PERMUTATION_BUDGET:
        raise BudgetExceededError(f"{k}! permutations")
    n = len(est)
    best = n
    for perm in permutations(range(k)):
        wrong = sum(1 for a, b in zip(est, truth) if perm[a] != b)
        best = min(best, wrong)
    return best / n if n else 0.0


def _bernoulli_sum_pmf(m: int, p: float) -> np.ndarray:
    pmf = np.zeros(m + 1)
    pmf[0] = 1.0
    for step in range(1, m + 1):
        pmf[1 : step + 1] = pmf[1 : step + 1] * (1 - p) + pmf[0:step] * p
        pmf[0] *= 1 - p
    return pmf


def exact_testing_probability(params, coeffs, pairs=None) -> float:
    """Exact ``Pr{sum C_ij (X^(j) - X^(i)) >= 0}`` by convolution.

    Per pair, the distribution of ``sum_u X_u^(j) - X_u^(i)`` is built from
    ``2 m`` Bernoulli convolutions; pairs are then combined over the finite
    set of achievable weighted sums.
    """
    pairs = sorted(coeffs.m if pairs is None else pairs)
    if sum(coeffs.m[pr] for pr in pairs) > TESTING_BUDGET:
        raise BudgetExceededError("sum of m exceeds the DP budget")
    p = params.p
    dist = {0.0: 1.0}
    for i, j in pairs:
        m = coeffs.m[(i, j)]
        if m == 0:
            continue
        pi, pj = p[i - 1], p[j - 1]
        w = math.log(pi / (1 - pi)) - math.log(pj / (1 - pj))
        plus = _bernoulli_sum_pmf(m, pj)
        minus = _bernoulli_sum_pmf(m, pi)
        diff = np.convolve(plus, minus[::-1])  # index x <-> value x - m
        nxt = {}
        for val, mass in dist.items():
            for x in np.flatnonzero(diff > 0):
                key = round(val + w * (int(x) - m), 9)
                nxt[key] = nxt.get(key, 0.0) + mass * float(diff[x])
        dist = nxt
    return min(1.0, sum(mass for val, mass in dist.items() if val >= -1e-9))
