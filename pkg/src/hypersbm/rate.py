"""Error exponent of the hypergraph SBM and the two-point testing problem.

The exponent is ``E = sum over confusing pairs (i, j) of m_ij * I(p_i, p_j)``
where ``I`` is the order-1/2 Renyi divergence between ``Ber(p_i)`` and
``Ber(p_j)``, ``I(p, q) = -2 log(sqrt(pq) + sqrt((1-p)(1-q)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np

from ._random import split_seed
from .model import ModelParams
from .relations import ConfusionCoefficients, Pair, confusion_coefficients, neighbor_pairs

__all__ = [
    "RateReport",
    "TestingEstimate",
    "renyi_half",
    "testing_weight",
    "minimax_exponent",
    "rate_report",
    "predict_regimes",
    "wilson_interval",
    "testing_problem_mc",
]


def renyi_half(p: float, q: float) -> float:
    """Order-1/2 Renyi divergence between ``Ber(p)`` and ``Ber(q)`` in nats."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise ValueError(f"probabilities must lie in (0, 1), got p={p}, q={q}")
    if p == q:
        return 0.0
    # the affinity is symmetric in (p, q), so sort to make I bit-symmetric
    lo, hi = min(p, q), max(p, q)
    bc = math.sqrt(lo * hi) + math.sqrt((1.0 - lo) * (1.0 - hi))
    return max(0.0, -2.0 * math.log(bc))


def testing_weight(p: float, q: float) -> float:
    """Log odds ratio ``log(f(p) / f(q))`` with ``f(s) = s / (1 - s)``."""
    return math.log(p / (1.0 - p)) - math.log(q / (1.0 - q))


@dataclass(frozen=True)
class RateReport:
    """Exponent breakdown and regime diagnostics for one configuration."""

    n: int
    k: int
    d: int
    pairs: Tuple[Pair, ...]
    m: Mapping[Pair, int]
    divergence: Mapping[Pair, float]
    exponent: float
    predicted_risk: float
    exact_recovery_ratio: float
    condition_main: float
    condition_order: float
    exact_recovery: bool = field(default=False)

    def terms(self):
        for pair in self.pairs:
            yield pair, self.m[pair], self.divergence[pair], self.m[pair] * self.divergence[pair]


def minimax_exponent(params: ModelParams, coeffs: ConfusionCoefficients, pairs=None) -> RateReport:
    """Fill a :class:`RateReport` from probabilities and matched-pair counts.

    ``n`` enters only through ``coeffs``; ``params.n`` is used for the
    ``E / ln n`` ratio.
    """
    if (coeffs.d, coeffs.k) != (params.d, params.k):
        raise ValueError("coefficients and parameters disagree on (d, k)")
    pairs = tuple(sorted(coeffs.m if pairs is None else pairs))
    p = params.p
    div: Dict[Pair, float] = {}
    E = 0.0
    for i, j in pairs:
        div[(i, j)] = renyi_half(p[i - 1], p[j - 1])
        E += coeffs.m[(i, j)] * div[(i, j)]
    k, d, n = params.k, params.d, params.n
    scale = float(k) ** d
    cond_main = E / (scale * math.log(k))
    spread = p[0] - p[-1]
    worst = 0.0
    for i, j in pairs:
        gap = p[i - 1] - p[j - 1]
        ratio = math.inf if gap == 0 else abs(spread / gap)
        worst = max(worst, ratio)
    cond_order = 0.0 if math.isinf(worst) or worst == 0 else E / (scale * worst)
    ratio = E / math.log(n)
    return RateReport(
        n=n,
        k=k,
        d=d,
        pairs=pairs,
        m=dict(coeffs.m),
        divergence=div,
        exponent=E,
        predicted_risk=math.exp(-E),
        exact_recovery_ratio=ratio,
        condition_main=cond_main,
        condition_order=cond_order,
        exact_recovery=ratio > 1.0,
    )


def rate_report(params: ModelParams) -> RateReport:
    """Exponent report for ``params`` on its balanced assignment."""
    table = params.table
    pairs = neighbor_pairs(params.d, params.k, table)
    coeffs = confusion_coefficients(params.d, params.k, params.n, table, pairs)
    return minimax_exponent(params, coeffs, pairs)


def predict_regimes(report_or_exponent, n: int | None = None) -> Dict[str, object]:
    """Regime labels; exact recovery requires ``E / ln n > 1`` strictly."""
    if isinstance(report_or_exponent, RateReport):
        E = report_or_exponent.exponent
        n = report_or_exponent.n if n is None else n
        main = report_or_exponent.condition_main
        order = report_or_exponent.condition_order
    else:
        E = float(report_or_exponent)
        main = order = float("nan")
    ratio = E / math.log(n)
    return {
        "exponent": E,
        "exact_recovery_ratio": ratio,
        "exact_recovery": ratio > 1.0,
        "condition_main": main,
        "condition_order": order,
    }


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TestingEstimate:
    probability: float
    low: float
    high: float
    trials: int
    hits: int

    @property
    def width(self) -> float:
        return self.high - self.low


_CHUNK = 1 << 16


def testing_problem_mc(
    params: ModelParams,
    coeffs: ConfusionCoefficients,
    pairs=None,
    trials: int = 10**5,
    seed: int = 0,
) -> TestingEstimate:
    """Monte Carlo estimate of the two-point testing error probability.

    Simulates ``Pr{sum_pairs C_ij * sum_u (X_u^(j) - X_u^(i)) >= 0}`` with
    ``X^(i) ~ Ber(p_i)``. Per pair the inner sum is a difference of two
    binomials, which is what is drawn. Trial chunk ``c`` uses its own
    generator seeded by ``split_seed(seed, c)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pairs = tuple(sorted(coeffs.m if pairs is None else pairs))
    p = params.p
    active = [(i, j) for i, j in pairs if coeffs.m[(i, j)] > 0 and p[i - 1] != p[j - 1]]
    hits = 0
    n_chunks = (trials + _CHUNK - 1) // _CHUNK
    for c in range(n_chunks):
        size = min(_CHUNK, trials - c * _CHUNK)
        if not active:
            hits += size
            continue
        rng = np.random.Generator(np.random.Philox(split_seed(seed, c)))
        total = np.zeros(size)
        for i, j in active:
            m = coeffs.m[(i, j)]
            w = testing_weight(p[i - 1], p[j - 1])
            diff = rng.binomial(m, p[j - 1], size) - rng.binomial(m, p[i - 1], size)
            total += w * diff
        hits += int(np.count_nonzero(total >= -1e-9))
    lo, hi = wilson_interval(hits, trials)
    return TestingEstimate(hits / trials, lo, hi, trials, hits)
