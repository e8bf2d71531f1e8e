"""Monte Carlo experiment runner with a flat ``key = value`` config format."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ._random import split_seed
from .exceptions import ParseError
from .metrics import mismatch_ratio
from .model import ModelParams, balanced_assignment, sample_hypergraph
from .rate import rate_report
from .refine import MODES, detect
from .spectral import DEFAULT_MU, DEFAULT_TAU_FACTOR

SCHEMA = "hypersbm-csv-v1"
COLUMNS = [
    SCHEMA,
    "n",
    "trial",
    "seed",
    "status",
    "mismatch",
    "exact_recovery",
    "exponent",
    "mean_mismatch",
    "mean_log_mismatch",
    "nonzero_trials",
    "zero_trials",
    "censored_log_mismatch",
]

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "parse_config",
    "load_config",
    "trial_seed",
    "run_trial",
    "run_experiment",
    "summarize",
    "write_csv",
]


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    k: int
    n_grid: Tuple[int, ...]
    trials: int
    master_seed: int = 0
    eta: float = 0.5
    p: Optional[Tuple[float, ...]] = None
    a: Optional[Tuple[float, ...]] = None
    mode: str = "simplified"
    mu: float = DEFAULT_MU
    tau_factor: float = DEFAULT_TAU_FACTOR
    eps_clamp: Optional[float] = None

    def __post_init__(self):
        if (self.p is None) == (self.a is None):
            raise ValueError("exactly one of p and a must be given")
        if list(self.n_grid) != sorted(self.n_grid) or len(set(self.n_grid)) != len(self.n_grid):
            raise ValueError("n_grid must be strictly ascending")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        for n in self.n_grid:
            self.params_for(n)

    def params_for(self, n: int) -> ModelParams:
        if self.a is not None:
            return ModelParams.from_scaled(n, self.k, self.d, self.a, self.eta)
        return ModelParams(n, self.k, self.d, self.eta, self.p)


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial: int
    seed: int
    mismatch: float
    exact_recovery: bool
    exponent: float
    wall_time: float = field(default=0.0, compare=False)
    status: str = "ok"


_INT_KEYS = {"d", "k", "trials", "master_seed"}
_FLOAT_KEYS = {"eta", "mu", "tau_factor"}
_LIST_KEYS = {"p", "a"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the ``key = value`` format; see the README for the grammar."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno)
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "n_grid":
                values[key] = tuple(int(x) for x in value.split(","))
            elif key in _LIST_KEYS:
                values[key] = tuple(float(x) for x in value.split(","))
            elif key == "mode":
                values[key] = value
            elif key == "eps_clamp":
                values[key] = None if value == "auto" else float(value)
            else:
                raise ParseError(f"unknown key {key!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad value for {key!r}: {value!r}", lineno) from None
    for key in ("d", "k", "n_grid", "trials"):
        if key not in values:
            raise ParseError(f"missing required key {key!r}")
    try:
        return ExperimentConfig(**values)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def trial_seed(master_seed: int, n_index: int, trial: int) -> int:
    return split_seed(master_seed, n_index, trial)


def run_trial(config: ExperimentConfig, n_index: int, trial: int, exponent: float) -> TrialRecord:
    n = config.n_grid[n_index]
    seed = trial_seed(config.master_seed, n_index, trial)
    start = time.perf_counter()
    try:
        params = config.params_for(n)
        truth = balanced_assignment(n, config.k)
        h = sample_hypergraph(params, truth, seed)
        est = detect(h, config.k, config.mode, config.mu, config.tau_factor, config.eps_clamp)
        ratio, _ = mismatch_ratio(est, truth, config.k)
    except Exception as exc:  # recorded per trial, reported by exit status
        return TrialRecord(n, trial, seed, math.nan, False, exponent,
                           time.perf_counter() - start, f"error:{type(exc).__name__}")
    return TrialRecord(n, trial, seed, ratio, ratio == 0.0, exponent, time.perf_counter() - start)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> List[TrialRecord]:
    """Run every (n, trial) cell; records come back sorted by ``(n, trial)``."""
    exponents = [rate_report(config.params_for(n)).exponent for n in config.n_grid]
    tasks = [(i, t) for i in range(len(config.n_grid)) for t in range(config.trials)]
    if jobs == 1:
        records = [run_trial(config, i, t, exponents[i]) for i, t in tasks]
    else:
        records = Parallel(n_jobs=jobs)(
            delayed(run_trial)(config, i, t, exponents[i]) for i, t in tasks
        )
    return sorted(records, key=lambda r: (r.n, r.trial))


def summarize(records: Sequence[TrialRecord]):
    """Per-n summary dicts.

    ``mean_log_mismatch`` averages ``ln(mismatch)`` over nonzero trials only;
    ``censored_log_mismatch`` counts zero-mismatch trials as ``1/n``.
    """
    out = []
    for n in sorted({r.n for r in records}):
        rows = [r for r in records if r.n == n and r.status == "ok"]
        ratios = np.array([r.mismatch for r in rows])
        nonzero = ratios[ratios > 0]
        censored = np.log(np.where(ratios > 0, ratios, 1.0 / n)) if rows else np.array([])
        out.append({
            "n": n,
            "trials": len(rows),
            "exponent": next(r.exponent for r in records if r.n == n),
            "mean_mismatch": float(ratios.mean()) if rows else math.nan,
            "mean_log_mismatch": float(np.log(nonzero).mean()) if nonzero.size else math.nan,
            "nonzero_trials": int(nonzero.size),
            "zero_trials": int(np.count_nonzero(ratios == 0)),
            "censored_log_mismatch": float(censored.mean()) if rows else math.nan,
        })
    return out


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


def write_csv(records: Sequence[TrialRecord], fh: io.TextIOBase, timings: bool = False) -> None:
    """Write trial rows then one summary row per n.

    The wall-time column is emitted only with ``timings=True`` because it
    breaks byte-for-byte reproducibility.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS + (["wall_time"] if timings else []))
    for r in records:
        row = ["trial", r.n, r.trial, r.seed, r.status, r.mismatch, r.exact_recovery,
               r.exponent, "", "", "", "", ""]
        if timings:
            row.append(f"{r.wall_time:.6f}")
        writer.writerow([_fmt(x) for x in row])
    for s in summarize(records):
        row = ["summary", s["n"], s["trials"], "", "ok", "", "", s["exponent"],
               s["mean_mismatch"], s["mean_log_mismatch"], s["nonzero_trials"],
               s["zero_trials"], s["censored_log_mismatch"]]
        if timings:
            row.append("")
        writer.writerow([_fmt(x) for x in row])
