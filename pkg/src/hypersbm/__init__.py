"""Community detection in d-uniform hypergraph stochastic block models."""

from .exceptions import BudgetExceededError, ConvergenceError, ParseError
from .metrics import mismatch_ratio, unpermuted_loss
from .model import (
    Hypergraph,
    ModelParams,
    balanced_assignment,
    read_assignment,
    read_hypergraph,
    sample_hypergraph,
    validate_params,
    write_assignment,
    write_hypergraph,
)
from .rate import RateReport, minimax_exponent, rate_report, renyi_half
from .refine import HypergraphSBMDetector, detect
from .relations import confusion_coefficients, enumerate_relations, neighbor_pairs
from .spectral import HypergraphSpectralClustering, spectral_init

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ConvergenceError",
    "ParseError",
    "Hypergraph",
    "ModelParams",
    "HypergraphSBMDetector",
    "HypergraphSpectralClustering",
    "RateReport",
    "balanced_assignment",
    "confusion_coefficients",
    "detect",
    "enumerate_relations",
    "minimax_exponent",
    "mismatch_ratio",
    "neighbor_pairs",
    "rate_report",
    "read_assignment",
    "read_hypergraph",
    "renyi_half",
    "sample_hypergraph",
    "spectral_init",
    "unpermuted_loss",
    "validate_params",
    "write_assignment",
    "write_hypergraph",
]
