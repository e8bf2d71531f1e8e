import numpy as np
import pytest

from hypersbm.model import ModelParams, balanced_assignment, sample_hypergraph


@pytest.fixture
def planted_d3():
    """Well separated d=3, k=2 instance with its truth."""
    params = ModelParams(30, 2, 3, 0.5, (0.6, 0.05))
    truth = balanced_assignment(30, 2)
    return params, truth, sample_hypergraph(params, truth, seed=7)


def random_hypergraph(rng, n, d, density=0.3):
    from itertools import combinations

    from hypersbm.model import Hypergraph

    subsets = [c for c in combinations(range(n), d) if rng.random() < density]
    return Hypergraph(n, d, np.array(subsets, dtype=np.int64).reshape(-1, d))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
