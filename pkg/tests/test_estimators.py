import numpy as np
import pytest
from sklearn.base import clone

from hypersbm import HypergraphSBMDetector, HypergraphSpectralClustering
from hypersbm.metrics import mismatch_ratio


@pytest.mark.parametrize("cls", [HypergraphSBMDetector, HypergraphSpectralClustering])
def test_params_round_trip(cls):
    est = cls(n_clusters=3)
    params = est.get_params()
    assert params["n_clusters"] == 3
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(mu=0.4)
    assert est.get_params()["mu"] == 0.4


@pytest.mark.parametrize("cls", [HypergraphSBMDetector, HypergraphSpectralClustering])
def test_fit_predict_on_planted(cls, planted_d3):
    _, truth, h = planted_d3
    labels = cls(n_clusters=2).fit_predict(h)
    assert mismatch_ratio(labels, truth, 2)[0] <= 0.1


def test_accepts_edge_array(planted_d3):
    h = planted_d3[2]
    a = HypergraphSBMDetector(n_clusters=2).fit(h).labels_
    b = HypergraphSBMDetector(n_clusters=2).fit(h.edges, n=h.n).labels_
    assert np.array_equal(a, b)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        HypergraphSBMDetector(n_clusters=2).fit(np.array([[0, 0, 1]]), n=4)
    with pytest.raises(ValueError):
        HypergraphSBMDetector(n_clusters=2, mode="other").fit(np.array([[0, 1, 2]]), n=4)
