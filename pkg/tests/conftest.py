import numpy as np
import pytest

from graphmkl import graph, kernels


@pytest.fixture(scope="session")
def small_dictionary():
    """Five RBF kernels with bandwidths 0.1, 0.3, 1, 3, 10."""
    sigmas = [0.1, 0.3, 1.0, 3.0, 10.0]
    return [kernels.KernelSpec(index=i + 1, sigma=s) for i, s in enumerate(sigmas)]


@pytest.fixture(scope="session")
def small_graph(small_dictionary):
    sim = graph.similarity_matrix(small_dictionary, d=2)
    return graph.build_graph(small_dictionary, m=3, d=2, sim=sim), sim


@pytest.fixture(scope="session")
def paper_dictionary():
    return kernels.default_dictionary(41)


def make_psi_stack(specs, num_rf, input_dim, seed):
    rng = np.random.default_rng(seed)
    fmaps = [kernels.sample_spectral(s, num_rf, input_dim, rng) for s in specs]
    return kernels.spectral_stack(fmaps)
