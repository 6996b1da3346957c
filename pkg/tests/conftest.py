import warnings

import numpy as np
import pytest
from hypothesis import strategies as st

from netflowdist.distance import DisconnectedGraphWarning
from netflowdist.generators import sample_sbm, two_block_params
from netflowdist.graph import Graph


@pytest.fixture(autouse=True)
def _quiet_disconnected():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraphWarning)
        yield


def sbm20(seed, p_in=0.8, p_out=0.1):
    return sample_sbm(two_block_params(p_in, p_in, p_out), seed)


@st.composite
def graphs(draw, min_n=2, max_n=8, n=None):
    if n is None:
        n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    adj = np.zeros((n, n), dtype=np.uint8)
    iu, iv = np.triu_indices(n, 1)
    adj[iu, iv] = bits
    adj[iv, iu] = bits
    return Graph(adj)


@st.composite
def graph_pairs(draw, min_n=2, max_n=7):
    n = draw(st.integers(min_n, max_n))
    return draw(graphs(n=n)), draw(graphs(n=n))


@st.composite
def graph_triples(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    return draw(graphs(n=n)), draw(graphs(n=n)), draw(graphs(n=n))
