import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphhist import kernels
from graphhist.graph import Graph, named_pattern, search_plan

from conftest import brute_injections, definitional_scan, random_graph


def test_python_backend_always_available():
    assert "python" in kernels.backends()
    assert kernels.BACKEND in kernels.backends()


@pytest.mark.parametrize("name", ["triangle", "path3", "bowtie", "k4"])
def test_rooted_injections(backend, name):
    F = named_pattern(name)
    _, back = search_plan(F.graph, F.root)
    G = random_graph(8, 0.6, 5)
    got = [int(x) for x in backend.rooted_injections(G.words(), G.n, back, 1)]
    assert got == [brute_injections(G, F.graph, F.root, v) for v in range(G.n)]


def test_rooted_injections_wide_graph(backend):
    # more than 64 vertices spans several words per row
    G = random_graph(150, 0.2, 9)
    F = named_pattern("triangle")
    _, back = search_plan(F.graph, F.root)
    got = np.asarray(backend.rooted_injections(G.words(), G.n, back, 1))
    A = G.adjacency_matrix().astype(np.int64)
    assert np.array_equal(got, np.diag(A @ A @ A))


def test_scan_masks_matches_per_graph_counts(backend):
    pats = [named_pattern("triangle"), named_pattern("path3")]
    backs = np.zeros((2, 8), dtype=np.int64)
    sizes = np.array([P.r for P in pats], dtype=np.int64)
    for i, P in enumerate(pats):
        backs[i, :P.r] = search_plan(P.graph, P.root)[1]
    out = np.asarray(backend.scan_masks(5, 100, 140, backs, sizes))
    for t in range(40):
        G = Graph.from_mask(5, 100 + t)
        for i, P in enumerate(pats):
            want = [brute_injections(G, P.graph, P.root, v) for v in range(5)]
            assert list(out[t, i]) == want


def test_backends_agree_on_scan():
    backs_ = kernels.backends()
    if len(backs_) < 2:
        pytest.skip("compiled kernels not built")
    P = named_pattern("bowtie")
    backs = np.zeros((1, 8), dtype=np.int64)
    backs[0, :P.r] = search_plan(P.graph, P.root)[1]
    sizes = np.array([P.r], dtype=np.int64)
    a = backs_["python"].scan_masks(6, 0, 2000, backs, sizes)
    b = backs_["cython"].scan_masks(6, 0, 2000, backs, sizes)
    assert np.array_equal(np.asarray(a), np.asarray(b))


def _cols(M):
    return np.array([sum(1 << i for i in range(M.shape[0]) if M[i, j]) for j in range(M.shape[1])],
                    dtype=np.uint64)


def _check_witness(M, eps, w):
    am, bm = w
    rows = [i for i in range(M.shape[0]) if (am >> i) & 1]
    cols = [j for j in range(M.shape[1]) if (bm >> j) & 1]
    assert len(rows) >= eps * M.shape[0] and len(cols) >= eps * M.shape[1]
    d0 = M.sum() / M.size
    d1 = M[np.ix_(rows, cols)].sum() / (len(rows) * len(cols))
    assert abs(d1 - d0) >= eps


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.floats(0.05, 0.6), st.integers(0, 2**36 - 1))
def test_uniformity_scan_matches_definition(a, b, eps, bits):
    M = np.array([[(bits >> (i * 6 + j)) & 1 for j in range(b)] for i in range(a)])
    for kern in kernels.backends().values():
        w = kern.uniformity_scan(_cols(M), a, int(M.sum()), eps)
        assert (w is not None) == definitional_scan(M, eps)
        if w is not None:
            _check_witness(M, eps, w)


def test_backends_agree_on_uniformity_witness():
    backs_ = kernels.backends()
    if len(backs_) < 2:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(4)
    for _ in range(30):
        M = (rng.random((9, 9)) < rng.random()).astype(int)
        args = (_cols(M), 9, int(M.sum()), 0.3)
        assert backs_["python"].uniformity_scan(*args) == backs_["cython"].uniformity_scan(*args)
