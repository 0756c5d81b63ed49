import itertools

import numpy as np
import pytest

from graphhist import kernels
from graphhist.graph import Graph


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    return kernels.backends()[request.param]


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    A = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_adjacency(A | A.T)


def brute_injections(G, H, root=None, v=None):
    """Edge-preserving injections of H into G by itertools; optionally root -> v."""
    count = 0
    He = H.edges()
    for img in itertools.permutations(range(G.n), H.n):
        if root is not None and img[root] != v:
            continue
        if all(G.has_edge(img[a], img[b]) for a, b in He):
            count += 1
    return count


def brute_automorphisms(H, root=None):
    count = 0
    E = set(H.edges())
    for p in itertools.permutations(range(H.n)):
        if root is not None and p[root] != root:
            continue
        if all(tuple(sorted((p[a], p[b]))) in E for a, b in E):
            count += 1
    return count


def definitional_scan(M, eps):
    """True iff some subset pair of the biadjacency M violates eps-uniformity.

    Enumerates every (A1, B1) with |A1| >= eps|A| and |B1| >= eps|B| using
    numpy over all column subsets at once.
    """
    M = np.asarray(M, dtype=np.int64)
    a, b = M.shape
    d0 = M.sum() / (a * b)
    cmasks = np.arange(1, 1 << b)
    csel = ((cmasks[:, None] >> np.arange(b)) & 1).astype(np.int64)  # (2^b-1, b)
    csize = csel.sum(axis=1)
    cok = csize >= eps * b
    csel, csize = csel[cok], csize[cok]
    for am in range(1, 1 << a):
        rows = [i for i in range(a) if (am >> i) & 1]
        if len(rows) < eps * a:
            continue
        colsum = M[rows].sum(axis=0)
        e1 = csel @ colsum
        if np.any(np.abs(e1 / (len(rows) * csize) - d0) >= eps):
            return True
    return False
