"""Compare the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 3]

Each case checks that both backends return identical results before timing.
"""

import argparse
import time

import numpy as np

from graphhist import kernels
from graphhist.graph import Graph, named_pattern, search_plan


def _best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    A = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_adjacency(A | A.T)


def cases():
    G = _random_graph(120, 0.3, 1)
    tri = named_pattern("triangle")
    _, back = search_plan(tri.graph, tri.root)
    yield "rooted_injections triangle n=120", lambda k: k.rooted_injections(G.words(), G.n, back, 1)

    pats = [named_pattern("triangle"), named_pattern("bowtie")]
    backs = np.zeros((2, 8), dtype=np.int64)
    sizes = np.array([P.r for P in pats], dtype=np.int64)
    for i, P in enumerate(pats):
        backs[i, :P.r] = search_plan(P.graph, P.root)[1]
    yield "scan_masks n=7, 4096 graphs", lambda k: k.scan_masks(7, 0, 4096, backs, sizes)

    rng = np.random.default_rng(2)
    a, b = 14, 14
    cols = np.array([int(sum(1 << i for i in range(a) if rng.random() < 0.5)) for _ in range(b)],
                    dtype=np.uint64)
    e = sum(int(c).bit_count() for c in cols)
    yield "uniformity_scan 14x14 eps=0.6 (full scan)", lambda k: k.uniformity_scan(cols, a, e, 0.6)


def _same(x, y):
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return np.array_equal(np.asarray(x), np.asarray(y))
    return x == y


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backs = kernels.backends()
    if "cython" not in backs:
        print("compiled kernels not built; only the Python backend is available")
    print(f"{'case':40s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, fn in cases():
        tp, outp = _best(lambda: fn(backs["python"]), args.repeat)
        if "cython" in backs:
            tc, outc = _best(lambda: fn(backs["cython"]), args.repeat)
            if not _same(outp, outc):
                raise SystemExit(f"backends disagree on {name}")
            print(f"{name:40s} {tp:12.4f} {tc:12.6f} {tp / tc:9.0f}x")
        else:
            print(f"{name:40s} {tp:12.4f} {'-':>12s} {'-':>9s}")


if __name__ == "__main__":
    main()
