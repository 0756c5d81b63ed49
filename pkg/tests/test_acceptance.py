"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines are printed even with output capture on) or as a
script: ``python3 tests/test_acceptance.py``.
"""

import math
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from graphhist.distributions import Empirical, PiecewiseDensity, ks_distance, moments
from graphhist.graph import Graph, named_pattern
from graphhist.maxent import (ConstraintSpec, density_jacobian, entropy, scalar_shift,
                              solve_max_entropy)
from graphhist.oracle import (EnumerationScope, counting_lemma_audit, moment_gap_rate,
                              sandwich_check)
from graphhist.szemeredi import (Partition, mean_density, partition_energy_exact, refine_step,
                                 uniformity_check, vector_to_matrix, witness_valid)

from conftest import definitional_scan

EDGE, K3, K4 = Graph.complete(2), Graph.complete(3), Graph.complete(4)
BOWTIE = named_pattern("bowtie").graph


def _hb(x):
    return 0.0 if x <= 0 or x >= 1 else -x * math.log(x) - (1 - x) * math.log(1 - x)


def _report(num, ok, detail):
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line, flush=True)
    return line


# ---------------------------------------------------------------- 1


def criterion_1():
    t0 = time.perf_counter()
    threads = min(8, os.cpu_count() or 1)
    out = sandwich_check(PiecewiseDensity.uniform(), named_pattern("triangle"), 0.4, 2,
                         EnumerationScope(7, "labeled"), slack="rigorous", threads=threads)
    elapsed = time.perf_counter() - t0
    inner = out["inner"]
    inner_ok = inner != "checked" or out["inner_violations"] == 0
    ok = out["graphs"] == 2_097_152 and out["outer_violations"] == 0 and inner_ok and elapsed <= 900
    detail = (f"n=7 labeled graphs={out['graphs']} hist={out['hist_count']} "
              f"outer violations={out['outer_violations']} slack={out['slack']} "
              f"inner={inner} time={elapsed:.1f}s threads={threads}")
    return ok, detail


# ---------------------------------------------------------------- 2


def _random_piecewise_pair(rng, delta):
    breaks = np.concatenate([[0.0], np.sort(rng.random(int(rng.integers(1, 6)))), [1.0]])
    widths = np.diff(breaks)
    w1, w2 = rng.random(len(widths)) + 0.05, rng.random(len(widths)) + 0.05
    m1, m2 = w1 / w1.sum(), w2 / w2.sum()
    p = PiecewiseDensity(breaks, m1 / widths)
    r = PiecewiseDensity(breaks, m2 / widths)
    # q = (1 - lam) p + lam r has KS(p, q) = lam KS(p, r)
    ks_pr = ks_distance(p, r)
    lam = min(1.0, rng.random() * delta / ks_pr) if ks_pr > 0 else 1.0
    q = PiecewiseDensity(breaks, ((1 - lam) * m1 + lam * m2) / widths)
    return p, q


def _random_empirical_pair(rng, delta):
    n = int(rng.integers(5, 60))
    xs = rng.random(n)
    ys = xs.copy()
    # moving j atoms shifts the CDF by at most j / n
    j = int(rng.integers(0, math.floor(delta * n) + 1))
    idx = rng.choice(n, size=j, replace=False)
    ys[idx] = rng.random(j)
    return Empirical(xs), Empirical(ys)


def criterion_2():
    rng = np.random.default_rng(2)
    worst = -math.inf
    bad = 0
    tested = 0
    for t in range(1000):
        delta = (0.05, 0.2)[t % 2]
        p, q = (_random_piecewise_pair if t % 4 < 2 else _random_empirical_pair)(rng, delta)
        ks = ks_distance(p, q)
        assert ks <= delta + 1e-12, "pair generator broke the KS constraint"
        gaps = [abs(a - b) for a, b in zip(moments(p, 10), moments(q, 10))]
        tested += 1
        worst = max(worst, max(gaps) - delta)
        bad += any(g > delta + 1e-12 for g in gaps) or any(g > ks + 1e-12 for g in gaps)
    ok = bad == 0 and tested == 1000
    return ok, f"pairs={tested} violations={bad} max(gap - delta)={worst:.3e}"


# ---------------------------------------------------------------- 3


def criterion_3():
    r = moment_gap_rate(named_pattern("triangle"), [40, 80, 160], samples=50, d=3, seed=0)
    C = 40 * max(r[40])
    exceed = {n: sum(1 for v in r[n] if v > C / n) for n in (80, 160)}
    means = {n: float(np.mean(r[n])) for n in r}
    ratio = means[160] / means[80]
    decreasing = means[40] > means[80] > means[160]
    ok = decreasing and exceed[80] == 0 and exceed[160] == 0 and ratio <= 0.6
    detail = (f"means={{40: {means[40]:.2e}, 80: {means[80]:.2e}, 160: {means[160]:.2e}}} "
              f"C={C:.4f} exceedances={exceed} mean160/mean80={ratio:.3f}")
    return ok, detail


# ---------------------------------------------------------------- 4


def criterion_4():
    t0 = time.perf_counter()
    S = np.full((4, 4), 0.5)
    np.fill_diagonal(S, 0.0)
    out = counting_lemma_audit(S, K3, g=200, trials=100, eps=0.1, seed=0, audit="first")
    elapsed = time.perf_counter() - t0
    dev = out["max_deviation"]
    ok = dev <= out["bound"] and dev <= 0.05 and elapsed <= 300
    detail = (f"t(S,K3)={out['t_S_sampling']:.6f} max dev={dev:.2e} bound={out['bound']:.3f} "
              f"(distinct-parts reading: t={out['t_S_distinct']:.4f}, "
              f"max dev={out['max_deviation_distinct']:.4f}) "
              f"first-sample nonuniform pairs={out['uniformity_audit'][0]['nonuniform_pairs']} "
              f"time={elapsed:.1f}s")
    return ok, detail


# ---------------------------------------------------------------- 5


def criterion_5():
    k = 6
    free = solve_max_entropy(ConstraintSpec([EDGE], [0.5], [0.5], k))
    dev = float(np.abs(free.S_star.vector() - 0.5).max())
    H_free = math.comb(k, 2) * math.log(2)
    ok1 = dev <= 1e-6 and abs(free.entropy - H_free) <= 1e-6
    edge = solve_max_entropy(ConstraintSpec([EDGE], [0.3], [0.0], 6))
    H_edge = math.comb(6, 2) * _hb(0.3)
    ok2 = abs(edge.entropy - H_edge) <= 1e-5
    detail = (f"unconstrained max|s-1/2|={dev:.1e} |H-15 ln2|={abs(free.entropy - H_free):.1e}; "
              f"edge 0.3 |H-15 h(0.3)|={abs(edge.entropy - H_edge):.1e}")
    return ok1 and ok2, detail


# ---------------------------------------------------------------- 6


def criterion_6():
    rng = np.random.default_rng(6)
    k = 5
    N = math.comb(k, 2)
    h = 1e-5
    worst = 0.0
    for family in ([EDGE], [EDGE, K3], [K3, BOWTIE]):
        for _ in range(100):
            x = rng.uniform(0.05, 0.95, N)
            J, _ = density_jacobian(vector_to_matrix(k, x), family)
            for i in range(N):
                e = np.zeros(N)
                e[i] = h
                for m, F in enumerate(family):
                    fd = (mean_density(vector_to_matrix(k, x + e), F)
                          - mean_density(vector_to_matrix(k, x - e), F)) / (2 * h)
                    worst = max(worst, abs(J[i, m] - fd) / abs(fd))
    const_sigmas = [density_jacobian(vector_to_matrix(k, np.full(N, c)), [EDGE, K3])[1]
                    for c in (0.1, 0.5, 0.9)]
    ok = worst <= 1e-6 and max(const_sigmas) <= 1e-10
    return ok, (f"max relative error={worst:.2e} over 300 matrices; "
                f"sigma_min at constant matrices={max(const_sigmas):.1e}")


# ---------------------------------------------------------------- 7


def _random_graph(n, p, rng):
    A = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_adjacency(A | A.T)


def criterion_7():
    rng = np.random.default_rng(7)
    decreases = 0
    for _ in range(1000):
        n = int(rng.integers(2, 30))
        G = _random_graph(n, rng.random(), rng)
        k = int(rng.integers(1, n + 1))
        a = rng.integers(0, k + 1, size=n)  # part 0 is the exceptional set
        P = Partition(a, k)
        # random refinement: each part split into up to three pieces
        b = np.where(a == 0, 0, (a - 1) * 3 + rng.integers(1, 4, size=n))
        P2 = Partition(b, 3 * k)
        decreases += partition_energy_exact(G, P2) < partition_energy_exact(G, P)
    exhaustive = 0
    for n in range(2, 9):
        for _ in range(3):
            G = _random_graph(n, rng.random(), rng)
            q0 = partition_energy_exact(G, Partition(np.ones(n, dtype=int), 1))
            for mask in range(1, 1 << (n - 1)):
                a = np.array([1 + ((mask >> v) & 1) for v in range(n)])
                exhaustive += 1
                decreases += partition_energy_exact(G, Partition(a, 2)) < q0
    # exact-witness refinement of a single pair (A, B), sizes <= 14
    instances = small = 0
    worst_ratio = math.inf
    for t in range(300):
        a, b = int(rng.integers(1, 15)), int(rng.integers(1, 15))
        eps = float(rng.choice([0.1, 0.2, 0.3, 0.5]))
        G = _random_graph(a + b, rng.random(), rng)
        P = Partition.from_parts(a + b, [list(range(a)), list(range(a, a + b))])
        P2, gain, info = refine_step(G, P, eps, mode="exact")
        if info["nonuniform"] == 0:
            continue
        instances += 1
        worst_ratio = min(worst_ratio, gain / eps**5)
        small += gain < eps**5
    ok = decreases == 0 and small == 0 and instances > 0
    return ok, (f"random refinements=1000 exhaustive 2-part={exhaustive} decreases={decreases}; "
                f"non-uniform exact instances={instances} gains below eps^5={small} "
                f"min gain/eps^5={worst_ratio:.2f}")


# ---------------------------------------------------------------- 8


def _shift_bound(phi, phi2, r, k):
    return (abs(phi - phi2) / (1 - min(phi, phi2))) ** (1 / math.comb(r, 2)) * math.comb(k, 2)


def criterion_8():
    rng = np.random.default_rng(8)
    err_bad = bound_bad = 0
    worst_err = 0.0
    for t in range(500):
        F = K3 if t % 2 == 0 else K4
        k = int(rng.integers(F.n, 8))
        x = rng.random(math.comb(k, 2)) ** rng.uniform(0.3, 3)
        S = vector_to_matrix(k, x)
        phi = mean_density(S, F)
        target = float(rng.random())
        out = scalar_shift(S, F, target)
        achieved = mean_density(out["S_bar"], F)
        l1 = float(np.abs(x - out["S_bar"][np.triu_indices(k, 1)]).sum())
        worst_err = max(worst_err, abs(achieved - target))
        err_bad += abs(achieved - target) > 1e-8
        bound_bad += l1 > _shift_bound(phi, target, F.n, k) + 1e-9
    eq = scalar_shift(np.zeros((5, 5)), K3, 0.027)
    eq_bound = _shift_bound(0.0, 0.027, 3, 5)
    eq_ok = abs(eq["alpha"] - 0.3) <= 1e-6 and abs(eq["l1"] - eq_bound) <= 1e-6
    ok = err_bad == 0 and bound_bad == 0 and eq_ok
    return ok, (f"instances=500 density misses={err_bad} (max err {worst_err:.1e}) "
                f"bound violations={bound_bad}; zeros->0.027: alpha={eq['alpha']:.8f} "
                f"l1={eq['l1']:.8f} bound={eq_bound:.8f}")


# ---------------------------------------------------------------- 9


def criterion_9():
    rng = np.random.default_rng(9)
    bad = 0
    tightest = math.inf
    for t in range(500):
        k = int(rng.integers(2, 9))
        N = math.comb(k, 2)
        x1 = rng.random(N) ** rng.uniform(0.2, 5)
        mode = t % 3
        if mode == 0:
            x2 = rng.random(N)
        elif mode == 1:
            x2 = np.clip(x1 + rng.normal(0, 0.05, N), 0, 1)
        else:
            x2 = np.full(N, 0.5)
        H1 = sum(_hb(v) for v in x1)
        H2 = sum(_hb(v) for v in x2)
        l1 = float(np.abs(x1 - x2).sum())
        rhs = 5 * k * k * _hb(min(0.5, l1 / (4 * k * k)))
        tightest = min(tightest, rhs - (H2 - H1))
        bad += H2 - H1 > rhs + 1e-12
        assert abs(entropy(vector_to_matrix(k, x1))[0] - H1) <= 1e-9
    return bad == 0, f"pairs=500 violations={bad} min slack={tightest:.3e}"


# ---------------------------------------------------------------- 10


def criterion_10():
    rng = np.random.default_rng(10)
    disagree = 0
    counts = {True: 0, False: 0}
    for _ in range(200):
        a = b = int(rng.integers(2, 11))
        eps = float(rng.uniform(0.15, 0.6))
        M = (rng.random((a, b)) < rng.random()).astype(int)
        G = Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b) if M[i, j]])
        v = uniformity_check(G, range(a), range(a, a + b), eps, mode="exact")
        ref = definitional_scan(M, eps)
        counts[ref] += 1
        disagree += (not v.uniform) != ref
        if not v.uniform:
            disagree += not witness_valid(G, range(a), range(a, a + b), *v.witness, eps)
    invalid = found = 0
    for t in range(100):
        a = int(rng.integers(5, 41))
        eps = float(rng.uniform(0.1, 0.5))
        M = (rng.random((a, a)) < rng.random()).astype(int)
        if t % 2:
            h = a // 2
            M[:h, :h] = 1 - M[:h, :h] * (rng.random((h, h)) < 0.2)
        G = Graph.from_edges(2 * a, [(i, a + j) for i in range(a) for j in range(a) if M[i, j]])
        v = uniformity_check(G, range(a), range(a, 2 * a), eps, mode="heuristic", seed=t)
        if not v.uniform:
            found += 1
            A1, B1 = v.witness
            rows = [i for i in A1]
            cols = [j - a for j in B1]
            sub = M[np.ix_(rows, cols)]
            ok = (len(rows) >= eps * a and len(cols) >= eps * a
                  and abs(sub.sum() / sub.size - M.sum() / M.size) >= eps)
            invalid += not ok
    ok = disagree == 0 and invalid == 0
    return ok, (f"exact vs definitional: instances=200 (non-uniform {counts[True]}, uniform "
                f"{counts[False]}) disagreements={disagree}; heuristic witnesses={found} "
                f"invalid={invalid}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("num", range(1, 11))
def test_criterion(num, capsys):
    ok, detail = CRITERIA[num - 1]()
    with capsys.disabled():
        print()
        _report(num, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        _report(i, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
