"""Uniform pairs, partitions, energy refinement, type extraction and mean densities.

Conventions
-----------
* ``e(A, B)`` counts ordered adjacent pairs (x, y) with x in A, y in B, so for
  disjoint sets it is the number of crossing edges and ``e(C, C) = 2 e(C)``.
  With this convention the energy is the second moment of a random
  block density and never decreases under refinement.
* A pair is *non-uniform* when some A' of A, B' of B with |A'| >= eps|A| and
  |B'| >= eps|B| satisfy |d(A', B') - d(A, B)| >= eps.  The same floating
  point predicate is used by every code path so verdicts agree bit for bit.
* Mean densities of a type are polynomials in the upper-triangular entries
  of S, built once per (pattern, k) from the proper colourings of the pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .graph import Graph, RootedPattern

EXACT_CAP = 14
POLY_CAP = 5_000_000


class KCapExceeded(RuntimeError):
    """Refinement produced more parts than allowed; carries the partial partition."""

    def __init__(self, message: str, partition: "Partition"):
        super().__init__(message)
        self.partition = partition


# ---------------------------------------------------------------- types


@dataclass
class Partition:
    """Assignment of vertices to parts; part 0 is the exceptional set C_0."""

    assignment: np.ndarray
    k: int

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        if self.assignment.size and (self.assignment.min() < 0 or self.assignment.max() > self.k):
            raise ValueError("part index out of range")

    @classmethod
    def from_parts(cls, n: int, parts: Sequence[Sequence[int]],
                   exceptional: Sequence[int] = ()) -> "Partition":
        a = np.full(n, -1, dtype=np.int64)
        for v in exceptional:
            a[v] = 0
        for i, part in enumerate(parts, start=1):
            for v in part:
                if a[v] != -1:
                    raise ValueError(f"vertex {v} assigned twice")
                a[v] = i
        if (a < 0).any():
            raise ValueError("partition does not cover every vertex")
        return cls(a, len(parts))

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    def parts(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == i) for i in range(1, self.k + 1)]

    def exceptional(self) -> np.ndarray:
        return np.flatnonzero(self.assignment == 0)

    def sizes(self) -> list[int]:
        return [int(x) for x in np.bincount(self.assignment, minlength=self.k + 1)[1:]]

    def is_equitable(self) -> bool:
        return len(set(self.sizes())) <= 1

    def to_json(self) -> list:
        return self.assignment.tolist()


@dataclass
class SzemerediType:
    k: int
    eps: float
    S: np.ndarray

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        if S.shape != (self.k, self.k):
            raise ValueError("S must be k x k")
        if self.k < 1 or not 0 < self.eps <= 1:
            raise ValueError("need k >= 1 and 0 < eps <= 1")
        np.fill_diagonal(S, 0.0)
        if not np.allclose(S, S.T, atol=0, rtol=0) or S.min() < 0 or S.max() > 1:
            raise ValueError("S must be symmetric with entries in [0, 1]")
        self.S = S

    @classmethod
    def from_vector(cls, k: int, eps: float, x) -> "SzemerediType":
        return cls(k, eps, vector_to_matrix(k, x))

    def vector(self) -> np.ndarray:
        return matrix_to_vector(self.S)

    def to_json(self) -> dict:
        return {"k": self.k, "eps": self.eps, "S": self.S.tolist()}


def matrix_to_vector(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    iu = np.triu_indices(S.shape[0], 1)
    return S[iu].copy()


def vector_to_matrix(k: int, x) -> np.ndarray:
    S = np.zeros((k, k))
    iu = np.triu_indices(k, 1)
    S[iu] = x
    return S + S.T


@dataclass
class UniformityVerdict:
    uniform: bool
    mode: str
    witness: Optional[tuple] = None
    density: Optional[Fraction] = None
    witness_density: Optional[Fraction] = None

    def to_json(self) -> dict:
        out = {"uniform": self.uniform, "mode": self.mode}
        if self.witness is not None:
            out["witness"] = [list(map(int, self.witness[0])), list(map(int, self.witness[1]))]
            out["density"] = float(self.density)
            out["witness_density"] = float(self.witness_density)
        return out


# ---------------------------------------------------------------- densities


def _mask(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << int(v)
    return m


def edge_count(G: Graph, A, B) -> int:
    """Ordered adjacent pairs between A and B (A, B may overlap)."""
    bm = _mask(B)
    return sum((G.rows[int(a)] & bm).bit_count() for a in A)


def pair_density(G: Graph, A, B) -> Fraction:
    """d(A, B) = e(A, B) / (|A||B|) for disjoint nonempty A, B."""
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("vertex sets must be nonempty")
    if set(map(int, A)) & set(map(int, B)):
        raise ValueError("vertex sets must be disjoint")
    return Fraction(edge_count(G, A, B), len(A) * len(B))


def violates(e1: int, a1: int, b1: int, e: int, a: int, b: int, eps: float) -> bool:
    """The deviation predicate shared by every uniformity code path."""
    return abs(e1 / (a1 * b1) - e / (a * b)) >= eps


def large_enough(a1: int, a: int, eps: float) -> bool:
    return a1 >= eps * a


def witness_valid(G: Graph, A, B, A1, B1, eps: float) -> bool:
    """Definitional re-check of a claimed witness."""
    A, B, A1, B1 = (list(map(int, s)) for s in (A, B, A1, B1))
    if not A1 or not B1 or not set(A1) <= set(A) or not set(B1) <= set(B):
        return False
    if not (large_enough(len(A1), len(A), eps) and large_enough(len(B1), len(B), eps)):
        return False
    return violates(edge_count(G, A1, B1), len(A1), len(B1),
                    edge_count(G, A, B), len(A), len(B), eps)


def _verdict(G, A, B, A1, B1, mode) -> UniformityVerdict:
    return UniformityVerdict(False, mode, (sorted(map(int, A1)), sorted(map(int, B1))),
                             pair_density(G, A, B), pair_density(G, A1, B1))


def _exact_scan(G: Graph, A: list, B: list, eps: float, backend=None):
    kern = backend or kernels.active
    swap = len(A) > len(B)
    X, Y = (B, A) if swap else (A, B)
    cols = np.array([sum(1 << i for i, x in enumerate(X) if G.has_edge(x, y)) for y in Y],
                    dtype=np.uint64)
    found = kern.uniformity_scan(cols, len(X), edge_count(G, X, Y), float(eps))
    if found is None:
        return None
    xm, ym = found
    X1 = [x for i, x in enumerate(X) if (xm >> i) & 1]
    Y1 = [y for j, y in enumerate(Y) if (ym >> j) & 1]
    return (Y1, X1) if swap else (X1, Y1)


def _best_side(M: np.ndarray, rows_sel: np.ndarray, tmin: int, d0: float):
    """Given a row subset, the column subset (top/bottom by degree) of largest deviation."""
    deg = M[rows_sel].sum(axis=0)
    order = np.argsort(-deg, kind="stable")
    a1 = int(rows_sel.sum())
    best = (-1.0, None)
    csum_top = np.cumsum(deg[order])
    csum_bot = np.cumsum(deg[order[::-1]])
    for t in range(max(tmin, 1), M.shape[1] + 1):
        for cs, sel in ((csum_top, order[:t]), (csum_bot, order[::-1][:t])):
            dev = abs(cs[t - 1] / (a1 * t) - d0)
            if dev > best[0]:
                best = (dev, sel)
    return best


def _heuristic_scan(G: Graph, A: list, B: list, eps: float, trials: int, seed: int):
    A_arr, B_arr = np.asarray(A), np.asarray(B)
    Adj = G.adjacency_matrix()
    M = Adj[np.ix_(A_arr, B_arr)].astype(np.int64)
    a, b = M.shape
    e = int(M.sum())
    d0 = e / (a * b)
    amin = next(t for t in range(a + 1) if large_enough(t, a, eps)) if large_enough(a, a, eps) else a + 1
    bmin = next(t for t in range(b + 1) if large_enough(t, b, eps)) if large_enough(b, b, eps) else b + 1
    amin, bmin = max(amin, 1), max(bmin, 1)
    if amin > a or bmin > b:
        return None

    def check(rs: np.ndarray, cs: np.ndarray):
        a1, b1 = int(rs.sum()), int(cs.sum())
        if a1 < amin or b1 < bmin:
            return None
        e1 = int(M[np.ix_(rs, cs)].sum())
        if violates(e1, a1, b1, e, a, b, eps):
            return list(A_arr[rs]), list(B_arr[cs])
        return None

    def polish(rs: np.ndarray, rounds: int = 4):
        cs = np.ones(b, dtype=bool)
        for _ in range(rounds):
            if rs.sum() < amin:
                return None
            _, sel = _best_side(M, rs, bmin, d0)
            cs = np.zeros(b, dtype=bool)
            cs[sel] = True
            hit = check(rs, cs)
            if hit:
                return hit
            _, sel = _best_side(M.T, cs, amin, d0)
            rs = np.zeros(a, dtype=bool)
            rs[sel] = True
            hit = check(rs, cs)
            if hit:
                return hit
        return None

    # (i) degree-deviation candidates, both sides
    for side_M, flip in ((M, False), (M.T, True)):
        n_side, n_other = side_M.shape
        frac = side_M.sum(axis=1) / n_other
        for sel in (frac >= d0 + eps, frac <= d0 - eps):
            rs, cs = sel, np.ones(n_other, dtype=bool)
            hit = check(cs, rs) if flip else check(rs, cs)
            if hit:
                return hit
    for sel in (M.sum(axis=1) / b >= d0, M.sum(axis=1) / b <= d0):
        hit = polish(sel.copy())
        if hit:
            return hit
    # (ii) random subset pairs, best few polished
    rng = np.random.default_rng(seed)
    batch = 256
    scored = []
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        sa = rng.integers(amin, a + 1, size=m)
        sb = rng.integers(bmin, b + 1, size=m)
        RA = np.argsort(rng.random((m, a)), axis=1) < sa[:, None]
        RB = np.argsort(rng.random((m, b)), axis=1) < sb[:, None]
        e1 = ((RA.astype(np.int64) @ M) * RB).sum(axis=1)
        for i in range(m):
            if violates(int(e1[i]), int(sa[i]), int(sb[i]), e, a, b, eps):
                return list(A_arr[RA[i]]), list(B_arr[RB[i]])
        dev = np.abs(e1 / (sa * sb) - d0)
        for i in np.argsort(-dev)[:4]:
            scored.append((float(dev[i]), RA[i].copy()))
        done += m
    scored.sort(key=lambda t: -t[0])
    for _, rs in scored[:16]:
        hit = polish(rs)
        if hit:
            return hit
    return None


def uniformity_check(G: Graph, A, B, eps: float, mode: str = "auto", trials: int = 2000,
                     seed: int = 0, exact_cap: int = EXACT_CAP, backend=None) -> UniformityVerdict:
    """Decide (exact) or probe (heuristic) whether (A, B) is eps-uniform.

    Exact mode enumerates every subset of the smaller side and, for each, the
    extreme subsets of the other side of every admissible size; this is
    equivalent to the full double subset scan because for fixed A' and |B'|
    the density is monotone in the degree sum.  Heuristic mode only ever
    returns verified witnesses.
    """
    A, B = [int(v) for v in A], [int(v) for v in B]
    if not A or not B or set(A) & set(B):
        raise ValueError("A and B must be disjoint and nonempty")
    if mode == "auto":
        mode = "exact" if max(len(A), len(B)) <= exact_cap else "heuristic"
    if mode == "exact":
        if max(len(A), len(B)) > exact_cap:
            raise ValueError(f"exact mode requires |A|, |B| <= {exact_cap}")
        hit = _exact_scan(G, A, B, eps, backend)
    elif mode == "heuristic":
        hit = _heuristic_scan(G, A, B, eps, trials, seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if hit is None:
        return UniformityVerdict(True, mode)
    if not witness_valid(G, A, B, hit[0], hit[1], eps):  # pragma: no cover - guarded invariant
        raise AssertionError("internal error: invalid witness")
    return _verdict(G, A, B, hit[0], hit[1], mode)


# ---------------------------------------------------------------- energy and refinement


def block_counts(G: Graph, P: Partition, A: Optional[np.ndarray] = None) -> np.ndarray:
    """Ordered edge counts e(C_i, C_j) for parts 1..k (object array of ints)."""
    if A is None:
        A = G.adjacency_matrix()
    onehot = np.zeros((G.n, P.k + 1), dtype=np.int64)
    onehot[np.arange(G.n), P.assignment] = 1
    E = onehot.T @ A.astype(np.int64) @ onehot
    return E[1:, 1:]


def partition_energy_exact(G: Graph, P: Partition, A: Optional[np.ndarray] = None) -> Fraction:
    E = block_counts(G, P, A)
    sizes = P.sizes()
    total = Fraction(0)
    for i in range(P.k):
        for j in range(P.k):
            if sizes[i] and sizes[j]:
                total += Fraction(int(E[i, j]) ** 2, sizes[i] * sizes[j])
    return total / (G.n * G.n) if G.n else Fraction(0)


def partition_energy(G: Graph, P: Partition, A: Optional[np.ndarray] = None) -> float:
    """q(P) = sum over ordered pairs of parts of |C_i||C_j|/n^2 d(C_i, C_j)^2."""
    return float(partition_energy_exact(G, P, A))


def _pair_checks(G: Graph, P: Partition, eps: float, mode: str, trials: int, seed: int):
    parts = P.parts()
    out = {}
    for i, j in combinations(range(P.k), 2):
        if len(parts[i]) == 0 or len(parts[j]) == 0:
            continue
        m = mode
        if m == "auto":
            m = "exact" if max(len(parts[i]), len(parts[j])) <= EXACT_CAP else "heuristic"
        out[(i, j)] = uniformity_check(G, parts[i], parts[j], eps, m, trials,
                                       seed + 7919 * i + j)
    return out


def refine_step(G: Graph, P: Partition, eps: float, mode: str = "auto", trials: int = 2000,
                seed: int = 0) -> tuple[Partition, float, dict]:
    """Venn-refine every part by the witnesses of its non-uniform pairs.

    Returns (P', q(P') - q(P), info).  C_0 is left untouched.
    """
    A = G.adjacency_matrix()
    checks = _pair_checks(G, P, eps, mode, trials, seed)
    bad = {key: v for key, v in checks.items() if not v.uniform}
    info = {
        "pairs": len(checks),
        "nonuniform": len(bad),
        "modes": sorted({v.mode for v in checks.values()}),
    }
    if not bad:
        return P, 0.0, info
    parts = P.parts()
    cuts: list[list[set]] = [[] for _ in range(P.k)]
    for (i, j), v in bad.items():
        cuts[i].append(set(v.witness[0]))
        cuts[j].append(set(v.witness[1]))
    new_parts = []
    for i, part in enumerate(parts):
        groups: dict[tuple, list] = {}
        for x in part.tolist():
            sig = tuple(x in c for c in cuts[i])
            groups.setdefault(sig, []).append(x)
        for sig in sorted(groups, reverse=True):
            new_parts.append(groups[sig])
    P2 = Partition.from_parts(G.n, new_parts, P.exceptional().tolist())
    gain = float(partition_energy_exact(G, P2, A) - partition_energy_exact(G, P, A))
    info["witness_modes"] = sorted({v.mode for v in bad.values()})
    return P2, gain, info


def nonuniform_mass(G: Graph, P: Partition, eps: float, mode: str = "auto") -> Fraction:
    """Sum over ordered non-uniform pairs of |C_i||C_j| / n^2."""
    sizes = P.sizes()
    total = Fraction(0)
    for (i, j), v in _pair_checks(G, P, eps, mode, 2000, 0).items():
        if not v.uniform:
            total += Fraction(2 * sizes[i] * sizes[j], G.n * G.n)
    return total


def _equalize(P: Partition, eps: float) -> Partition:
    """Cut parts into equal chunks of the largest size g keeping |C_0| < eps n."""
    n = P.n
    parts = [p.tolist() for p in P.parts() if len(p)]
    spill = P.exceptional().tolist()
    if not parts:
        return Partition(np.zeros(n, dtype=np.int64), 0)
    for g in range(max(len(p) for p in parts), 0, -1):
        left = len(spill) + sum(len(p) % g for p in parts)
        if left < eps * n or g == 1:
            break
    chunks, rest = [], list(spill)
    for p in parts:
        q = len(p) // g
        chunks += [p[c * g:(c + 1) * g] for c in range(q)]
        rest += p[q * g:]
    return Partition.from_parts(n, chunks, rest)


def is_uniform_partition(P: Partition, checks: dict, eps: float) -> bool:
    bad = sum(1 for v in checks.values() if not v.uniform)
    return (len(P.exceptional()) < eps * P.n and P.is_equitable()
            and bad <= eps * math.comb(P.k, 2))


def extract_type(G: Graph, P: Partition, eps: float, A: Optional[np.ndarray] = None) -> SzemerediType:
    E = block_counts(G, P, A)
    sizes = np.array(P.sizes(), dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        S = np.where(np.outer(sizes, sizes) > 0, E / np.outer(sizes, sizes), 0.0)
    np.fill_diagonal(S, 0.0)
    return SzemerediType(max(P.k, 1), eps, S if P.k else np.zeros((1, 1)))


def regular_decompose(G: Graph, eps: float, k_cap: int = 64, k_init: int = 1,
                      mode: str = "auto", trials: int = 2000, seed: int = 0,
                      max_iter: Optional[int] = None) -> tuple[Partition, SzemerediType, dict]:
    """Energy-increment refinement from an equitable start, then equalisation.

    The start splits the vertices round-robin into ``k_init`` parts after a
    seeded shuffle (``k_init = 1`` is the trivial partition).  Refinement
    stops when at most eps * C(k, 2) pairs are non-uniform.
    """
    if G.n < 2:
        raise ValueError("need at least two vertices")
    rng = np.random.default_rng(seed)
    order = rng.permutation(G.n) if k_init > 1 else np.arange(G.n)
    assign = np.zeros(G.n, dtype=np.int64)
    assign[order] = np.arange(G.n) % k_init + 1
    P = Partition(assign, k_init)
    A = G.adjacency_matrix()
    history = [partition_energy(G, P, A)]
    cap = max_iter if max_iter is not None else int(math.ceil(eps**-5)) + 1
    it = 0
    while True:
        checks = _pair_checks(G, P, eps, mode, trials, seed + it)
        bad = sum(1 for v in checks.values() if not v.uniform)
        if bad <= eps * math.comb(P.k, 2) or it >= cap:
            break
        P, gain, _ = refine_step(G, P, eps, mode, trials, seed + it)
        it += 1
        history.append(history[-1] + gain)
        if P.k > k_cap:
            raise KCapExceeded(f"refinement reached {P.k} parts (cap {k_cap})", P)
    P_eq = _equalize(P, eps)
    if P_eq.k > k_cap:
        raise KCapExceeded(f"equalisation produced {P_eq.k} parts (cap {k_cap})", P_eq)
    final_checks = _pair_checks(G, P_eq, eps, mode, trials, seed)
    S = extract_type(G, P_eq, eps, A)
    report = {
        "iterations": it,
        "energy_history": history,
        "exceptional_size": int(len(P_eq.exceptional())),
        "exceptional_ok": bool(len(P_eq.exceptional()) < eps * G.n),
        "nonuniform_pairs": sum(1 for v in final_checks.values() if not v.uniform),
        "uniform_partition": is_uniform_partition(P_eq, final_checks, eps),
        "audit_modes": sorted({v.mode for v in final_checks.values()}),
        "iteration_cap_hit": it >= cap,
    }
    return P_eq, S, report


# ---------------------------------------------------------------- mean densities


def _pattern_graph(F) -> Graph:
    return F.graph if isinstance(F, RootedPattern) else F


def _is_clique(H: Graph) -> bool:
    return H.num_edges == math.comb(H.n, 2)


def _pair_index(k: int) -> np.ndarray:
    idx = np.full((k, k), -1, dtype=np.int64)
    iu = np.triu_indices(k, 1)
    idx[iu] = np.arange(len(iu[0]))
    idx[(iu[1], iu[0])] = np.arange(len(iu[0]))
    return idx


def proper_map_count(H: Graph, k: int) -> int:
    """Number of proper k-colourings of H (chromatic polynomial at k)."""
    order = list(range(H.n))
    count = 0
    colors = [0] * H.n

    def rec(i):
        nonlocal count
        if i == H.n:
            count += 1
            return
        for c in range(k):
            if all(not H.has_edge(order[i], order[j]) or colors[j] != c for j in range(i)):
                colors[i] = c
                rec(i + 1)

    if _is_clique(H):
        return math.perm(k, H.n)
    rec(0)
    return count


class DensityPolynomial:
    """t(S, H) as a multilinear polynomial in the C(k,2) entries of S.

    Every proper map psi: V(H) -> [k] contributes the product of s over the
    distinct part pairs {psi(u), psi(v)}, uv in E(H).  Normalised by the
    number of proper maps this is the distinct-parts mean density (for a
    clique, the average over r-subsets of parts); normalised by k^r it is the
    probability that H appears in S restricted to a uniform J in [k]^r.
    """

    def __init__(self, H: Graph, k: int, cap: int = POLY_CAP):
        self.k, self.r = k, H.n
        self.N = math.comb(k, 2)
        edges = H.edges()
        pidx = _pair_index(k)
        if _is_clique(H):
            if H.n > k:
                raise ValueError("k is smaller than the clique size")
            if math.comb(k, H.n) > cap:
                raise OverflowError("too many monomials")
            subsets = np.array(list(combinations(range(k), H.n)), dtype=np.int64).reshape(-1, H.n)
            cols = [pidx[subsets[:, u], subsets[:, v]] for u, v in edges]
            mon = np.stack(cols, axis=1) if cols else np.zeros((len(subsets), 0), dtype=np.int64)
            coef = np.full(len(subsets), float(math.factorial(H.n)))
            self.proper = math.perm(k, H.n)
        else:
            maps = np.zeros((1, 0), dtype=np.int16)
            for v in range(H.n):
                m = maps.shape[0]
                ext = np.concatenate([np.repeat(maps, k, axis=0),
                                      np.tile(np.arange(k, dtype=np.int16), m)[:, None]], axis=1)
                ok = np.ones(ext.shape[0], dtype=bool)
                for u in range(v):
                    if H.has_edge(u, v):
                        ok &= ext[:, u] != ext[:, v]
                maps = ext[ok]
                if maps.shape[0] > cap:
                    raise OverflowError("too many proper maps")
            self.proper = int(maps.shape[0])
            if not edges:
                mon = np.zeros((1, 0), dtype=np.int64)
                coef = np.array([float(self.proper)])
            else:
                raw = np.stack([pidx[maps[:, u], maps[:, v]] for u, v in edges], axis=1)
                raw.sort(axis=1)
                dup = np.zeros_like(raw, dtype=bool)
                dup[:, 1:] = raw[:, 1:] == raw[:, :-1]
                raw[dup] = self.N
                raw.sort(axis=1)
                mon, counts = np.unique(raw, axis=0, return_counts=True)
                coef = counts.astype(float)
        self.mon = mon.astype(np.int64)
        self.coef = coef
        if self.proper == 0:
            raise ValueError("k is too small for a proper colouring of the pattern")

    def _ext(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.N,):
            raise ValueError(f"expected {self.N} entries")
        return np.append(x, 1.0)

    def raw_value(self, x) -> float:
        xe = self._ext(x)
        return float(self.coef @ np.prod(xe[self.mon], axis=1))

    def value(self, x) -> float:
        return self.raw_value(x) / self.proper

    def sampling_value(self, x) -> float:
        return self.raw_value(x) / self.k**self.r

    def grad(self, x) -> np.ndarray:
        """Gradient of :meth:`value` with respect to the upper-triangular entries."""
        xe = self._ext(x)
        vals = xe[self.mon]
        e = vals.shape[1]
        g = np.zeros(self.N + 1)
        if e == 0:
            return g[:-1]
        ones = np.ones((vals.shape[0], 1))
        prefix = np.cumprod(np.concatenate([ones, vals], axis=1), axis=1)
        suffix = np.cumprod(np.concatenate([ones, vals[:, ::-1]], axis=1), axis=1)[:, ::-1]
        for l in range(e):
            w = self.coef * prefix[:, l] * suffix[:, l + 1]
            g += np.bincount(self.mon[:, l], weights=w, minlength=self.N + 1)
        return g[:-1] / self.proper


@lru_cache(maxsize=64)
def _poly_cached(key: tuple, k: int) -> DensityPolynomial:
    n, edges = key
    return DensityPolynomial(Graph.from_edges(n, edges), k)


def density_polynomial(F, k: int) -> DensityPolynomial:
    H = _pattern_graph(F)
    return _poly_cached((H.n, tuple(H.edges())), k)


def _as_matrix(S) -> np.ndarray:
    return S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)


def mean_density_mc(S, F, samples: int, seed: int = 0,
                    semantics: str = "distinct") -> tuple[float, float]:
    """Unbiased Monte Carlo estimate of t(S, F) and its standard error."""
    M = _as_matrix(S)
    k = M.shape[0]
    H = _pattern_graph(F)
    edges = H.edges()
    rng = np.random.default_rng(seed)
    vals = np.empty(0)
    need = samples
    while need > 0:
        m = max(need, 1024)
        if semantics == "distinct" and _is_clique(H):
            J = np.argsort(rng.random((m, k)), axis=1)[:, :H.n]
        else:
            J = rng.integers(0, k, size=(m, H.n))
        proper = np.ones(m, dtype=bool)
        for u, v in edges:
            proper &= J[:, u] != J[:, v]
        if semantics == "distinct":
            J = J[proper]
            proper = proper[proper]
        prods = np.ones(len(J))
        if edges:
            pidx = _pair_index(k)
            pairs = np.stack([pidx[J[:, u], J[:, v]] for u, v in edges], axis=1)
            pairs.sort(axis=1)
            first = np.ones_like(pairs, dtype=bool)
            first[:, 1:] = pairs[:, 1:] != pairs[:, :-1]
            x = matrix_to_vector(M)
            xv = np.where(pairs >= 0, x[np.maximum(pairs, 0)], 0.0)
            prods = np.prod(np.where(first, xv, 1.0), axis=1)
        vals = np.concatenate([vals, np.where(proper, prods, 0.0)])
        need = samples - len(vals)
    vals = vals[:samples]
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def mean_density(S, F, semantics: str = "distinct", seed: int = 0) -> float:
    """Mean density t(S, F) of a type.

    ``semantics="distinct"``: average over proper placements of the pattern's
    vertices on parts (for a clique, over r-subsets of parts).
    ``semantics="sampling"``: probability that F appears in S restricted to a
    uniform J in [k]^r; differs from the above by a factor
    proper_maps / k^r = 1 - O(1/k).
    Falls back to Monte Carlo (standard error <= 1e-3) when exact
    enumeration is too large.
    """
    M = _as_matrix(S)
    k = M.shape[0]
    H = _pattern_graph(F)
    if _is_clique(H) and H.n > k:
        raise ValueError("k is smaller than the clique size")
    try:
        poly = density_polynomial(H, k)
    except OverflowError:
        est, se = mean_density_mc(M, H, 250_000, seed, semantics)
        return est
    x = matrix_to_vector(M)
    return poly.value(x) if semantics == "distinct" else poly.sampling_value(x)


# ---------------------------------------------------------------- membership


def _match_permutation(E: np.ndarray, S: np.ndarray, g: int, max_k: int = 8):
    """Permutation pi with |E[pi i, pi j] - s_ij g^2| < 1 for all i != j, if one is found."""
    k = S.shape[0]
    target = S * g * g
    candidates = permutations(range(k)) if k <= max_k else [tuple(range(k))]
    for pi in candidates:
        pi = np.array(pi)
        D = np.abs(E[np.ix_(pi, pi)] - target)
        np.fill_diagonal(D, 0)
        if (D < 1).all():
            return pi
    return None


def type_membership(G: Graph, S: SzemerediType, partition: Optional[Partition] = None,
                    restarts: int = 4, mode: str = "auto", seed: int = 0) -> dict:
    """Search for a (k, eps)-uniform partition whose densities match S.

    A positive answer carries the certifying assignment; a negative answer
    only means no certificate was found.
    """
    k, eps = S.k, S.eps
    A = G.adjacency_matrix()
    cands = [partition] if partition is not None else []
    if partition is None:
        for t in range(restarts):
            try:
                P, _, _ = regular_decompose(G, eps, k_cap=4 * k, k_init=k, mode=mode, seed=seed + t)
            except KCapExceeded:
                continue
            cands.append(P)
    for P in cands:
        if P.k != k or not P.is_equitable() or len(P.exceptional()) >= eps * G.n:
            continue
        checks = _pair_checks(G, P, eps, mode, 2000, seed)
        if not is_uniform_partition(P, checks, eps):
            continue
        g = P.sizes()[0]
        pi = _match_permutation(block_counts(G, P, A), S.S, g)
        if pi is None:
            continue
        inv = np.empty(k + 1, dtype=np.int64)
        inv[0] = 0
        inv[pi + 1] = np.arange(1, k + 1)
        cert = inv[P.assignment]
        return {"member": True, "certificate": cert.tolist(),
                "audit_modes": sorted({v.mode for v in checks.values()})}
    return {"member": False, "certificate": None, "candidates_tried": len(cands)}
