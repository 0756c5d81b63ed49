"""Graphs, rooted patterns, rooted-copy counting and subgraph densities.

Graphs are stored as bitset rows (one Python int per vertex).  Copies are
counted non-induced: an injection of the pattern's vertices that maps edges
to edges.  Rooted copies at ``v`` quotient the injections sending the root to
``v`` by the automorphisms fixing the root; unrooted copies quotient all
injections by the full automorphism group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, perm
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels

AUT_CAP = 16
MERGE_CAP = 16
_INT64_SAFE = 2**62


class SizeCapError(ValueError):
    """A desk-scale size cap was exceeded."""


class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with bitset rows."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 0 or len(rows) != n:
            raise ValueError("row count must equal n")
        full = (1 << n) - 1
        rows = tuple(int(x) for x in rows)
        for i, x in enumerate(rows):
            if x & ~full or (x >> i) & 1:
                raise ValueError(f"invalid adjacency row {i}")
        for i, x in enumerate(rows):
            y = x
            while y:
                b = y & -y
                j = b.bit_length() - 1
                if not (rows[j] >> i) & 1:
                    raise ValueError("adjacency must be symmetric")
                y ^= b
        self.n = n
        self.rows = rows
        self._hash = None

    @classmethod
    def _trusted(cls, n: int, rows: Sequence[int]) -> "Graph":
        g = object.__new__(cls)
        g.n = n
        g.rows = tuple(rows)
        g._hash = None
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"invalid edge ({u}, {v})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls._trusted(n, rows)

    @classmethod
    def from_adjacency(cls, A) -> "Graph":
        A = np.asarray(A, dtype=bool)
        n = A.shape[0]
        if A.shape != (n, n) or (A != A.T).any() or A.diagonal().any():
            raise ValueError("adjacency must be square, symmetric, zero-diagonal")
        if n == 0:
            return cls._trusted(0, [])
        packed = np.packbits(A, axis=1, bitorder="little")
        rows = [int.from_bytes(row.tobytes(), "little") for row in packed]
        return cls._trusted(n, rows)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Graph":
        """Graph whose edge set is the bitmask over pairs (i<j) in lexicographic order."""
        rows = [0] * n
        b = 0
        for i in range(n):
            for j in range(i + 1, n):
                if (mask >> b) & 1:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                b += 1
        return cls._trusted(n, rows)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls._trusted(n, [full ^ (1 << i) for i in range(n)])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls._trusted(n, [0] * n)

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i, x in enumerate(self.rows):
            y = x >> (i + 1)
            j = i + 1
            while y:
                if y & 1:
                    out.append((i, j))
                y >>= 1
                j += 1
        return out

    @property
    def num_edges(self) -> int:
        return sum(x.bit_count() for x in self.rows) // 2

    def degrees(self) -> list[int]:
        return [x.bit_count() for x in self.rows]

    def with_edge(self, u: int, v: int) -> "Graph":
        rows = list(self.rows)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        return Graph._trusted(self.n, rows)

    def without_edge(self, u: int, v: int) -> "Graph":
        rows = list(self.rows)
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
        return Graph._trusted(self.n, rows)

    def mask(self) -> int:
        """Inverse of :meth:`from_mask`."""
        out = 0
        b = 0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if (self.rows[i] >> j) & 1:
                    out |= 1 << b
                b += 1
        return out

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges():
            A[i, j] = A[j, i] = True
        return A

    def words(self) -> np.ndarray:
        """Adjacency as a (n, W) uint64 array, W = ceil(n / 64)."""
        W = max(1, (self.n + 63) // 64)
        out = np.zeros((self.n, W), dtype=np.uint64)
        mask64 = (1 << 64) - 1
        for i, x in enumerate(self.rows):
            for w in range(W):
                out[i, w] = (x >> (64 * w)) & mask64
        return out

    def relabel(self, perm_: Sequence[int]) -> "Graph":
        """Graph with vertex ``i`` renamed ``perm_[i]``."""
        return Graph.from_edges(self.n, [(perm_[u], perm_[v]) for u, v in self.edges()])

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


# ---------------------------------------------------------------- automorphisms


def _refined_colors(rows: Sequence[int], n: int, seed_colors: Sequence[int]) -> list[int]:
    """Colour refinement (1-WL) started from ``seed_colors``."""
    colors = list(seed_colors)
    while True:
        sigs = []
        for v in range(n):
            nb = []
            y = rows[v]
            while y:
                b = y & -y
                nb.append(colors[b.bit_length() - 1])
                y ^= b
            sigs.append((colors[v], tuple(sorted(nb))))
        index = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [index[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _extends(rows, n, colors, assign: dict, order: list[int]) -> bool:
    """Whether the partial map ``assign`` extends to an automorphism."""
    used = set(assign.values())
    todo = [v for v in order if v not in assign]

    def rec(idx: int) -> bool:
        if idx == len(todo):
            return True
        v = todo[idx]
        for w in range(n):
            if w in used or colors[w] != colors[v]:
                continue
            ok = True
            for u, img in assign.items():
                if ((rows[v] >> u) & 1) != ((rows[w] >> img) & 1):
                    ok = False
                    break
            if ok:
                assign[v] = w
                used.add(w)
                if rec(idx + 1):
                    del assign[v]
                    used.discard(w)
                    return True
                del assign[v]
                used.discard(w)
        return False

    return rec(0)


def automorphism_count(H: Graph, fixed_root: Optional[int] = None, cap: int = AUT_CAP) -> int:
    """|Aut(H)|, or the number of automorphisms fixing ``fixed_root``.

    Exhaustive search with colour-refinement pruning, organised as a
    stabiliser chain: |Aut| is the product of orbit sizes of successively
    fixed vertices.
    """
    n = H.n
    if n > cap:
        raise SizeCapError(f"automorphism search capped at {cap} vertices, got {n}")
    if n == 0:
        return 1
    rows = H.rows
    seed = [0] * n
    if fixed_root is not None:
        if not 0 <= fixed_root < n:
            raise ValueError("root out of range")
        seed[fixed_root] = 1
    colors = _refined_colors(rows, n, [(c, rows[v].bit_count()) for v, c in enumerate(seed)])
    # search order: high-degree vertices first, connected growth
    order = sorted(range(n), key=lambda v: (-rows[v].bit_count(), v))
    fixed: dict[int, int] = {}
    if fixed_root is not None:
        fixed[fixed_root] = fixed_root
    total = 1
    for v in order:
        if v in fixed:
            continue
        orbit = 0
        for w in range(n):
            if colors[w] != colors[v] or w in fixed.values():
                continue
            trial = dict(fixed)
            trial[v] = w
            if all(((rows[v] >> u) & 1) == ((rows[w] >> img) & 1) for u, img in fixed.items()) \
                    and _extends(rows, n, colors, trial, order):
                orbit += 1
        total *= orbit
        fixed[v] = v
    return total


# ---------------------------------------------------------------- rooted patterns


@dataclass(frozen=True)
class RootedPattern:
    """Small pattern graph with a designated root vertex."""

    graph: Graph
    root: int = 0
    aut_count: int = field(default=0, compare=False)
    root_aut_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if not 0 <= self.root < self.graph.n:
            raise ValueError("root out of range")
        if self.aut_count == 0:
            object.__setattr__(self, "aut_count", automorphism_count(self.graph))
        if self.root_aut_count == 0:
            object.__setattr__(self, "root_aut_count",
                               automorphism_count(self.graph, fixed_root=self.root))

    @property
    def r(self) -> int:
        return self.graph.n

    def search_plan(self) -> tuple[list[int], np.ndarray]:
        """Vertex order (root first, then breadth-first) and back-neighbour masks."""
        return search_plan(self.graph, self.root)

    def key(self) -> tuple:
        return (self.graph.n, tuple(self.graph.edges()), self.root)


def search_plan(H: Graph, root: int = 0) -> tuple[list[int], np.ndarray]:
    order = [root]
    seen = {root}
    head = 0
    while len(order) < H.n:
        if head == len(order):
            nxt = min(v for v in range(H.n) if v not in seen)
            order.append(nxt)
            seen.add(nxt)
        v = order[head]
        head += 1
        for u in range(H.n):
            if (H.rows[v] >> u) & 1 and u not in seen:
                order.append(u)
                seen.add(u)
    pos = {v: i for i, v in enumerate(order)}
    back = np.zeros(H.n, dtype=np.int64)
    for i, v in enumerate(order):
        m = 0
        for u in range(H.n):
            if (H.rows[v] >> u) & 1 and pos[u] < i:
                m |= 1 << pos[u]
        back[i] = m
    return order, back


def named_pattern(name: str) -> RootedPattern:
    """Built-in patterns: edge, triangle, k4, path3 (rooted at an end), star3 (rooted at the centre),
    bowtie (two triangles sharing the root)."""
    table = {
        "edge": (Graph.complete(2), 0),
        "triangle": (Graph.complete(3), 0),
        "k3": (Graph.complete(3), 0),
        "k4": (Graph.complete(4), 0),
        "path3": (Graph.from_edges(3, [(0, 1), (1, 2)]), 0),
        "star3": (Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]), 0),
        "bowtie": (Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]), 0),
    }
    if name not in table:
        raise KeyError(f"unknown pattern {name!r}; choose from {sorted(table)}")
    g, root = table[name]
    return RootedPattern(g, root)


def merge_at_root(F: RootedPattern, m: int, cap: int = MERGE_CAP) -> RootedPattern:
    """F^m: ``m`` copies of F glued at their roots; the glued vertex is the root (index 0)."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return F
    r = F.r
    size = 1 + m * (r - 1)
    if size > cap:
        raise SizeCapError(f"F^{m} has {size} vertices, cap is {cap}")
    others = [v for v in range(r) if v != F.root]
    edges = []
    for c in range(m):
        name = {F.root: 0}
        for idx, v in enumerate(others):
            name[v] = 1 + c * (r - 1) + idx
        edges += [(name[u], name[v]) for u, v in F.graph.edges()]
    return RootedPattern(Graph.from_edges(size, edges), 0)


# ---------------------------------------------------------------- counting


@dataclass(frozen=True)
class FDegreeVector:
    raw_degrees: tuple
    b_max: int

    def __post_init__(self):
        if any(x < 0 or x > self.b_max for x in self.raw_degrees):
            raise ValueError("raw degree outside [0, b_max]")


def rooted_injection_counts(G: Graph, H: Graph, root: int = 0, threads: int = 1) -> list[int]:
    """For each vertex v, the number of edge-preserving injections of H with root -> v."""
    if H.n > G.n:
        return [0] * G.n
    if H.n == 0:
        raise ValueError("empty pattern")
    _, back = search_plan(H, root)
    if perm(max(G.n - 1, 0), H.n - 1) < _INT64_SAFE:
        counts = kernels.active.rooted_injections(G.words(), G.n, back, threads)
        return [int(c) for c in counts]
    return kernels.python.rooted_injections_int(list(G.rows), G.n, back)


def rooted_copy_counts(G: Graph, F: RootedPattern, threads: int = 1) -> FDegreeVector:
    """Copies of F rooted at each vertex (root-fixing quotient)."""
    if F.r > G.n:
        raise ValueError("pattern larger than graph")
    inj = rooted_injection_counts(G, F.graph, F.root, threads)
    b_max, _ = extremal_counts(F, G.n)
    return FDegreeVector(tuple(x // F.root_aut_count for x in inj), b_max)


def f_degree_distribution(G: Graph, F: RootedPattern, threads: int = 1):
    """Empirical distribution of F-degrees normalised by b_{F,n}."""
    from .distributions import Empirical

    vec = rooted_copy_counts(G, F, threads)
    return Empirical([Fraction(x, vec.b_max) for x in vec.raw_degrees])


def extremal_counts(F, n: int) -> tuple[Optional[int], int]:
    """(b_max, c_complete): rooted copies at a vertex of K_n, and copies of F in K_n.

    b_max is None when F is an unrooted Graph.
    """
    if isinstance(F, RootedPattern):
        r, aut, raut = F.r, F.aut_count, F.root_aut_count
    else:
        r, aut, raut = F.n, automorphism_count(F), None
    if n < r:
        raise ValueError("n must be at least the pattern size")
    c_complete = perm(n, r) // aut
    b_max = perm(n - 1, r - 1) // raut if raut is not None else None
    return b_max, c_complete


def injection_count(G: Graph, H: Graph, threads: int = 1) -> int:
    """Total edge-preserving injections of H into G."""
    if H.n > G.n:
        return 0
    return sum(rooted_injection_counts(G, H, 0, threads))


def copy_count(G: Graph, H: Graph, threads: int = 1) -> int:
    """Non-induced unlabeled copies of H in G."""
    return injection_count(G, H, threads) // automorphism_count(H)


def subgraph_density_exact(G: Graph, H: Graph, threads: int = 1) -> Fraction:
    if H.n > G.n:
        raise ValueError("pattern larger than graph")
    return Fraction(injection_count(G, H, threads), perm(G.n, H.n))


def subgraph_density(G: Graph, H: Graph, threads: int = 1) -> float:
    """t(G, H) = copies of H in G / copies of H in K_n."""
    return float(subgraph_density_exact(G, H, threads))


# ---------------------------------------------------------------- merged families


def _is_rooted_clique(F: RootedPattern, r: int) -> bool:
    return F.r == r and F.graph.num_edges == comb(r, 2)


def _neighbourhood_matchings(A: np.ndarray, v: int, m: int) -> int:
    """Number of m-edge matchings in the subgraph induced by N(v)."""
    nb = np.flatnonzero(A[v])
    H = A[np.ix_(nb, nb)].astype(np.int64)
    d = H.sum(axis=1)
    E = int(d.sum()) // 2
    if m == 1:
        return E
    s2 = int((d * (d - 1) // 2).sum())
    if m == 2:
        return E * (E - 1) // 2 - s2
    # m == 3: each 3-matching is counted once per edge, via 2-matchings of H - {a, b}
    ia, ib = np.nonzero(np.triu(H, 1))
    if len(ia) == 0:
        return 0
    s = H @ d
    common = (H @ H)[ia, ib]
    da, db = d[ia], d[ib]
    E2 = E - da - db + 1
    rest = (s2 - da * (da - 1) // 2 - db * (db - 1) // 2
            - (s[ia] + s[ib] - da - db) + (da + db - 2 + common))
    M2 = E2 * (E2 - 1) // 2 - rest
    total = int(M2.sum())
    assert total % 3 == 0
    return total // 3


def merged_rooted_injections(G: Graph, F: RootedPattern, m: int, threads: int = 1,
                             A: Optional[np.ndarray] = None) -> list[int]:
    """Per-vertex rooted injections of F^m, with closed forms for edge and triangle.

    Rooted edge: F^m is a star and the count is the falling factorial (deg)_m.
    Rooted triangle, m <= 3: blades of F^m at v are disjoint edges inside N(v),
    so the count is 2^m m! times the number of m-matchings of G[N(v)].
    Other cases run the backtracking kernel on F^m.
    """
    if _is_rooted_clique(F, 2):
        return [perm(d, m) for d in G.degrees()]
    if _is_rooted_clique(F, 3) and m <= 3:
        if A is None:
            A = G.adjacency_matrix()
        scale = 2**m * perm(m, m)
        return [scale * _neighbourhood_matchings(A, v, m) for v in range(G.n)]
    Fm = merge_at_root(F, m)
    return rooted_injection_counts(G, Fm.graph, Fm.root, threads)


def merged_density_exact(G: Graph, F: RootedPattern, m: int, threads: int = 1,
                         A: Optional[np.ndarray] = None) -> Fraction:
    """t(G, F^m) via :func:`merged_rooted_injections`."""
    size = 1 + m * (F.r - 1)
    inj = merged_rooted_injections(G, F, m, threads, A)
    # F^m for m >= 2 is rooted at a vertex; every injection is counted at its root image
    return Fraction(sum(inj), perm(G.n, size))
