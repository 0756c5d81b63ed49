"""Exhaustive ground truth at small n, block-model sampling and empirical audits.

Labeled graphs on n vertices are identified with edge bitmasks: bit b is the
b-th pair (i, j), i < j, in lexicographic order.  Every scan works on
contiguous mask ranges so shards merge by integer addition.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from multiprocessing import get_context
from typing import Iterator, Optional, Sequence

import numpy as np

from . import kernels
from .distributions import (Distribution, Empirical, PiecewiseDensity, moment_slack_bound, moments,
                            phi_vector, sandwich_radii)
from .graph import (Graph, RootedPattern, merge_at_root, merged_density_exact, search_plan,
                    subgraph_density_exact)
from .szemeredi import (Partition, SzemerediType, density_polynomial, matrix_to_vector,
                        uniformity_check)

LABELED_CAP = 8
UNLABELED_CAP = 7
CHUNK = 1 << 16
TIE_TOL = 1e-9


class CapExceeded(ValueError):
    pass


def decimal_fraction(x) -> Fraction:
    """Exact value of a parameter read as the decimal it prints as (0.6 -> 3/5)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(repr(float(x)))


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class EnumerationScope:
    n: int
    labeling: str = "labeled"
    shard: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.labeling not in ("labeled", "unlabeled"):
            raise ValueError("labeling must be 'labeled' or 'unlabeled'")
        cap = LABELED_CAP if self.labeling == "labeled" else UNLABELED_CAP
        if not 1 <= self.n <= cap:
            raise CapExceeded(f"{self.labeling} scans support 1 <= n <= {cap}")
        if self.shard is not None:
            lo, hi = self.shard
            if not 0 <= lo <= hi <= self.total_masks:
                raise ValueError("shard outside the mask range")

    @property
    def total_masks(self) -> int:
        return 1 << math.comb(self.n, 2)

    @property
    def mask_range(self) -> tuple[int, int]:
        return self.shard if self.shard is not None else (0, self.total_masks)

    def to_json(self) -> dict:
        return {"n": self.n, "labeling": self.labeling,
                "shard": list(self.shard) if self.shard else None}


# ---------------------------------------------------------------- enumeration


def _perm_bit_table(n: int) -> np.ndarray:
    """table[p, b] = index of the pair that pair b maps to under permutation p."""
    pairs = _pairs(n)
    idx = {pr: b for b, pr in enumerate(pairs)}
    perms = list(permutations(range(n)))
    table = np.empty((len(perms), len(pairs)), dtype=np.int64)
    for p, pi in enumerate(perms):
        for b, (i, j) in enumerate(pairs):
            u, v = pi[i], pi[j]
            table[p, b] = idx[(u, v) if u < v else (v, u)]
    return table


def unlabeled_classes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(representatives, orbit sizes): the minimal mask of each isomorphism class."""
    if n > UNLABELED_CAP:
        raise CapExceeded(f"unlabeled enumeration supports n <= {UNLABELED_CAP}")
    E = math.comb(n, 2)
    if E == 0:
        return np.array([0], dtype=np.int64), np.array([1], dtype=np.int64)
    table = _perm_bit_table(n)
    weights = np.int64(1) << table
    visited = np.zeros(1 << E, dtype=bool)
    reps, sizes = [], []
    ptr = 0
    total = 1 << E
    while ptr < total:
        window = visited[ptr:ptr + 4096]
        free = np.flatnonzero(~window)
        if free.size == 0:
            ptr += window.size
            continue
        m = ptr + int(free[0])
        bits = [b for b in range(E) if (m >> b) & 1]
        orbit = weights[:, bits].sum(axis=1) if bits else np.zeros(len(table), dtype=np.int64)
        orbit = np.unique(orbit)
        visited[orbit] = True
        reps.append(m)
        sizes.append(orbit.size)
        ptr = m + 1
    return np.array(reps, dtype=np.int64), np.array(sizes, dtype=np.int64)


def enumerate_graphs(scope: EnumerationScope) -> Iterator[Graph]:
    """Every graph of the scope exactly once, in increasing mask order."""
    if scope.labeling == "labeled":
        lo, hi = scope.mask_range
        for m in range(lo, hi):
            yield Graph.from_mask(scope.n, m)
    else:
        reps, _ = unlabeled_classes(scope.n)
        lo, hi = scope.mask_range
        for m in reps:
            if lo <= m < hi:
                yield Graph.from_mask(scope.n, int(m))


# ---------------------------------------------------------------- scanning core


def _plans(patterns: Sequence[RootedPattern]):
    backs = np.zeros((len(patterns), 8), dtype=np.int64)
    sizes = np.array([P.r for P in patterns], dtype=np.int64)
    for i, P in enumerate(patterns):
        backs[i, :P.r] = search_plan(P.graph, P.root)[1]
    return backs, sizes


def _counts_for_masks(n: int, masks: np.ndarray, patterns) -> np.ndarray:
    """Rooted injection counts, shape (len(masks), P, n), for an arbitrary mask list."""
    out = np.zeros((len(masks), len(patterns), n), dtype=np.int64)
    backs, sizes = _plans(patterns)
    for t, m in enumerate(masks):
        out[t] = kernels.active.scan_masks(n, int(m), int(m) + 1, backs, sizes)[0]
    return out


def _chunks(scope: EnumerationScope, patterns) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield (masks, weights, counts) blocks over the scope."""
    n = scope.n
    lo, hi = scope.mask_range
    if scope.labeling == "labeled":
        backs, sizes = _plans(patterns)
        for a in range(lo, hi, CHUNK):
            b = min(a + CHUNK, hi)
            counts = kernels.active.scan_masks(n, a, b, backs, sizes)
            yield np.arange(a, b, dtype=np.int64), np.ones(b - a, dtype=np.int64), counts
    else:
        reps, orbit = unlabeled_classes(n)
        keep = (reps >= lo) & (reps < hi)
        reps, orbit = reps[keep], orbit[keep]
        yield reps, np.ones(len(reps), dtype=np.int64), _counts_for_masks(n, reps, patterns)


def _cdf_exact(p: Distribution, x: Fraction, left: bool = False) -> Fraction:
    """CDF (or its left limit) of p at a rational point, in exact arithmetic."""
    if isinstance(p, Empirical):
        # atoms are stored as floats; compare against the float of c/b as the vectorised path does
        xf = x.numerator / x.denominator
        hits = sum(1 for a in p.atoms if (a < xf if left else a <= xf))
        return Fraction(hits, len(p.atoms))
    if not isinstance(p, PiecewiseDensity):
        raise TypeError("exact CDF needs a piecewise density or an empirical law")
    br = [decimal_fraction(b) for b in p.breaks]
    if x <= br[0]:
        return Fraction(0)
    total = Fraction(0)
    for i in range(len(p.left)):
        lo, hi = br[i], br[i + 1]
        if x <= lo:
            break
        top = min(x, hi)
        dl, dr = decimal_fraction(p.left[i]), decimal_fraction(p.right[i])
        slope = (dr - dl) / (hi - lo)
        # integral of dl + slope (y - lo) over [lo, top]
        w = top - lo
        total += dl * w + slope * w * w / 2
    return min(total, Fraction(1))


def ks_exact(degrees: Sequence[int], b: int, p: Distribution) -> Fraction:
    """KS between the empirical law of degrees / b and p, in exact arithmetic.

    The empirical CDF is constant on [c/b, (c+1)/b), so the supremum is
    attained at c/b or approached at ((c+1)/b)-.
    """
    n = len(degrees)
    best = Fraction(0)
    below = 0
    for c in range(b + 1):
        below += sum(1 for x in degrees if x == c)
        Fc = Fraction(below, n)
        best = max(best, abs(Fc - _cdf_exact(p, Fraction(c, b))))
        if c < b:
            best = max(best, abs(Fc - _cdf_exact(p, Fraction(c + 1, b), left=True)))
    return best


def _ks_rows(deg: np.ndarray, b: int, at: np.ndarray, left_next: np.ndarray) -> np.ndarray:
    """Vectorised KS of each row's empirical law (atoms deg/b) against tabulated CDF values."""
    n = deg.shape[1]
    c = np.arange(b + 1)
    Fg = (deg[:, :, None] <= c[None, None, :]).sum(axis=1) / n
    gap = np.abs(Fg - at[None, :]).max(axis=1)
    gap2 = np.abs(Fg[:, :-1] - left_next[None, :]).max(axis=1) if b > 0 else 0.0
    return np.maximum(gap, gap2)


class _HistJudge:
    """KS <= delta decisions with exact re-evaluation of near ties."""

    def __init__(self, p: Distribution, b: int, delta: float, n: int):
        self.p, self.b, self.delta, self.n = p, b, delta, n
        self.at = np.array([p.cdf(c / b) for c in range(b + 1)])
        self.left_next = np.array([p.cdf_left((c + 1) / b) for c in range(b)])
        self.exact_ok = isinstance(p, (PiecewiseDensity, Empirical))

    def __call__(self, deg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ks = _ks_rows(deg, self.b, self.at, self.left_next)
        inside = ks <= self.delta
        near = np.flatnonzero(np.abs(ks - self.delta) <= TIE_TOL)
        if self.exact_ok:
            d = decimal_fraction(self.delta)
            for t in near:
                inside[t] = ks_exact(deg[t].tolist(), self.b, self.p) <= d
        return inside, ks


def _check_cap(scope: EnumerationScope, patterns):
    for P in patterns:
        if P.r > 8:
            raise CapExceeded("patterns are limited to 8 vertices in scans")


def exact_hist_count(p: Distribution, F: RootedPattern, delta: float,
                     scope: EnumerationScope) -> int:
    """|{G : KS(p_G^F, p) <= delta}| over the scope, by full scan."""
    _check_cap(scope, [F])
    if F.r > scope.n:
        raise ValueError("pattern larger than n")
    b = math.perm(scope.n - 1, F.r - 1) // F.root_aut_count
    judge = _HistJudge(p, b, delta, scope.n)
    total = 0
    for _, w, counts in _chunks(scope, [F]):
        deg = counts[:, 0, :] // F.root_aut_count
        inside, _ = judge(deg)
        total += int(w[inside].sum())
    return total


def _densities(counts: np.ndarray, n: int, patterns) -> list[np.ndarray]:
    """t(G, F) per row as floats, plus integer numerators for exact comparisons."""
    out = []
    for q, P in enumerate(patterns):
        out.append(counts[:, q, :].sum(axis=1))
    return out


def _within(nums: np.ndarray, den: int, phi: float, radius: float) -> np.ndarray:
    """|num/den - phi| <= radius, exact for near ties."""
    vals = nums / den
    ok = np.abs(vals - phi) <= radius
    near = np.flatnonzero(np.abs(np.abs(vals - phi) - radius) <= TIE_TOL)
    fp, fr = decimal_fraction(phi), decimal_fraction(radius)
    for t in near:
        ok[t] = abs(Fraction(int(nums[t]), den) - fp) <= fr
    return ok


def exact_densities_count(phi: Sequence[float], gamma: Sequence[float], family,
                          scope: EnumerationScope) -> int:
    """|{G : |t(G, F_m) - phi_m| <= gamma_m for all m}| by full scan."""
    pats = [F if isinstance(F, RootedPattern) else RootedPattern(F, 0) for F in family]
    _check_cap(scope, pats)
    n = scope.n
    if any(P.r > n for P in pats):
        raise ValueError("pattern larger than n")
    dens = [math.perm(n, P.r) for P in pats]
    total = 0
    for _, w, counts in _chunks(scope, pats):
        inj = _densities(counts, n, pats)
        ok = np.ones(len(w), dtype=bool)
        for q in range(len(pats)):
            ok &= _within(inj[q], dens[q], phi[q], gamma[q])
        total += int(w[ok].sum())
    return total


# ---------------------------------------------------------------- sandwich verification


def _sandwich_shard(args):
    p, F, delta, d, n, lo, hi, outer, inner, phi, keep = args
    scope = EnumerationScope(n, "labeled", (lo, hi))
    pats = [F] + [merge_at_root(F, m) for m in range(2, d + 1)]
    b = math.perm(n - 1, F.r - 1) // F.root_aut_count
    judge = _HistJudge(p, b, delta, n)
    dens = [math.perm(n, P.r) for P in pats]
    hist = 0
    in_outer = 0
    in_inner = 0
    outer_bad, inner_bad = [], []
    n_outer_bad = n_inner_bad = 0
    for masks, w, counts in _chunks(scope, pats):
        deg = counts[:, 0, :] // F.root_aut_count
        inside, ks = judge(deg)
        inj = _densities(counts, n, pats)
        ok_out = np.ones(len(w), dtype=bool)
        for q in range(d):
            ok_out &= _within(inj[q], dens[q], phi[q], outer[q])
        hist += int(inside.sum())
        in_outer += int(ok_out.sum())
        bad = np.flatnonzero(inside & ~ok_out)
        n_outer_bad += len(bad)
        for t in bad[:max(0, keep - len(outer_bad))]:
            outer_bad.append(_counterexample(int(masks[t]), n, float(ks[t]), deg[t], b,
                                             [int(x[t]) for x in inj], dens, phi))
        if inner is not None:
            ok_in = np.ones(len(w), dtype=bool)
            for q in range(d):
                ok_in &= _within(inj[q], dens[q], phi[q], inner[q])
            in_inner += int(ok_in.sum())
            bad = np.flatnonzero(ok_in & ~inside)
            n_inner_bad += len(bad)
            for t in bad[:max(0, keep - len(inner_bad))]:
                inner_bad.append(_counterexample(int(masks[t]), n, float(ks[t]), deg[t], b,
                                                 [int(x[t]) for x in inj], dens, phi))
    return {"hist": hist, "outer_members": in_outer, "inner_members": in_inner,
            "outer_violations": n_outer_bad, "inner_violations": n_inner_bad,
            "outer_examples": outer_bad, "inner_examples": inner_bad}


def _counterexample(mask, n, ks, deg, b, inj, dens, phi) -> dict:
    G = Graph.from_mask(n, mask)
    xs = [int(x) for x in deg]
    mom = [sum((x / b) ** m for x in xs) / n for m in range(1, len(inj) + 1)]
    t = [x / dd for x, dd in zip(inj, dens)]
    return {"mask": mask, "n": n, "edges": G.edges(), "ks": ks, "degrees": xs,
            "densities": t, "moments": mom,
            "density_gaps": [abs(a - c) for a, c in zip(t, phi)]}


def finite_n_slack(F: RootedPattern, d: int, n: int, mode: str = "rigorous",
                   const: float = 10.0) -> list[float]:
    """Additive slack per m for the outer inclusion at finite n.

    ``rigorous``: worst case of |t(G, F^m) - E X^m| over all n-vertex graphs;
    ``constant``: const * max(c_m) / n; ``zero``: no slack.
    """
    if mode == "zero":
        return [0.0] * d
    if mode == "constant":
        return [const / n] * d
    if mode == "rigorous":
        out = []
        for m in range(1, d + 1):
            below, above = moment_slack_bound(F, m, n)
            out.append(float(max(below, above)))
        return out
    raise ValueError(f"unknown slack mode {mode!r}")


def sandwich_check(p: PiecewiseDensity, F: RootedPattern, delta: float, d: int,
                   scope: EnumerationScope, slack="rigorous", threads: int = 1,
                   keep: int = 20, timing: bool = False) -> dict:
    """Verify Hist within the outer box and the inner box within Hist, graph by graph.

    ``slack`` is a mode name for :func:`finite_n_slack` or an explicit list.
    The inner inclusion is checked with radii beta - slack and reported
    vacuous when the inner radii are infeasible or not larger than the slack.
    """
    if scope.labeling != "labeled":
        raise ValueError("sandwich checks scan labeled graphs")
    t0 = time.perf_counter()
    n = scope.n
    rep = phi_vector(p, F, d)
    radii = sandwich_radii(p, F, d, delta)
    sl = finite_n_slack(F, d, n, slack) if isinstance(slack, str) else [float(x) for x in slack]
    outer = [g + s for g, s in zip(radii.gamma, sl)]
    inner = None
    inner_note = None
    if not radii.beta_feasible:
        inner_note = "vacuous: inner radii infeasible"
    else:
        inner = [bt - s for bt, s in zip(radii.beta, sl)]
        if min(inner) < 0:
            inner, inner_note = None, "vacuous: inner radii smaller than the finite-n slack"
    lo, hi = scope.mask_range
    shards = max(1, threads)
    step = -(-(hi - lo) // shards)
    jobs = [(p, F, delta, d, n, a, min(a + step, hi), outer, inner, rep.phi, keep)
            for a in range(lo, hi, step)]
    if shards > 1 and len(jobs) > 1:
        with get_context("fork").Pool(shards) as pool:
            parts = pool.map(_sandwich_shard, jobs)
    else:
        parts = [_sandwich_shard(j) for j in jobs]
    agg = {key: sum(pt[key] for pt in parts)
           for key in ("hist", "outer_members", "inner_members", "outer_violations",
                       "inner_violations")}
    outer_ex = [e for pt in parts for e in pt["outer_examples"]][:keep]
    inner_ex = [e for pt in parts for e in pt["inner_examples"]][:keep]
    vacuous_m = [m for m, r in enumerate(outer, start=1) if r >= 1]
    out = {
        "scope": scope.to_json(),
        "graphs": hi - lo,
        "phi": rep.phi,
        "gamma": radii.gamma,
        "slack": sl,
        "slack_mode": slack if isinstance(slack, str) else "explicit",
        "outer_radius": outer,
        "outer_vacuous_m": vacuous_m,
        "hist_count": agg["hist"],
        "outer_members": agg["outer_members"],
        "outer_violations": agg["outer_violations"],
        "outer_holds": agg["outer_violations"] == 0,
        "outer_examples": outer_ex,
        "beta": radii.beta,
        "beta_feasible": radii.beta_feasible,
        "inner": "checked" if inner is not None else inner_note,
        "inner_members": agg["inner_members"] if inner is not None else None,
        "inner_violations": agg["inner_violations"] if inner is not None else None,
        "inner_examples": inner_ex,
        "shards": len(jobs),
        "verdict": "holds" if agg["outer_violations"] == 0 and agg["inner_violations"] == 0
        else "violated",
    }
    if timing:
        out["elapsed"] = time.perf_counter() - t0
    return out


# ---------------------------------------------------------------- block models and audits


def block_partition(k: int, g: int) -> Partition:
    return Partition(np.repeat(np.arange(1, k + 1), g), k)


def block_sample(S, g: int, seed: int = 0, cap: int = 5000, exact_counts: bool = False) -> Graph:
    """Random graph with parts of size g and cross edges Bernoulli(s_ij); no edges inside parts.

    With ``exact_counts`` each cross block gets exactly round(s_ij g^2) edges.
    """
    M = S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)
    k = M.shape[0]
    n = k * g
    if n > cap:
        raise CapExceeded(f"k * g = {n} exceeds the cap {cap}")
    rng = np.random.default_rng(seed)
    A = np.zeros((n, n), dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            if exact_counts:
                e = int(round(M[i, j] * g * g))
                blk = np.zeros(g * g, dtype=bool)
                blk[rng.choice(g * g, size=e, replace=False)] = True
                blk = blk.reshape(g, g)
            else:
                blk = rng.random((g, g)) < M[i, j]
            A[i * g:(i + 1) * g, j * g:(j + 1) * g] = blk
    A = A | A.T
    return Graph.from_adjacency(A)


def _triangle_density(A: np.ndarray) -> float:
    Af = A.astype(np.float64)
    n = A.shape[0]
    return float(np.einsum("ij,jk,ki->", Af, Af, Af) / (n * (n - 1) * (n - 2)))


def counting_lemma_audit(S, F: Graph, g: int, trials: int, eps: float, seed: int = 0,
                         audit: str = "all") -> dict:
    """Max |t(G, F) - t(S, F)| over block-model samples G, against 5 eps^(1/(r-2)).

    t(S, F) is the probability that F appears in S restricted to a uniform
    J in [k]^r (the sampling reading); the distinct-parts value is reported
    alongside.  ``audit`` controls the uniformity audit of the generating
    partition: "all", "first" or "none".
    """
    M = S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)
    k = M.shape[0]
    H = F.graph if isinstance(F, RootedPattern) else F
    r = H.n
    if r < 3:
        raise ValueError("the counting-lemma audit needs r >= 3")
    poly = density_polynomial(H, k)
    x = matrix_to_vector(M)
    t_sampling = poly.sampling_value(x)
    t_distinct = poly.value(x)
    clique3 = r == 3 and H.num_edges == 3
    devs, devs_distinct, audits = [], [], []
    P = block_partition(k, g)
    for i in range(trials):
        G = block_sample(M, g, seed + i)
        tg = _triangle_density(G.adjacency_matrix()) if clique3 else float(subgraph_density_exact(G, H))
        devs.append(abs(tg - t_sampling))
        devs_distinct.append(abs(tg - t_distinct))
        if audit == "all" or (audit == "first" and i == 0):
            parts = P.parts()
            bad = 0
            modes = set()
            for a in range(k):
                for b in range(a + 1, k):
                    v = uniformity_check(G, parts[a], parts[b], eps, "auto", seed=seed + i)
                    modes.add(v.mode)
                    bad += not v.uniform
            audits.append({"sample": i, "nonuniform_pairs": bad, "modes": sorted(modes)})
    bound = 5 * eps ** (1 / (r - 2))
    return {
        "t_S_sampling": t_sampling,
        "t_S_distinct": t_distinct,
        "max_deviation": max(devs) if devs else 0.0,
        "max_deviation_distinct": max(devs_distinct) if devs_distinct else 0.0,
        "bound": bound,
        "within_bound": (max(devs) if devs else 0.0) <= bound,
        "hypothesis_holds": eps < r ** -3,
        "note": None if eps < r ** -3 else "eps outside the formal hypothesis eps < r^-3",
        "uniformity_audit": audits,
        "all_audited_uniform": all(a["nonuniform_pairs"] == 0 for a in audits),
        "trials": trials,
    }


def fixed_split_count(n: int, s: float) -> dict:
    """Labeled graphs whose cross density under the split {0..n/2-1} | rest equals round(s g^2)/g^2.

    Returns the enumerated count and the closed form C(g^2, e) 2^(2 C(g, 2)).
    """
    if n % 2 or n > LABELED_CAP:
        raise ValueError("n must be even and at most 8")
    g = n // 2
    e = int(round(s * g * g))
    cross = [b for b, (i, j) in enumerate(_pairs(n)) if i < g <= j]
    cmask = sum(1 << b for b in cross)
    masks = np.arange(1 << math.comb(n, 2), dtype=np.int64) & cmask
    pop = np.zeros(len(masks), dtype=np.int64)
    for b in cross:
        pop += (masks >> b) & 1
    counted = int((pop == e).sum())
    formula = math.comb(g * g, e) * 2 ** (2 * math.comb(g, 2))
    return {"n": n, "g": g, "edges": e, "enumerated": counted, "formula": formula,
            "match": counted == formula}


def labeled_unlabeled_consistency(n: int) -> dict:
    reps, sizes = unlabeled_classes(n)
    total = int(sizes.sum())
    return {"n": n, "classes": len(reps), "orbit_sum": total,
            "labeled": 1 << math.comb(n, 2), "consistent": total == 1 << math.comb(n, 2)}


def gnp(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    A = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_adjacency(A | A.T)


def moment_density_gaps(G: Graph, F: RootedPattern, d: int) -> list[float]:
    """|t(G, F^m) - E X^m| for m = 1..d, X the normalised F-degree of a random vertex."""
    from .graph import rooted_copy_counts

    A = G.adjacency_matrix()
    vec = rooted_copy_counts(G, F)
    b = vec.b_max
    out = []
    for m in range(1, d + 1):
        mom = Fraction(sum(x**m for x in vec.raw_degrees), G.n * b**m)
        out.append(float(abs(merged_density_exact(G, F, m, A=A) - mom)))
    return out


def moment_gap_rate(F: RootedPattern, ns: Sequence[int], samples: int, d: int = 3,
                seed: int = 0, p: float = 0.5) -> dict:
    """max_m |t(G, F^m) - E X^m| on G(n, p) samples for each n."""
    out = {}
    for n in ns:
        vals = [max(moment_density_gaps(gnp(n, p, seed + 1000 * n + s), F, d))
                for s in range(samples)]
        out[n] = vals
    return out
