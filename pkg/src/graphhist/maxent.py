"""Maximum-entropy types under density constraints, and the size bounds built on them.

Types are handled as vectors of their C(k,2) upper-triangular entries.  All
entropies are in nats and sum over unordered pairs i < j; per-edge values
divide by k^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import Distribution, PiecewiseDensity, phi_vector, sandwich_radii
from .graph import Graph, RootedPattern, merge_at_root
from .szemeredi import (SzemerediType, density_polynomial, matrix_to_vector, mean_density,
                        vector_to_matrix)

LO, HI = 1e-12, 1 - 1e-12
FEAS_TOL = 1e-6


class InfeasibleError(RuntimeError):
    """No start reached the constraint set; carries the best residual excess."""

    def __init__(self, message: str, best: Optional["MaxEntSolution"] = None):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------- entropy


def h(x):
    """Binary entropy in nats, elementwise, with h(0) = h(1) = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log(x) - (1 - x) * np.log1p(-x)
    return np.where((x <= 0) | (x >= 1), 0.0, out)


def entropy(S) -> tuple[float, float]:
    """(H(S), H(S)/k^2) with H summed over i < j."""
    M = S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)
    k = M.shape[0]
    H = float(h(matrix_to_vector(M)).sum())
    return H, H / k**2


# ---------------------------------------------------------------- solver


def _graph(F) -> Graph:
    return F.graph if isinstance(F, RootedPattern) else F


@dataclass
class ConstraintSpec:
    family: list
    phi: Sequence[float]
    gamma: Sequence[float]
    k: int
    eps: float = 0.0

    def __post_init__(self):
        self.family = [_graph(F) for F in self.family]
        self.phi = [float(x) for x in self.phi]
        self.gamma = [float(x) for x in self.gamma]
        d = len(self.family)
        if len(self.phi) != d or len(self.gamma) != d:
            raise ValueError("family, phi and gamma must have equal length")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if any(not 0 <= x <= 1 for x in self.phi) or any(x < 0 for x in self.gamma):
            raise ValueError("phi must lie in [0, 1] and gamma must be nonnegative")
        if not 0 <= self.eps <= 1:
            raise ValueError("eps must lie in [0, 1]")

    @property
    def r_bar(self) -> int:
        return max(F.n for F in self.family)

    @property
    def counting_slack(self) -> float:
        return 5 * self.eps ** (1 / self.r_bar) if self.eps > 0 else 0.0

    @property
    def gamma_tilde(self) -> np.ndarray:
        return np.asarray(self.gamma) + self.counting_slack

    def to_json(self) -> dict:
        return {"family": [{"n": F.n, "edges": F.edges()} for F in self.family],
                "phi": self.phi, "gamma": self.gamma, "k": self.k, "eps": self.eps}


@dataclass
class MaxEntSolution:
    S_star: SzemerediType
    entropy: float
    per_edge_entropy: float
    densities: list
    residuals: list
    excess: float
    converged: bool
    starts: list = field(default_factory=list)
    rho: Optional[dict] = None

    def to_json(self) -> dict:
        return {"S": self.S_star.S.tolist(), "k": self.S_star.k, "entropy": self.entropy,
                "per_edge_entropy": self.per_edge_entropy, "densities": self.densities,
                "residuals": self.residuals, "excess": self.excess,
                "converged": self.converged, "starts": self.starts, "rho": self.rho}


class _Problem:
    def __init__(self, spec: ConstraintSpec):
        self.spec = spec
        self.polys = [density_polynomial(F, spec.k) for F in spec.family]
        self.phi = np.asarray(spec.phi)
        self.gt = spec.gamma_tilde
        self.N = math.comb(spec.k, 2)

    def t(self, x):
        return np.array([p.value(x) for p in self.polys])

    def grads(self, x):
        return np.stack([p.grad(x) for p in self.polys])

    def cons(self, x):
        """Inequality constraints c(x) <= 0: t - phi - g and phi - g - t."""
        t = self.t(x)
        return np.concatenate([t - self.phi - self.gt, self.phi - self.gt - t]), t

    def excess(self, x) -> float:
        c, _ = self.cons(x)
        return float(max(0.0, c.max()))


def _negent(x):
    return -float(h(x).sum())


def _negent_grad(x):
    return np.log(x) - np.log1p(-x)


def _project(x):
    return np.clip(x, LO, HI)


def _lagrangian(prob: _Problem, x, lam, mu):
    c, _ = prob.cons(x)
    z = np.maximum(0.0, lam + mu * c)
    val = _negent(x) + (np.sum(z**2) - np.sum(lam**2)) / (2 * mu)
    G = prob.grads(x)
    dc = np.concatenate([G, -G])
    grad = _negent_grad(x) + z @ dc
    return val, grad


def _inner(prob, x, lam, mu, iters: int, tol: float, memory: int = 10):
    """Projected gradient with Barzilai-Borwein steps and a nonmonotone Armijo test."""
    val, g = _lagrangian(prob, x, lam, mu)
    recent = [val]
    step = 1e-2
    x_prev = g_prev = None
    for _ in range(iters):
        if x_prev is not None:
            s, y = x - x_prev, g - g_prev
            sy = float(s @ y)
            step = float(s @ s) / sy if sy > 1e-300 else 1e-2
            step = min(max(step, 1e-10), 1e6)
        ref = max(recent)
        while True:
            xn = _project(x - step * g)
            vn, gn = _lagrangian(prob, xn, lam, mu)
            if vn <= ref - 1e-4 * float(g @ (x - xn)) or step < 1e-14:
                break
            step *= 0.5
        x_prev, g_prev = x, g
        x, val, g = xn, vn, gn
        recent = (recent + [val])[-memory:]
        if np.max(np.abs(x - _project(x - g))) < tol:
            break
    return x


def _solve_from(prob: _Problem, x0, outer: int, inner: int, tol: float):
    x = _project(np.asarray(x0, dtype=float))
    m = 2 * len(prob.polys)
    lam = np.zeros(m)
    mu = 10.0
    viol_prev = np.inf
    converged = False
    stalled = 0
    for j in range(outer):
        x = _inner(prob, x, lam, mu, inner, max(tol, 10.0 ** -(j + 2)))
        c, _ = prob.cons(x)
        viol = float(max(0.0, c.max()))
        lam = np.maximum(0.0, lam + mu * c)
        # complementarity measure
        comp = float(np.max(np.abs(np.minimum(-c, lam)))) if m else 0.0
        if viol <= FEAS_TOL * 1e-2 and comp <= 1e-8 and 10.0 ** -(j + 2) <= tol * 10:
            converged = True
            break
        if viol > 0.25 * viol_prev:
            if mu >= 1e12:
                stalled += 1
                if stalled >= 3:
                    break
            mu = min(mu * 10, 1e12)
        viol_prev = viol
    return x, converged


def _constant_start(poly, target: float) -> Optional[float]:
    """Constant s with poly(const s) = target, by bisection (value is increasing in s)."""
    N = poly.N
    f = lambda s: poly.value(np.full(N, s)) - target
    if f(0.0) > 0 or f(1.0) < 0:
        return None
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def solve_max_entropy(spec: ConstraintSpec, starts: int = 16, seed: int = 0,
                      outer: int = 60, inner: int = 500, tol: float = 1e-11,
                      raise_infeasible: bool = True) -> MaxEntSolution:
    """Maximise H(S) subject to |t(S, F_m) - phi_m| <= gamma_m (+ counting slack).

    Augmented Lagrangian (inequality form) over a box-projected gradient
    inner loop with Barzilai-Borwein steps, from several starts: all-1/2,
    constants matching each constraint centre, then random matrices.
    """
    prob = _Problem(spec)
    N = prob.N
    rng = np.random.default_rng(seed)
    x0s = [("half", np.full(N, 0.5))]
    for m, poly in enumerate(prob.polys):
        s = _constant_start(poly, spec.phi[m])
        if s is not None:
            x0s.append((f"const{m}", np.full(N, s)))
    # symmetric starts cannot leave the constant line; add jittered copies
    for name, x in list(x0s):
        x0s.append((name + "_jitter", np.clip(x + 1e-3 * rng.standard_normal(N), 0, 1)))
    while len(x0s) < starts:
        x0s.append((f"random{len(x0s)}", rng.random(N)))
    x0s = x0s[:max(starts, 1)]
    log = []
    best = None
    for name, x0 in x0s:
        cands = []
        x, conv = _solve_from(prob, x0, outer, inner, tol)
        cands.append((x, conv))
        if prob.excess(_project(x0)) <= FEAS_TOL:
            cands.append((_project(x0), False))
        for x, conv in cands:
            ex = prob.excess(x)
            H = -_negent(x)
            log.append({"start": name, "entropy": H, "excess": ex, "converged": conv})
            key = (ex <= FEAS_TOL, H if ex <= FEAS_TOL else -ex)
            if best is None or key > best[0]:
                best = (key, x, conv)
    _, x, conv = best
    t = prob.t(x)
    S = vector_to_matrix(spec.k, np.clip(x, 0, 1))
    H = float(h(x).sum())
    sol = MaxEntSolution(
        S_star=SzemerediType(spec.k, spec.eps if spec.eps > 0 else 1.0, S),
        entropy=H, per_edge_entropy=H / spec.k**2,
        densities=t.tolist(), residuals=np.abs(t - prob.phi).tolist(),
        excess=prob.excess(x), converged=bool(conv and prob.excess(x) <= FEAS_TOL),
        starts=log)
    if sol.excess > FEAS_TOL and raise_infeasible:
        raise InfeasibleError(f"no start satisfied the constraints (excess {sol.excess:.3g})", sol)
    return sol


# ---------------------------------------------------------------- Jacobian and effective radius


def density_jacobian(S, family) -> tuple[np.ndarray, float]:
    """J[(i,j), m] = d t(S, F_m) / d s_ij over i < j, and its smallest singular value."""
    M = S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)
    k = M.shape[0]
    x = matrix_to_vector(M)
    J = np.stack([density_polynomial(_graph(F), k).grad(x) for F in family], axis=1)
    sv = np.linalg.svd(J, compute_uv=False)
    return J, float(sv.min()) if len(sv) == J.shape[1] else 0.0


def _sigma_min(k: int, family, x) -> float:
    J = np.stack([density_polynomial(_graph(F), k).grad(x) for F in family], axis=1)
    sv = np.linalg.svd(J, compute_uv=False)
    return float(sv.min()) if len(sv) == J.shape[1] else 0.0


def _smallest_radius(sigma_fn, target: float, rho_max: float, iters: int = 200) -> Optional[float]:
    """Smallest rho in (0, rho_max] with rho * sigma_fn(rho) >= target, by bisection."""
    ok = lambda r: r * sigma_fn(r) >= target
    if target <= 0:
        return 0.0
    if not ok(rho_max):
        return None
    lo, hi = 0.0, rho_max
    for _ in range(iters):
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * max(hi, 1e-300):
            break
    return hi


def effective_radius(S, family, eps: float, d: Optional[int] = None, samples: int = 256,
                     descent_steps: int = 64, seed: int = 0) -> dict:
    """Smallest rho with rho * sigma_hat(rho, S) >= 10 d eps^(1/r_bar), else C(k,2).

    sigma_hat(rho, S) is the minimum smallest singular value of the Jacobian
    over S itself, ``samples`` fixed random L1 directions scaled to radius
    rho (clipped to the box), and a short random descent from the worst one.
    It over-estimates the true minimum, so rho may be under-estimated.
    """
    M = S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)
    k = M.shape[0]
    N = math.comb(k, 2)
    d = len(family) if d is None else d
    r_bar = max(_graph(F).n for F in family)
    target = 10 * d * eps ** (1 / r_bar)
    x0 = matrix_to_vector(M)
    rng = np.random.default_rng(seed)
    U = rng.standard_exponential((samples, N)) * rng.choice([-1.0, 1.0], size=(samples, N))
    U /= np.abs(U).sum(axis=1, keepdims=True)
    steps = rng.standard_normal((descent_steps, N))
    cache: dict = {}

    def sigma_hat(rho: float) -> float:
        if rho in cache:
            return cache[rho]
        best_val = _sigma_min(k, family, x0)
        best_x = x0
        for u in U:
            x = np.clip(x0 + rho * u, 0, 1)
            v = _sigma_min(k, family, x)
            if v < best_val:
                best_val, best_x = v, x
        scale = rho / 8
        for st in steps:
            x = np.clip(best_x + scale * st / max(np.abs(st).sum(), 1e-300), 0, 1)
            if np.abs(x - x0).sum() > rho:
                x = np.clip(x0 + (x - x0) * rho / np.abs(x - x0).sum(), 0, 1)
            v = _sigma_min(k, family, x)
            if v < best_val:
                best_val, best_x = v, x
            else:
                scale *= 0.8
        cache[rho] = best_val
        return best_val

    rho = _smallest_radius(sigma_hat, target, float(N), iters=60)
    sentinel = rho is None
    return {
        "rho": float(N) if sentinel else rho,
        "sentinel": sentinel,
        "target": target,
        "sigma_hat": None if sentinel else sigma_hat(rho),
        "annotation": "sampled estimate: sigma_hat upper-bounds the true minimum, rho may be underestimated",
    }


# ---------------------------------------------------------------- scalar shift and continuity


def shift_bound(phi: float, phi_prime: float, r: int, k: int) -> float:
    """((|phi - phi'|) / (1 - min(phi, phi')))^(1/C(r,2)) * C(k,2)."""
    den = 1 - min(phi, phi_prime)
    if den <= 0:
        return 0.0 if phi == phi_prime else math.inf
    return (abs(phi - phi_prime) / den) ** (1 / math.comb(r, 2)) * math.comb(k, 2)


def _bisect_path(path, t, target: float, tol: float):
    lo, hi = 0.0, 1.0
    x = path(0.0)
    for _ in range(200):
        mid = (lo + hi) / 2
        x = path(mid)
        v = t(x)
        if abs(v - target) <= tol / 4:
            return mid, x
        if (v < target) == (t(path(1.0)) >= t(path(0.0))):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2, path((lo + hi) / 2)


def scalar_shift(S, F, phi_prime: float, tol: float = 1e-8) -> dict:
    """Move S to a type with t(S', F) = phi' by a one-parameter path.

    Upward: S + a(1 - S).  Downward two monotone paths are tried, S(1 - a)
    and max(S - a, 0), and the one with the smaller L1 move is kept.
    """
    M = S.S if isinstance(S, SzemerediType) else np.asarray(S, dtype=float)
    k = M.shape[0]
    H = _graph(F)
    poly = density_polynomial(H, k)
    x0 = matrix_to_vector(M)
    phi = poly.value(x0)
    if not 0 <= phi_prime <= 1:
        raise ValueError("phi' must lie in [0, 1]")
    if abs(phi - phi_prime) <= tol:
        paths = {"none": lambda a: x0}
    elif phi_prime > phi:
        paths = {"up": lambda a: x0 + a * (1 - x0)}
    else:
        paths = {"scale": lambda a: x0 * (1 - a), "subtract": lambda a: np.maximum(x0 - a, 0.0)}
    results = []
    for name, path in paths.items():
        lo_v, hi_v = poly.value(path(0.0)), poly.value(path(1.0))
        if not min(lo_v, hi_v) - tol <= phi_prime <= max(lo_v, hi_v) + tol:
            continue
        a, x = (0.0, x0) if name == "none" else _bisect_path(path, poly.value, phi_prime, tol)
        results.append((float(np.abs(x - x0).sum()), name, a, x))
    if not results:
        raise ValueError("target density not reachable along the shift paths")
    l1, name, a, x = min(results, key=lambda t: t[0])
    bound = shift_bound(phi, phi_prime, H.n, k)
    achieved = poly.value(x)
    return {
        "S_bar": vector_to_matrix(k, x),
        "alpha": a,
        "path": name,
        "phi": phi,
        "achieved": achieved,
        "error": abs(achieved - phi_prime),
        "l1": l1,
        "bound": bound,
        "within_bound": l1 <= bound + 1e-9,
    }


def l1_distance(S1, S2) -> float:
    """L1 distance over the upper-triangular entries."""
    a = S1.S if isinstance(S1, SzemerediType) else np.asarray(S1, dtype=float)
    b = S2.S if isinstance(S2, SzemerediType) else np.asarray(S2, dtype=float)
    return float(np.abs(matrix_to_vector(a) - matrix_to_vector(b)).sum())


def continuity_bound(S1, S2, k: int) -> float:
    """5 h(||S1 - S2||_1 / (4 k^2)), argument clipped at 1/2."""
    return 5 * float(h(min(0.5, l1_distance(S1, S2) / (4 * k * k))))


def entropy_gap_check(S1, S2, k: int) -> dict:
    """The entropy inequality H(S2) - H(S1) <= 5 k^2 h(||S1 - S2||_1 / (4 k^2))."""
    lhs = entropy(S2)[0] - entropy(S1)[0]
    rhs = k * k * continuity_bound(S1, S2, k)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12}


# ---------------------------------------------------------------- combinatorial and size bounds


def combinatorial_bounds(n: int, k: int, eps: float, S=None) -> dict:
    """Type-count bound (n^2/k^2 + 1)^(k^2) and per-edge class-size bounds for S."""
    if n < k:
        raise ValueError("need n >= k")
    base = n * n / (k * k) + 1
    log_count = k * k * math.log(base)
    out = {
        "log_type_count_bound": log_count,
        "type_count_bound": (n * n // (k * k) + 1) ** (k * k) if (n * n) % (k * k) == 0 else None,
        "per_edge_type_count": log_count / n**2,
        "eight_k_over_n": 8 * k / n,
    }
    g = n // k
    # non-uniform fraction <= 2^-expo; the union bound only reduces to this form for g >= 6
    expo = 2 * eps**4 * g * g - 4 * g
    vacuous = expo <= 0 or g < 6
    o_term = None
    if not vacuous:
        # base-2 count bound 2^(g^2 h - 2 log2 g - 1) per pair, converted to nats
        o_term = -(2 * math.log(g) + math.log(2)) * k * k / n**2 + math.log1p(-2.0 ** (-expo)) / n**2
    out.update({"o_term": o_term, "o_term_vacuous": vacuous, "g": g})
    if S is not None:
        H = entropy(S)[0]
        out["class_size_upper"] = H / k**2 + 2 * eps
        out["class_size_lower"] = H / k**2 + o_term if o_term is not None else None
    return out


@dataclass
class SizeBoundsReport:
    target: str
    center: Optional[float]
    lower: Optional[float]
    upper: Optional[float]
    slack_terms: dict
    scalar_constant: Optional[float] = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"target": self.target, "center": self.center, "lower": self.lower,
                "upper": self.upper, "slack_terms": self.slack_terms,
                "scalar_constant": self.scalar_constant, "details": self.details}


def _is_clique(H: Graph) -> bool:
    return H.num_edges == math.comb(H.n, 2)


def scalar_constant(phi: float, gamma: float, r: int) -> float:
    e = math.comb(r, 2)
    den = 1 - phi - gamma if phi + gamma < 1 else 1 - phi + gamma
    return (10 / den) ** (1 / e) if den > 0 else math.inf


def densities_size_bounds(spec: ConstraintSpec, n: Optional[int] = None, seed: int = 0,
                          starts: int = 16, radius_samples: int = 256) -> SizeBoundsReport:
    """Per-edge log-size bounds for the densities set around the max-entropy type."""
    sol = solve_max_entropy(spec, starts=starts, seed=seed)
    k, eps = spec.k, spec.eps
    center = sol.per_edge_entropy
    terms = {"counting": spec.counting_slack, "class_size": 2 * eps,
             "type_count": 8 * k / n if n else 0.0, "o_eps": "unquantified"}
    const = None
    if len(spec.family) == 1 and _is_clique(spec.family[0]) and eps > 0:
        r = spec.family[0].n
        const = scalar_constant(spec.phi[0], spec.gamma[0], r)
        terms["continuity"] = 5 * float(h(min(0.5, const * eps ** (1 / r**3))))
        rho = None
    else:
        rho = effective_radius(sol.S_star, spec.family, eps, samples=radius_samples, seed=seed) \
            if eps > 0 else {"rho": 0.0, "sentinel": False, "target": 0.0}
        terms["continuity"] = 5 * float(h(min(0.5, rho["rho"] / (4 * k * k))))
        sol.rho = rho
    width = terms["continuity"] + terms["class_size"] + terms["type_count"]
    return SizeBoundsReport("DensitiesSet", center, center - width, center + width, terms, const,
                            {"solution": sol.to_json(), "spec": spec.to_json(), "n": n})


def hist_size_bounds(p: Distribution, F: RootedPattern, delta: float, d: int, k: int,
                     eps: float, n: Optional[int] = None, seed: int = 0,
                     starts: int = 16) -> SizeBoundsReport:
    """Per-edge log-size bounds for Hist(p, F, delta) via the sandwich radii.

    Upper: the max-entropy value over the outer box (radii gamma, plus the
    itemized finite-n slack when n is given).  Lower: the same over the inner
    box (radii beta) when that box is nonempty, else reported vacuous.
    """
    if not isinstance(p, PiecewiseDensity):
        raise ValueError("reference distribution must be a piecewise density")
    if p.density_min <= 0:
        raise ValueError("reference density must be bounded away from 0")
    rep = phi_vector(p, F, d)
    radii = sandwich_radii(p, F, d, delta, n)
    family = [merge_at_root(F, m).graph for m in range(1, d + 1)]
    outer = [min(1.0, g + s) for g, s in zip(radii.gamma, radii.slack)]
    up_spec = ConstraintSpec(family, rep.phi, outer, k, eps)
    up = solve_max_entropy(up_spec, starts=starts, seed=seed)
    terms = {"counting": up_spec.counting_slack, "class_size": 2 * eps,
             "type_count": 8 * k / n if n else 0.0, "moment_finite_n": radii.slack,
             "o_eps": "unquantified"}
    rho_up = effective_radius(up.S_star, family, eps, seed=seed) if eps > 0 else {"rho": 0.0}
    cont_up = 5 * float(h(min(0.5, rho_up["rho"] / (4 * k * k))))
    upper = up.per_edge_entropy + cont_up + 2 * eps + terms["type_count"]
    lower = None
    details = {"phi": rep.phi, "radii": radii.to_json(), "upper_solution": up.to_json(),
               "upper_continuity": cont_up}
    if radii.beta_feasible:
        lo_spec = ConstraintSpec(family, rep.phi, radii.beta, k, eps)
        try:
            lo = solve_max_entropy(lo_spec, starts=starts, seed=seed)
            rho_lo = effective_radius(lo.S_star, family, eps, seed=seed) if eps > 0 else {"rho": 0.0}
            cont_lo = 5 * float(h(min(0.5, rho_lo["rho"] / (4 * k * k))))
            lower = lo.per_edge_entropy - cont_lo - 2 * eps - terms["type_count"]
            details.update({"lower_solution": lo.to_json(), "lower_continuity": cont_lo})
        except InfeasibleError:
            details["lower_vacuous"] = "inner box has no feasible type"
    else:
        details["lower_vacuous"] = "inner radii infeasible"
    return SizeBoundsReport("Hist", None, lower, upper, terms, None, details)
