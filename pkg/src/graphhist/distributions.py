"""Distributions on [0,1]: exact KS / Wasserstein distances, concentration
functions, moments, the moment-to-density coefficients and the sandwich radii.

Two variants are supported.  :class:`PiecewiseDensity` has a density that is
linear on each bin (constant bins are the common case); :class:`Empirical`
puts mass 1/n on each of n atoms.  On every interval between consecutive
breakpoints/atoms the CDF of either variant is a polynomial of degree <= 2,
which is what makes the distance computations exact.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import lgamma, log
from typing import Optional, Sequence

import numpy as np

from .graph import RootedPattern, extremal_counts, merge_at_root

ESSEEN_CONSTANT = 51.0
_MASS_TOL = 1e-12


class Distribution:
    """Base class; subclasses provide the CDF piece data."""

    def cdf(self, x: float) -> float:
        raise NotImplementedError

    def cdf_left(self, x: float) -> float:
        raise NotImplementedError

    def knots(self) -> list[float]:
        raise NotImplementedError

    def piece(self, u: float, v: float) -> tuple[float, float, float]:
        """Coefficients (c0, c1, c2) of the CDF on the open interval (u, v)."""
        raise NotImplementedError

    def moment(self, m: int) -> float:
        raise NotImplementedError


class PiecewiseDensity(Distribution):
    """Density linear on each bin ``[breaks[i], breaks[i+1]]``.

    ``densities`` gives one constant value per bin; ``right`` (optional) gives
    the value at the right end of each bin for linear bins.
    """

    def __init__(self, breaks: Sequence[float], densities: Sequence[float],
                 right: Optional[Sequence[float]] = None):
        b = [float(x) for x in breaks]
        left = [float(x) for x in densities]
        right = left if right is None else [float(x) for x in right]
        if len(b) < 2 or len(left) != len(b) - 1 or len(right) != len(left):
            raise ValueError("need len(breaks) = len(densities) + 1 >= 2")
        if b[0] < 0 or b[-1] > 1 or any(y <= x for x, y in zip(b, b[1:])):
            raise ValueError("breaks must increase within [0, 1]")
        vals = left + right
        if any(not math.isfinite(x) or x < 0 for x in vals):
            raise ValueError("densities must be finite and nonnegative")
        self.breaks = b
        self.left = left
        self.right = right
        # density on bin i is alpha + beta * x
        self._beta = [(rv - lv) / (hi - lo) for lv, rv, lo, hi in zip(left, right, b, b[1:])]
        self._alpha = [lv - be * lo for lv, be, lo in zip(left, self._beta, b)]
        cum = [0.0]
        for i in range(len(left)):
            cum.append(cum[-1] + (b[i + 1] - b[i]) * (left[i] + right[i]) / 2)
        if abs(cum[-1] - 1.0) > _MASS_TOL:
            raise ValueError(f"total mass {cum[-1]!r} is not 1")
        self._cum = cum

    @classmethod
    def uniform(cls) -> "PiecewiseDensity":
        return cls([0.0, 1.0], [1.0])

    @classmethod
    def linear(cls, breaks: Sequence[float], values: Sequence[float]) -> "PiecewiseDensity":
        """Continuous piecewise-linear density with ``values`` at the breaks."""
        return cls(breaks, values[:-1], values[1:])

    @property
    def density_min(self) -> float:
        lo = min(self.left + self.right)
        # bins strictly inside [0, 1] leave density 0 outside them
        if self.breaks[0] > 0 or self.breaks[-1] < 1:
            lo = 0.0
        return lo

    @property
    def density_max(self) -> float:
        return max(self.left + self.right)

    def _bin(self, x: float) -> int:
        return min(max(bisect.bisect_right(self.breaks, x) - 1, 0), len(self.left) - 1)

    def density(self, x: float) -> float:
        if x < self.breaks[0] or x > self.breaks[-1]:
            return 0.0
        i = self._bin(x)
        return self._alpha[i] + self._beta[i] * x

    def cdf(self, x: float) -> float:
        if x < self.breaks[0]:
            return 0.0
        if x >= self.breaks[-1]:
            return 1.0
        i = self._bin(x)
        c0, c1, c2 = self._bin_poly(i)
        return c0 + c1 * x + c2 * x * x

    cdf_left = cdf

    def _bin_poly(self, i: int) -> tuple[float, float, float]:
        a, be, lo = self._alpha[i], self._beta[i], self.breaks[i]
        # cum_i + a (x - lo) + be/2 (x^2 - lo^2)
        return (self._cum[i] - a * lo - be / 2 * lo * lo, a, be / 2)

    def knots(self) -> list[float]:
        return list(self.breaks)

    def piece(self, u: float, v: float) -> tuple[float, float, float]:
        mid = (u + v) / 2
        if mid < self.breaks[0]:
            return (0.0, 0.0, 0.0)
        if mid > self.breaks[-1]:
            return (1.0, 0.0, 0.0)
        return self._bin_poly(self._bin(mid))

    def moment(self, m: int) -> float:
        total = []
        for i in range(len(self.left)):
            lo, hi = self.breaks[i], self.breaks[i + 1]
            a, be = self._alpha[i], self._beta[i]
            total.append(a * (hi ** (m + 1) - lo ** (m + 1)) / (m + 1))
            if be:
                total.append(be * (hi ** (m + 2) - lo ** (m + 2)) / (m + 2))
        return math.fsum(total)

    def to_json(self) -> dict:
        out = {"type": "piecewise", "breaks": self.breaks, "densities": self.left}
        if self.right != self.left:
            out["right"] = self.right
        return out

    def __repr__(self) -> str:
        return f"PiecewiseDensity(breaks={self.breaks}, densities={self.left})"


class Empirical(Distribution):
    """Equal masses 1/n on sorted atoms in [0, 1]."""

    def __init__(self, atoms: Sequence):
        vals = sorted(float(x) for x in atoms)
        if not vals:
            raise ValueError("need at least one atom")
        if vals[0] < 0 or vals[-1] > 1:
            raise ValueError("atoms must lie in [0, 1]")
        self.atoms = vals
        self.n = len(vals)

    @classmethod
    def point_mass(cls, c: float) -> "Empirical":
        return cls([c])

    def cdf(self, x: float) -> float:
        return bisect.bisect_right(self.atoms, x) / self.n

    def cdf_left(self, x: float) -> float:
        return bisect.bisect_left(self.atoms, x) / self.n

    def knots(self) -> list[float]:
        return list(self.atoms)

    def piece(self, u: float, v: float) -> tuple[float, float, float]:
        return (self.cdf(u), 0.0, 0.0)

    def moment(self, m: int) -> float:
        return math.fsum(x**m for x in self.atoms) / self.n

    def to_json(self) -> dict:
        return {"type": "empirical", "atoms": self.atoms}

    def __repr__(self) -> str:
        return f"Empirical({self.atoms})"


def from_json(obj: dict) -> Distribution:
    kind = obj.get("type")
    if kind == "piecewise":
        return PiecewiseDensity(obj["breaks"], obj["densities"], obj.get("right"))
    if kind == "empirical":
        return Empirical(obj["atoms"])
    if kind == "uniform":
        return PiecewiseDensity.uniform()
    raise ValueError(f"unknown distribution type {kind!r}")


# ---------------------------------------------------------------- distances


def _grid(p: Distribution, q: Distribution) -> list[float]:
    return sorted(set([0.0, 1.0] + p.knots() + q.knots()))


def _quad_roots(c0: float, c1: float, c2: float, u: float, v: float) -> list[float]:
    """Real roots of c0 + c1 x + c2 x^2 strictly inside (u, v)."""
    if c2 == 0:
        roots = [] if c1 == 0 else [-c0 / c1]
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        # numerically stable pair
        qv = -0.5 * (c1 + math.copysign(sq, c1))
        roots = [qv / c2] + ([c0 / qv] if qv != 0 else [])
    return sorted(x for x in roots if u < x < v)


def ks_distance(p: Distribution, q: Distribution) -> float:
    """sup_x |P(x) - Q(x)|, exact: limits at every knot plus interior stationary points."""
    best = 0.0
    g = _grid(p, q)
    for x in g:
        best = max(best, abs(p.cdf(x) - q.cdf(x)), abs(p.cdf_left(x) - q.cdf_left(x)))
    for u, v in zip(g, g[1:]):
        a = p.piece(u, v)
        b = q.piece(u, v)
        c0, c1, c2 = a[0] - b[0], a[1] - b[1], a[2] - b[2]
        if c2 != 0:
            x = -c1 / (2 * c2)
            if u < x < v:
                best = max(best, abs(c0 + c1 * x + c2 * x * x))
    return min(best, 1.0)


def _poly_integral(c0: float, c1: float, c2: float, u: float, v: float) -> float:
    return c0 * (v - u) + c1 * (v * v - u * u) / 2 + c2 * (v**3 - u**3) / 3


def wasserstein1(p: Distribution, q: Distribution) -> float:
    """Integral over [0, 1] of |P - Q|, integrated piece by piece."""
    total = []
    g = _grid(p, q)
    for u, v in zip(g, g[1:]):
        a = p.piece(u, v)
        b = q.piece(u, v)
        c = (a[0] - b[0], a[1] - b[1], a[2] - b[2])
        cuts = [u] + _quad_roots(*c, u, v) + [v]
        for s, t in zip(cuts, cuts[1:]):
            total.append(abs(_poly_integral(*c, s, t)))
    return math.fsum(total)


def concentration(p: Distribution, a: float) -> float:
    """S_p(a) = sup_x p([x, x + a])."""
    if not 0 <= a <= 1:
        raise ValueError("window length must lie in [0, 1]")
    if isinstance(p, Empirical):
        xs = p.atoms
        best = 0
        for i, x in enumerate(xs):
            j = bisect.bisect_right(xs, x + a)
            best = max(best, j - i)
        return best / p.n
    if a >= 1:
        return 1.0
    # window mass W(x) = P(x + a) - P(x) over x in [0, 1 - a]
    hi = 1.0 - a
    cands = {0.0, hi}
    for b in p.knots():
        for x in (b, b - a):
            if 0 <= x <= hi:
                cands.add(x)
    pts = sorted(cands)
    extra = []
    for u, v in zip(pts, pts[1:]):
        # p(x + a) - p(x) is linear on (u, v)
        f = lambda x: p.density(x + a) - p.density(x)
        mid = (u + v) / 2
        fu, fv = f(u + (mid - u) * 1e-9), f(v - (v - mid) * 1e-9)
        if fu * fv < 0:
            extra.append(u + (v - u) * fu / (fu - fv))
    return min(1.0, max(p.cdf(x + a) - p.cdf_left(x) for x in pts + extra))


def moments(p: Distribution, d: int) -> list[float]:
    if d < 1:
        raise ValueError("d must be positive")
    return [p.moment(m) for m in range(1, d + 1)]


# ---------------------------------------------------------------- moment/density coefficients


def _leading_coefficient(xs: Sequence[int], ys: Sequence[int]) -> Fraction:
    """Leading coefficient of the degree len(xs)-1 interpolant (top divided difference)."""
    total = Fraction(0)
    for i, xi in enumerate(xs):
        den = 1
        for j, xj in enumerate(xs):
            if j != i:
                den *= xi - xj
        total += Fraction(ys[i], den)
    return total


def c_coefficients(F: RootedPattern, d: int, literal: bool = False) -> list[Fraction]:
    """Constants c_m, m = 1..d, with t(G, F^m) = c_m E X^m + O(1/n) for X ~ p_G^F.

    The numerator n * (root_aut * b_{F,n})^m counts ordered m-tuples of
    rooted injections and the denominator a_m * c_{F^m,n} counts injections
    of F^m into K_n; both are n^R (1 + O(1/n)) so c_m = 1.

    ``literal=True`` uses n * b^m / (a_m * c_{F^m,n} * m!) instead, which
    equals 1 / (root_aut^m * m!).  That variant does not track t(G, F^m)
    and is kept only for comparison.  :func:`c_coefficients_interpolated`
    computes the same constants from exact counts.
    """
    if literal:
        return [Fraction(1, F.root_aut_count**m * math.factorial(m)) for m in range(1, d + 1)]
    return [Fraction(1)] * d


def c_coefficients_interpolated(F: RootedPattern, d: int, literal: bool = False) -> list[Fraction]:
    """Same constants from the exact polynomials in n (small d only).

    Both sides of the defining ratio are polynomials in n of degree
    R = m(r-1)+1; they are sampled at R+1 integers and the leading
    coefficients are extracted exactly.
    """
    out = []
    for m in range(1, d + 1):
        Fm = merge_at_root(F, m)
        R = Fm.r
        xs = list(range(R, 2 * R + 1))
        num, den = [], []
        for n in xs:
            b, _ = extremal_counts(F, n)
            _, cm = extremal_counts(Fm, n)
            if literal:
                num.append(n * b**m)
                den.append(Fm.aut_count * cm * math.factorial(m))
            else:
                num.append(n * (F.root_aut_count * b) ** m)
                den.append(Fm.aut_count * cm)
        out.append(_leading_coefficient(xs, num) / _leading_coefficient(xs, den))
    return out


@dataclass
class MomentReport:
    d: int
    moments: list
    c_coeffs: list
    phi: list

    def to_json(self) -> dict:
        return {"d": self.d, "moments": self.moments,
                "c_coeffs": [str(c) for c in self.c_coeffs], "phi": self.phi}


def phi_vector(p: Distribution, F: RootedPattern, d: int) -> MomentReport:
    """phi_m = c_m E X^m for m = 1..d."""
    mom = moments(p, d)
    cs = c_coefficients(F, d)
    return MomentReport(d, mom, cs, [float(c) * x for c, x in zip(cs, mom)])


# ---------------------------------------------------------------- KS bound and radii


def _tail(T: float, d: int) -> float:
    """T^{d+1} / (d! d), evaluated in log space."""
    return math.exp(min((d + 1) * log(T) - lgamma(d + 1) - log(d), 700.0))


def ks_upper_bound_raw(p: Distribution, gamma: float, d: int, T: float,
                       c: float = ESSEEN_CONSTANT) -> float:
    """c (S_p(1/T) + e^T (gamma + T^{d+1}/(d! d))), unclipped (may be inf)."""
    if T <= 1 or gamma < 0:
        raise ValueError("need T > 1 and gamma >= 0")
    try:
        growth = math.exp(T)
    except OverflowError:
        return math.inf
    return c * (concentration(p, 1.0 / T) + growth * (gamma + _tail(T, d)))


def ks_upper_bound(p: Distribution, gamma: float, d: int, T: float,
                   c: float = ESSEEN_CONSTANT) -> float:
    """Moment-gap to KS bound, clipped to 1."""
    return min(1.0, ks_upper_bound_raw(p, gamma, d, T, c))


def _log_grid(lo: float, hi: float, num: int) -> np.ndarray:
    return np.exp(np.linspace(np.log(lo), np.log(hi), num))


def ks_upper_bound_opt(p: Distribution, gamma: float, d: int, c: float = ESSEEN_CONSTANT,
                       grid: Optional[Sequence[float]] = None) -> tuple[float, float]:
    """(min over the T grid of the clipped bound, argmin T)."""
    Ts = _log_grid(1.0 + 1e-6, 1e4, 800) if grid is None else grid
    vals = [ks_upper_bound_raw(p, gamma, d, float(T), c) for T in Ts]
    i = int(np.argmin(vals))
    return min(1.0, vals[i]), float(Ts[i])


@dataclass
class SandwichRadii:
    delta: float
    gamma: list
    beta: list
    beta_feasible: bool
    T_star: Optional[float]
    slack: list = field(default_factory=list)
    density_min: Optional[float] = None

    def to_json(self) -> dict:
        return {"delta": self.delta, "gamma": self.gamma, "gamma_slack": self.slack,
                "beta": self.beta, "beta_feasible": self.beta_feasible,
                "T_star": self.T_star, "density_min": self.density_min}


def moment_slack_bound(F: RootedPattern, m: int, n: int) -> tuple[Fraction, Fraction]:
    """Worst-case (below, above) of t(G, F^m) - E X^m over all n-vertex graphs, c_m = 1.

    Per root v with Y ordered rooted injections of F, B = (n-1)_{r-1},
    K = (n-1)_{R-1} and D the disjoint m-tuples (= rooted injections of F^m):
    Y^m - C(m,2) Y^{m-1} M <= D <= min(Y^m, K), where M bounds the rooted
    injections meeting a fixed one.  Hence the per-root deviation
    D/K - (Y/B)^m lies in [-min(1, C(m,2) B^{m-1} M / K), 1 - K / B^m].
    Both ends are O(1/n).
    """
    r = F.r
    R = 1 + m * (r - 1)
    if n < R:
        return Fraction(1), Fraction(1)
    B = math.perm(n - 1, r - 1)
    K = math.perm(n - 1, R - 1)
    M = B - math.perm(n - r, r - 1)
    above = 1 - Fraction(K, B**m)
    below = min(Fraction(1), Fraction(math.comb(m, 2) * B ** (m - 1) * M, K))
    return below, above


def gamma_radii(p: Distribution, F: RootedPattern, d: int, delta: float,
                n: Optional[int] = None, slack_const: float = 10.0) -> SandwichRadii:
    """Outer radii gamma_m = (2 m c_m / a) E X^m delta, a = density_min.

    When ``n`` is given the O(1/n) term ``slack_const * max(c_m) / n`` is
    reported in ``slack`` (not folded into ``gamma``).
    """
    if not isinstance(p, PiecewiseDensity):
        raise ValueError("reference distribution must be a piecewise density")
    a = p.density_min
    if a <= 0:
        raise ValueError("density_min must be positive for the outer radii")
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    rep = phi_vector(p, F, d)
    gam = [2 * m * float(c) / a * x * delta
           for m, (c, x) in enumerate(zip(rep.c_coeffs, rep.moments), start=1)]
    slack = [slack_const * float(max(rep.c_coeffs)) / n] * d if n else [0.0] * d
    return SandwichRadii(delta, gam, [0.0] * d, False, None, slack, a)


def _beta_objective(p: Distribution, delta: float, d: int, T: float, c: float) -> float:
    return math.exp(-T) * (delta / c - concentration(p, 1.0 / T)) - _tail(T, d)


def _golden_max(f, lo: float, hi: float, iters: int = 100) -> tuple[float, float]:
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def beta_radii(p: Distribution, F: RootedPattern, d: int, delta: float,
               c: float = ESSEEN_CONSTANT, T_max: float = 1e4) -> SandwichRadii:
    """Inner radii beta_m = c_m (e^{-T}(delta/c - S_p(1/T)) - T^{d+1}/(d! d)), best T > 1."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    f = lambda T: _beta_objective(p, delta, d, T, c)
    Ts = _log_grid(1.0 + 1e-9, T_max, 1200)
    vals = [f(float(T)) for T in Ts]
    i = int(np.argmax(vals))
    lo = float(Ts[max(i - 1, 0)])
    hi = float(Ts[min(i + 1, len(Ts) - 1)])
    T_star, best = _golden_max(f, lo, hi)
    if vals[i] > best:
        T_star, best = float(Ts[i]), vals[i]
    cs = c_coefficients(F, d)
    feasible = best > 0
    beta = [float(cm) * best for cm in cs] if feasible else [0.0] * d
    return SandwichRadii(delta, [], beta, feasible, T_star, [], getattr(p, "density_min", None))


def sandwich_radii(p: PiecewiseDensity, F: RootedPattern, d: int, delta: float,
                   n: Optional[int] = None) -> SandwichRadii:
    g = gamma_radii(p, F, d, delta, n)
    b = beta_radii(p, F, d, delta) if delta > 0 else None
    if b is not None:
        g.beta, g.beta_feasible, g.T_star = b.beta, b.beta_feasible, b.T_star
    return g


# ---------------------------------------------------------------- moment/KS audits


def ks_implies_moments_close(p: Distribution, q: Distribution, d: int) -> dict:
    """Check |E X^m - E Y^m| <= KS(p, q) and (1/m)|gap| <= W1(p, q) for m <= d."""
    ks = ks_distance(p, q)
    w1 = wasserstein1(p, q)
    gaps = [abs(a - b) for a, b in zip(moments(p, d), moments(q, d))]
    return {
        "ks": ks,
        "w1": w1,
        "gaps": gaps,
        "slack": ks - max(gaps),
        "w1_slack": w1 - max(g / m for m, g in enumerate(gaps, start=1)),
        "holds": all(g <= ks + 1e-12 for g in gaps),
    }


def moments_close_implies_ks(p: Distribution, q: Distribution, d: int,
                             c: float = ESSEEN_CONSTANT) -> dict:
    """Check KS(p, q) <= min_T ks_upper_bound(p, max moment gap, d, T)."""
    gaps = [abs(a - b) for a, b in zip(moments(p, d), moments(q, d))]
    bound, T = ks_upper_bound_opt(p, max(gaps), d, c)
    ks = ks_distance(p, q)
    return {"ks": ks, "bound": bound, "T": T, "slack": bound - ks, "holds": ks <= bound + 1e-12}
