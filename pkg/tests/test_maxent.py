import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphhist.distributions import PiecewiseDensity
from graphhist.graph import Graph, named_pattern
from graphhist.maxent import (ConstraintSpec, InfeasibleError, _smallest_radius,
                              combinatorial_bounds, continuity_bound, densities_size_bounds,
                              density_jacobian, effective_radius, entropy, entropy_gap_check, h,
                              hist_size_bounds, scalar_constant, scalar_shift, shift_bound,
                              solve_max_entropy)
from graphhist.szemeredi import mean_density, vector_to_matrix

EDGE, K3 = Graph.complete(2), Graph.complete(3)


def hb(x):
    return -x * math.log(x) - (1 - x) * math.log(1 - x)


def test_binary_entropy():
    assert h(0.5) == pytest.approx(math.log(2))
    assert h(0.0) == 0 and h(1.0) == 0
    assert h(0.2) == pytest.approx(hb(0.2))


def test_entropy_of_half_matrix():
    S = np.full((4, 4), 0.5)
    H, per = entropy(S)
    assert H == pytest.approx(6 * math.log(2)) and per == pytest.approx(H / 16)


def test_spec_validation():
    with pytest.raises(ValueError):
        ConstraintSpec([EDGE], [0.5, 0.2], [0.1], 4)
    with pytest.raises(ValueError):
        ConstraintSpec([EDGE], [1.5], [0.1], 4)
    spec = ConstraintSpec([named_pattern("triangle")], [0.5], [0.1], 4, eps=0.001)
    assert spec.r_bar == 3
    assert spec.counting_slack == pytest.approx(5 * 0.001 ** (1 / 3))


def test_solver_unconstrained():
    sol = solve_max_entropy(ConstraintSpec([EDGE], [0.5], [0.5], 5))
    x = sol.S_star.vector()
    assert np.abs(x - 0.5).max() <= 1e-6
    assert sol.entropy == pytest.approx(10 * math.log(2), abs=1e-6)


@pytest.mark.parametrize("phi,gamma,active", [(0.3, 0.0, 0.3), (0.7, 0.1, 0.6), (0.2, 0.05, 0.25)])
def test_solver_edge_constraint(phi, gamma, active):
    sol = solve_max_entropy(ConstraintSpec([EDGE], [phi], [gamma], 6))
    assert sol.entropy == pytest.approx(15 * hb(active), abs=1e-5)
    assert sol.excess <= 1e-6


def test_solver_slack_triangle_constraint():
    # all-1/2 already satisfies t = 1/8
    sol = solve_max_entropy(ConstraintSpec([K3], [0.125], [0.0], 4))
    assert sol.entropy == pytest.approx(6 * math.log(2), abs=1e-6)


def test_solver_infeasible():
    with pytest.raises(InfeasibleError) as err:
        solve_max_entropy(ConstraintSpec([EDGE, K3], [0.1, 0.9], [0.0, 0.0], 4), starts=4)
    assert err.value.best is not None and err.value.best.excess > 1e-6
    sol = solve_max_entropy(ConstraintSpec([EDGE, K3], [0.1, 0.9], [0.0, 0.0], 4), starts=4,
                            raise_infeasible=False)
    assert not sol.converged


def test_solver_two_constraints_feasible_and_no_better_start():
    spec = ConstraintSpec([EDGE, K3], [0.4, 0.1], [0.01, 0.01], 5)
    sol = solve_max_entropy(spec, starts=8)
    assert sol.excess <= 1e-6
    best_feasible = max(s["entropy"] for s in sol.starts if s["excess"] <= 1e-6)
    assert sol.entropy == pytest.approx(best_feasible)
    # the edge-only optimum is an upper bound
    assert sol.entropy <= 10 * hb(0.41) + 1e-9


@pytest.mark.parametrize("family", [[EDGE], [EDGE, K3], [K3, named_pattern("bowtie")]])
def test_jacobian_finite_differences(family):
    rng = np.random.default_rng(1)
    k = 5
    x = rng.uniform(0.1, 0.9, 10)
    J, _ = density_jacobian(vector_to_matrix(k, x), family)
    eps = 1e-6
    for i in range(10):
        e = np.zeros(10)
        e[i] = eps
        for m, F in enumerate(family):
            fd = (mean_density(vector_to_matrix(k, x + e), F)
                  - mean_density(vector_to_matrix(k, x - e), F)) / (2 * eps)
            assert J[i, m] == pytest.approx(fd, rel=1e-6, abs=1e-10)


def test_jacobian_rank_deficient_at_constant():
    _, smin = density_jacobian(vector_to_matrix(5, np.full(10, 0.4)), [EDGE, K3])
    assert smin <= 1e-10


def test_smallest_radius():
    assert _smallest_radius(lambda r: 1.0, 0.25, 10.0) == pytest.approx(0.25)
    assert _smallest_radius(lambda r: 0.0, 0.25, 10.0) is None


def test_effective_radius_sentinel_and_finite():
    S = vector_to_matrix(4, np.full(6, 0.5))
    out = effective_radius(S, [EDGE], 0.5, samples=16, descent_steps=4)
    assert out["sentinel"] and out["rho"] == 6.0
    out = effective_radius(vector_to_matrix(4, np.linspace(0.2, 0.7, 6)), [EDGE], 1e-9,
                           samples=16, descent_steps=4)
    # the edge Jacobian is constant with sigma = sqrt(6)/6
    assert not out["sentinel"]
    assert out["rho"] == pytest.approx(out["target"] / (math.sqrt(6) / 6), rel=1e-9)


def test_shift_bound_formula():
    assert shift_bound(0.0, 0.027, 3, 5) == pytest.approx(0.3 * 10)
    assert shift_bound(0.5, 0.5, 3, 5) == 0


def test_scalar_shift_equality_case():
    out = scalar_shift(np.zeros((5, 5)), K3, 0.027)
    assert out["alpha"] == pytest.approx(0.3, abs=1e-6)
    assert out["l1"] == pytest.approx(out["bound"], abs=1e-6)
    assert out["error"] <= 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_scalar_shift_random(seed):
    rng = np.random.default_rng(seed)
    k = 5
    S = vector_to_matrix(k, rng.random(10))
    target = float(rng.random() * 0.5)
    out = scalar_shift(S, K3, target)
    assert out["error"] <= 1e-8
    assert out["within_bound"]
    assert mean_density(out["S_bar"], K3) == pytest.approx(target, abs=1e-8)


def test_scalar_shift_rejects_bad_target():
    with pytest.raises(ValueError):
        scalar_shift(np.zeros((4, 4)), K3, 1.5)


def test_continuity_bound_value():
    k = 3
    S1 = vector_to_matrix(k, [0.1, 0.2, 0.3])
    S2 = vector_to_matrix(k, [0.4, 0.2, 0.0])
    assert continuity_bound(S1, S2, k) == pytest.approx(5 * hb(0.6 / 36))
    far = continuity_bound(np.zeros((2, 2)), vector_to_matrix(2, [1.0]), 1)
    assert far == pytest.approx(5 * hb(0.25))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_entropy_gap_inequality(k, seed, scale):
    rng = np.random.default_rng(seed)
    N = k * (k - 1) // 2
    x1 = rng.random(N)
    x2 = np.clip(x1 + scale * rng.standard_normal(N), 0, 1)
    assert entropy_gap_check(vector_to_matrix(k, x1), vector_to_matrix(k, x2), k)["holds"]


def test_combinatorial_bounds():
    out = combinatorial_bounds(100, 10, 0.1)
    assert out["o_term_vacuous"] and out["o_term"] is None
    assert out["log_type_count_bound"] == pytest.approx(100 * math.log(101))
    n, k, eps = 200, 2, 0.5
    out = combinatorial_bounds(n, k, eps, S=np.full((2, 2), 0.5))
    g = 100
    expo = 2 * eps**4 * g * g - 4 * g
    want = -(2 * math.log(g) + math.log(2)) * k * k / n**2 + math.log1p(-2.0**-expo) / n**2
    assert out["o_term"] == pytest.approx(want)
    assert out["class_size_upper"] == pytest.approx(math.log(2) / 4 + 1.0)
    assert combinatorial_bounds(10, 2, 1.0)["o_term_vacuous"]  # g = 5
    with pytest.raises(ValueError):
        combinatorial_bounds(3, 4, 0.1)


def test_scalar_constant():
    assert scalar_constant(0.5, 0.1, 3) == pytest.approx(25 ** (1 / 3))
    assert scalar_constant(0.9, 0.2, 3) == pytest.approx((10 / 0.3) ** (1 / 3))


def test_densities_size_bounds_single_clique():
    spec = ConstraintSpec([K3], [0.2], [0.01], 4, eps=0.01)
    rep = densities_size_bounds(spec, n=1000, starts=4)
    assert rep.lower <= rep.center <= rep.upper
    assert rep.scalar_constant == pytest.approx(scalar_constant(0.2, 0.01, 3))


def test_densities_size_bounds_family():
    spec = ConstraintSpec([EDGE, K3], [0.5, 0.125], [0.05, 0.05], 4, eps=1e-6)
    rep = densities_size_bounds(spec, n=1000, starts=4, radius_samples=16)
    assert rep.lower <= rep.center <= rep.upper
    assert rep.details["solution"]["rho"] is not None


def test_hist_size_bounds_upper_only():
    rep = hist_size_bounds(PiecewiseDensity.uniform(), named_pattern("triangle"), 0.1, 2, 4,
                           1e-6, n=1000, starts=4)
    assert rep.upper is not None
    assert rep.lower is None and "lower_vacuous" in rep.details
