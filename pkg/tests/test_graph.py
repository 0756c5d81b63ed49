from fractions import Fraction
from math import perm

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphhist.graph import (Graph, RootedPattern, SizeCapError, automorphism_count, copy_count,
                             extremal_counts, f_degree_distribution, merge_at_root,
                             merged_density_exact, named_pattern, rooted_copy_counts,
                             rooted_injection_counts, subgraph_density_exact)

from conftest import brute_automorphisms, brute_injections, random_graph


def test_graph_roundtrips():
    G = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    assert G.num_edges == 3
    assert G.has_edge(2, 1) and not G.has_edge(0, 4)
    assert Graph.from_adjacency(G.adjacency_matrix()) == G
    assert Graph.from_mask(5, G.mask()) == G
    assert G.degrees() == [1, 2, 1, 1, 1]


def test_graph_rejects_bad_rows():
    with pytest.raises(ValueError):
        Graph(2, [0b10, 0])
    with pytest.raises(ValueError):
        Graph(2, [0b01, 0b00])


def test_mask_bit_order_is_lexicographic_pairs():
    # pairs of 4 vertices: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
    assert Graph.from_edges(4, [(1, 2)]).mask() == 1 << 3
    assert Graph.from_edges(4, [(2, 3)]).mask() == 1 << 5


@pytest.mark.parametrize("name,aut,raut", [
    ("edge", 2, 1), ("triangle", 6, 2), ("k4", 24, 6), ("path3", 2, 1),
    ("star3", 6, 6), ("bowtie", 8, 8),
])
def test_automorphism_counts_match_brute_force(name, aut, raut):
    F = named_pattern(name)
    assert brute_automorphisms(F.graph) == aut
    assert brute_automorphisms(F.graph, F.root) == raut
    assert F.aut_count == aut and F.root_aut_count == raut


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**21 - 1))
def test_automorphism_count_property(n, bits):
    mask = bits & ((1 << (n * (n - 1) // 2)) - 1)
    H = Graph.from_mask(n, mask)
    assert automorphism_count(H) == brute_automorphisms(H)
    assert automorphism_count(H, fixed_root=0) == brute_automorphisms(H, 0)


def test_automorphism_cap():
    with pytest.raises(SizeCapError):
        automorphism_count(Graph.empty(17))


@pytest.mark.parametrize("name", ["edge", "triangle", "path3", "star3", "bowtie"])
@pytest.mark.parametrize("seed", [0, 1])
def test_rooted_injections_match_brute_force(name, seed):
    F = named_pattern(name)
    G = random_graph(7, 0.6, seed)
    got = rooted_injection_counts(G, F.graph, F.root)
    assert got == [brute_injections(G, F.graph, F.root, v) for v in range(G.n)]


def test_rooted_copies_in_complete_graph_hit_b_max():
    F = named_pattern("triangle")
    vec = rooted_copy_counts(Graph.complete(6), F)
    b_max, c = extremal_counts(F, 6)
    assert b_max == 10 and c == 20
    assert vec.raw_degrees == (10,) * 6


def test_f_degree_distribution_is_normalised():
    F = named_pattern("triangle")
    G = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    p = f_degree_distribution(G, F)
    # b_max = C(3, 2) = 3; vertices 0,1,2 sit in one triangle
    assert p.atoms == [0.0, 1 / 3, 1 / 3, 1 / 3]


def test_copy_count_and_density():
    G = Graph.complete(5)
    K3 = Graph.complete(3)
    assert copy_count(G, K3) == 10
    assert subgraph_density_exact(G, K3) == 1
    C4 = Graph.cycle(4)
    assert copy_count(C4, Graph.path(3)) == 4


def test_merge_at_root_shapes():
    F = named_pattern("triangle")
    F2 = merge_at_root(F, 2)
    assert F2.r == 5 and F2.graph.num_edges == 6
    assert brute_automorphisms(F2.graph) == F2.aut_count == 8
    with pytest.raises(SizeCapError):
        merge_at_root(F, 8)


@pytest.mark.parametrize("name", ["edge", "triangle", "path3"])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_merged_density_matches_generic_count(name, m):
    F = named_pattern(name)
    G = random_graph(9, 0.55, 3 + m)
    Fm = merge_at_root(F, m)
    generic = Fraction(sum(rooted_injection_counts(G, Fm.graph, 0)), perm(G.n, Fm.r))
    assert merged_density_exact(G, F, m) == generic


def test_merged_triangle_density_brute_force_small():
    F = named_pattern("triangle")
    G = random_graph(6, 0.7, 11)
    F2 = merge_at_root(F, 2)
    assert merged_density_exact(G, F, 2) == Fraction(brute_injections(G, F2.graph), perm(6, 5))


def test_pattern_with_nonzero_root():
    H = Graph.from_edges(3, [(0, 1), (1, 2)])
    F = RootedPattern(H, 1)
    assert F.root_aut_count == 2
    G = Graph.complete(4)
    assert rooted_copy_counts(G, F).raw_degrees == (3, 3, 3, 3)


def test_reference_degree_vectors():
    from graphhist.distributions import Empirical
    G = Graph.cycle(5)
    assert rooted_copy_counts(G, named_pattern("edge")).raw_degrees == tuple(G.degrees())
    assert f_degree_distribution(G, named_pattern("edge")).atoms == [0.5] * 5
    assert f_degree_distribution(Graph.complete(4), named_pattern("triangle")).atoms == [1.0] * 4
    assert f_degree_distribution(Graph.empty(5), named_pattern("triangle")).atoms == [0.0] * 5
    F = RootedPattern(Graph.path(3), 0)
    assert rooted_copy_counts(Graph.complete(3), F).raw_degrees == (2, 2, 2)
    star = merge_at_root(named_pattern("edge"), 3)
    assert star.graph.degrees() == [3, 1, 1, 1]
    assert merge_at_root(named_pattern("triangle"), 1) == named_pattern("triangle")
