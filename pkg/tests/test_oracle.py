import math

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planargeo.errors import ResourceError, UsageError
from planargeo.models import bipartite_pvalent, numeric, tetravalent, trivalent
from planargeo.oracle import (TETRAVALENT, TRIVALENT_R, TRIVALENT_S, OracleFamily, catalan,
                              census, census_with_check, close_tree, contour_distance, cut_map,
                              dual_distance, enumerate_trees, family_by_name, fuss_catalan,
                              is_bipartite_map, partial_sums, tree_count)
from planargeo.recursion import solve_sequences


def test_tree_counts_closed_forms():
    for n in range(7):
        assert tree_count(TETRAVALENT, n) == 3 ** n * catalan(n)
        assert tree_count(family_by_name("bipartite3"), n) == 2 ** n * catalan(n)
    assert [tree_count(TRIVALENT_R, n) for n in range(6)] == [1, 0, 4, 0, 40, 0]
    assert [tree_count(TRIVALENT_S, n) for n in range(6)] == [0, 2, 0, 12, 0, 128]


def test_enumeration_matches_count():
    for fam in (TETRAVALENT, TRIVALENT_R, TRIVALENT_S, family_by_name("bipartite4")):
        for n in range(4):
            trees = enumerate_trees(fam, n)
            assert len(trees) == tree_count(fam, n)
            assert len({t.encode() for t in trees}) == len(trees)


@pytest.mark.parametrize("p", [3, 4, 5])
def test_fuss_catalan(p):
    # oracle: plane trees with (p-1)-ary internal nodes by the cycle lemma
    for n in range(8):
        assert fuss_catalan(n, p) == math.comb((p - 1) * n + 1, n) // ((p - 1) * n + 1)


@pytest.mark.parametrize("fam", [TETRAVALENT, TRIVALENT_R, family_by_name("bipartite3")],
                         ids=["tetra", "tri", "bip3"])
def test_closed_maps_are_planar(fam):
    for t in enumerate_trees(fam, 3):
        m = close_tree(t)
        assert m.euler_characteristic() == 2
        g = nx.MultiGraph()
        for h in m.live():
            g.add_edge(m.vertex[h], m.vertex[m.alpha[h]])
        assert nx.check_planarity(nx.Graph(g))[0]
        if fam.bipartite:
            assert is_bipartite_map(m)


@pytest.mark.parametrize("fam", [TETRAVALENT, TRIVALENT_R, TRIVALENT_S,
                                 family_by_name("bipartite3")], ids=["tetra", "tri", "S", "bip3"])
def test_contour_equals_dual_distance(fam):
    res = census_with_check(fam, 4)
    assert res["mismatches"] == 0 and res["trees"] == tree_count(fam, 4)


def test_cut_map_inverts_closure():
    for fam in (TETRAVALENT, TRIVALENT_R, family_by_name("tetra_hexa")):
        for t in enumerate_trees(fam, 3):
            assert cut_map(close_tree(t), fam) == t
    bip = family_by_name("bipartite3")
    with pytest.raises(UsageError):
        cut_map(close_tree(enumerate_trees(bip, 1)[0]), bip)


@pytest.mark.parametrize("model, fam, name", [
    (tetravalent(), TETRAVALENT, "R"),
    (trivalent(), TRIVALENT_R, "R"),
    (trivalent(), TRIVALENT_S, "S"),
    (bipartite_pvalent(3, {"gt1": numeric(1)}), family_by_name("bipartite3"), "R"),
], ids=["tetra", "tri_R", "tri_S", "bip3"])
def test_census_matches_series(model, fam, name):
    N = 5
    series = solve_sequences(model, N)
    table = census(fam, N)
    sums = partial_sums(table, N + 2)
    for n in range(N + 3):
        assert sums[n] == int(series[(name, n)].coefficient(N))


def test_distance_profile_of_small_trees():
    # [g]R_0 = 2: two of the three single-vertex trees close at distance 0
    assert census(TETRAVALENT, 1) == {0: 2, 1: 1}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 134))
def test_distance_is_nonnegative_and_bounded(i):
    t = enumerate_trees(TETRAVALENT, 3)[i]
    d = contour_distance(t)
    assert 0 <= d <= 4
    assert dual_distance(close_tree(t)) == d


def test_worker_invariance():
    one = census_with_check(TETRAVALENT, 4, workers=1)
    two = census_with_check(TETRAVALENT, 4, workers=2)
    assert one == two


def test_budget_and_usage_errors():
    with pytest.raises(ResourceError):
        enumerate_trees(TETRAVALENT, 9)
    with pytest.raises(UsageError):
        OracleFamily("even", (5,))
    with pytest.raises(UsageError):
        OracleFamily("even", charge=0)
    with pytest.raises(UsageError):
        family_by_name("pentagonal")


def test_undirected_distance_is_reported_not_asserted():
    res = census_with_check(family_by_name("bipartite3"), 4)
    assert res["mismatches"] == 0
    # undirected crossings shortcut some bipartite distances
    assert 0 < res["undirected_differs"] < res["trees"]
    assert census_with_check(TETRAVALENT, 3)["undirected_differs"] == 0
