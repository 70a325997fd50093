import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kakeya_conic import cliques as cq
from kakeya_conic.cliques import BudgetExceeded, CliqueGraph
from kakeya_conic.gf import field_of_order
from kakeya_conic.kakeya import construct_regulus_split, construct_secant_variant


def graphs(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.integers(0, 2 ** (n * (n - 1) // 2) - 1).map(lambda c: CliqueGraph.from_code(n, c)))


def _brute_maximal_cliques(G):
    cl = [frozenset(S) for r in range(1, G.n + 1) for S in itertools.combinations(range(G.n), r)
          if all(G.adjacent(a, b) for a, b in itertools.combinations(S, 2))]
    return {S for S in cl if not any(S < T for T in cl)}


def _brute_canon(G):
    n = G.n
    best = None
    for perm in itertools.permutations(range(n)):
        code = G.relabel(perm).code
        best = code if best is None else min(best, code)
    return best


def _two_colourable(G):
    return any(all(((m >> a) & 1) != ((m >> b) & 1) for a, b in G.edges)
               for m in range(2 ** G.n))


@settings(max_examples=300, deadline=None)
@given(graphs())
def test_maximal_cliques_match_brute_force(G):
    assert set(G.maximal_cliques) == _brute_maximal_cliques(G)
    inside = sum(math.comb(len(c), 2) for c in G.maximal_cliques)
    assert inside >= G.edge_count
    assert G.edge_disjoint == (inside == G.edge_count)
    assert G.c_value == sum(len(c) - 1 for c in G.maximal_cliques)


@settings(max_examples=200, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_canonical_form_is_relabel_invariant(G, rnd):
    perm = list(range(G.n))
    rnd.shuffle(perm)
    H = G.relabel(perm)
    assert cq.canonical_form(G) == cq.canonical_form(H)
    assert cq.isomorphic(G, H)


@settings(max_examples=150, deadline=None)
@given(graphs(6), graphs(6))
def test_isomorphism_matches_brute_force(G, H):
    if G.n != H.n:
        return
    assert cq.isomorphic(G, H) == (_brute_canon(G) == _brute_canon(H))


@settings(max_examples=200, deadline=None)
@given(graphs(7))
def test_bipartite_matches_two_colouring(G):
    assert G.is_bipartite == _two_colourable(G)


def test_basic_examples():
    T = CliqueGraph.from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    assert not T.edge_disjoint
    C5 = cq.cycle_graph(5)
    assert len(C5.maximal_cliques) == 5 and C5.edge_disjoint
    assert cq.c_value(cq.complete_bipartite(2, 3)) == 6
    assert cq.c_value(CliqueGraph.from_edges(4, [])) == 0
    assert cq.complete_graph(4).histogram == {4: 1}


def test_gamma_of_constructions():
    F = field_of_order(3)
    G = cq.build_gamma(construct_regulus_split(F, 2))
    assert cq.isomorphic(G, cq.complete_bipartite(2, 2))
    G = cq.build_gamma(construct_regulus_split(field_of_order(4), 2))
    assert cq.isomorphic(G, cq.complete_bipartite(2, 3))
    G = cq.build_gamma(construct_secant_variant(field_of_order(4), 2))
    assert G.edge_disjoint


def test_sporadic_graph():
    S5 = cq.sporadic_graph(5)
    assert (S5.edge_count, S5.c_value) == (6, 5)
    assert S5.histogram.get(3) == 1
    S7 = cq.sporadic_graph(7)
    assert (S7.edge_count, S7.c_value) == (11, 10)
    for n in (5, 7, 9, 11):
        for split in ([], None):
            S = cq.sporadic_graph(n, split)
            assert S.edge_count == (n * n - 1) // 4 - (n - 5) // 2
            assert S.c_value == (n * n - 1) // 4 - (n - 3) // 2
            assert S.histogram.get(3) == 1 and S.edge_disjoint
    with pytest.raises(ValueError):
        cq.sporadic_graph(6)
    with pytest.raises(ValueError):
        cq.sporadic_graph(3)


def test_enumeration_counts():
    assert [len(cq.enumerate_graphs(n)) for n in range(1, 7)] == [1, 2, 4, 11, 34, 156]
    assert [len(cq.enumerate_graphs(n, "edge-disjoint")) for n in (3, 4, 5)] == [4, 10, 25]
    five = cq.enumerate_graphs(5, "edge-disjoint")
    assert cq.c_distribution(five) == {0: 1, 1: 1, 2: 3, 3: 6, 4: 10, 5: 3, 6: 1}


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_enumeration_covers_all_labelled_graphs(n):
    classes = cq.enumerate_graphs(n)
    assert sum(math.factorial(n) // cq.automorphism_count(G) for G in classes) == 2 ** (n * (n - 1) // 2)
    assert len({cq.canonical_form(G) for G in classes}) == len(classes)


def test_named_graphs():
    names = cq.NAMED_GRAPHS
    assert cq.isomorphic(names["d1"], cq.complete_bipartite(2, 3))
    assert cq.isomorphic(names["d4"], cq.cycle_graph(5))
    assert cq.isomorphic(names["d3"], cq.sporadic_graph(5))
    for d in ("d1", "d2", "d3", "d4"):
        assert names[d].edge_disjoint and cq.graph_name(names[d]) == d
    assert [names[f"d{i}"].c_value for i in range(1, 5)] == [6, 5, 5, 5]
    # q = 3 types: every edge-disjoint graph on 4 vertices that is not edgeless or a single edge
    four = cq.enumerate_graphs(4, "edge-disjoint")
    named = {cq.canonical_form(names[f"m{i}"]) for i in range(1, 11)}
    assert named == {cq.canonical_form(G) for G in four}


def test_census_csv():
    text = cq.census_csv(cq.enumerate_graphs(3))
    lines = text.strip().splitlines()
    assert lines[0] == "canonical_form_hex,edge_count,C_value,edge_disjoint,bipartite"
    assert len(lines) == 5


def test_json_round_trip():
    G = cq.sporadic_graph(7)
    obj = G.to_json()
    assert obj["n"] == 7 and obj["edges"] == sorted(obj["edges"])
    assert CliqueGraph.from_json(obj) == G


def test_mantel_oracle():
    assert cq.mantel_oracle(2).max_edges == 1
    for n, best in ((4, 4), (5, 6)):
        r = cq.mantel_oracle(n)
        assert r.max_edges == best and r.ok
    for n in range(1, 8):
        assert cq.mantel_oracle(n).ok


def test_hanson_toft_oracle():
    for n in (6, 7):
        r = cq.hanson_toft_oracle(n)
        assert r.ok and set(r.checked) == {0, 1}
        assert all(v > 0 for v in r.checked.values())
    r6 = cq.hanson_toft_oracle(6)
    assert r6.boundary_l == 2
    if r6.boundary_witness is not None:
        assert not CliqueGraph.from_json(r6.boundary_witness).is_bipartite


def test_main_lemma_oracle():
    r = cq.main_lemma_oracle(6)
    assert r.ok and r.threshold == 7 and r.qualifying > 0
    for s in r.structures:
        assert s["C"] >= 8
        d, eps = s["delta"], s["epsilon"]
        assert s["removed"] == eps - d * d
    for n in range(2, 8):
        assert cq.main_lemma_oracle(n).ok


def test_bipartite_structure_rebuilds():
    rng = random.Random(5)
    for _ in range(50):
        a = rng.randint(1, 4)
        b = rng.randint(1, 4)
        G = cq.complete_bipartite(a, b)
        s = cq.bipartite_structure(G)
        if s is not None:
            assert s.rebuild(G.n) == G


def test_budgets():
    with pytest.raises(BudgetExceeded):
        cq.mantel_oracle(8)
    with pytest.raises(BudgetExceeded):
        cq.canonical_form(cq.complete_graph(9))
    with pytest.raises(BudgetExceeded):
        CliqueGraph.from_edges(17, []).maximal_cliques
