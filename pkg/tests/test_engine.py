import random

import pytest

from weso.engine import (UnsupportedCombination, detect_structure_class,
                         solve_dispatch)
from weso.gadgets import formula_library
from weso.logic import parse_formula
from weso.oracles import oracle_models
from weso.structures import basic_graph, graph_to_structure, load_structure

LIB = formula_library()


def random_basic(rng, n):
    p = rng.choice((0.2, 0.5, 0.8))
    return basic_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)
                           if rng.random() < p])


def test_detect_structure_class():
    assert detect_structure_class(
        graph_to_structure(basic_graph(2, [(0, 1)]))) == "basic"
    looped = load_structure(
        "structure\nuniverse 2\nrelation adj 2\n0 0\n0 1\n1 0\nend\n")
    assert detect_structure_class(looped) == "undirected"
    directed = load_structure(
        "structure\nuniverse 2\nrelation adj 2\n0 1\nend\n")
    assert detect_structure_class(directed) == "arbitrary"


def test_dispatch_vertex_cover_routes():
    p3 = graph_to_structure(basic_graph(3, [(0, 1), (1, 2)]))
    dec = solve_dispatch(LIB["vertex-cover"], p3, 1)
    assert dec.answer and dec.route == "CspBasic"
    # the same graph encoded as a digraph structure loses basicness and
    # falls to the search tree
    directed = load_structure(
        "structure\nuniverse 3\nrelation adj 2\n0 1\n1 0\n1 2\nend\n")
    dec2 = solve_dispatch(LIB["vertex-cover"], directed, 1)
    assert dec2.route == "SearchTree"


def test_dispatch_clique_k4_minus_edge():
    g = basic_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    dec = solve_dispatch(LIB["clique"], graph_to_structure(g), 3)
    assert dec.route == "OracleOnly"
    assert dec.answer  # {0,1,2} or {0,1,3} is a triangle
    dec4 = solve_dispatch(LIB["clique"], graph_to_structure(g), 4)
    assert not dec4.answer


def test_dispatch_dominating_set_star():
    s = graph_to_structure(basic_graph(4, [(0, 1), (0, 2), (0, 3)]))
    dec = solve_dispatch(LIB["dominating-set"], s, 1)
    assert dec.answer and dec.route == "OracleOnly"


def test_dispatch_saturation_route():
    f = parse_formula(
        "exists>= X . forall x . exists y . (X(x) & X(y) & adj(x, y))")
    g = basic_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    dec = solve_dispatch(f, graph_to_structure(g), 4)
    assert dec.route == "SaturationBasic"
    assert dec.answer
    assert "case" in dec.stats


def test_dispatch_self_witness_fallback():
    domset_ge = parse_formula(
        "exists>= D . forall x . exists y . (D(y) & (x = y | adj(x, y)))")
    s = graph_to_structure(basic_graph(3, [(0, 1), (1, 2)]))
    dec = solve_dispatch(domset_ge, s, 2)
    assert dec.route == "OracleOnly"
    assert dec.stats.get("fallback") == "self-witness"
    assert dec.answer == oracle_models(domset_ge, s, 2)


def test_dispatch_route_override():
    p3 = graph_to_structure(basic_graph(3, [(0, 1), (1, 2)]))
    dec = solve_dispatch(LIB["vertex-cover"], p3, 1, route_override="OracleOnly")
    assert dec.route == "OracleOnly" and dec.answer
    dec2 = solve_dispatch(LIB["vertex-cover"], p3, 1,
                          route_override="SearchTree")
    assert dec2.route == "SearchTree" and dec2.answer
    with pytest.raises(UnsupportedCombination):
        solve_dispatch(LIB["clique"], p3, 1, route_override="SearchTree")


def test_dispatch_one_wsat_route():
    f = parse_formula("exists= S . exists y . forall x . (S(x) -> x = y)")
    s = graph_to_structure(basic_graph(2, []))
    dec = solve_dispatch(f, s, 1)
    assert dec.route == "OneWsat"
    assert dec.answer  # S = {y} has weight 1
    dec0 = solve_dispatch(f, s, 2)
    assert not dec0.answer


def test_dispatch_one_wsat_wide_disjunct():
    # membership atoms on existential variables can produce width-2
    # disjuncts; the route still answers correctly
    f = parse_formula("exists<= S . exists y . forall x . (S(y) | S(x))")
    s = graph_to_structure(basic_graph(3, []))
    for k in range(4):
        dec = solve_dispatch(f, s, k)
        assert dec.answer == oracle_models(f, s, k), k


def test_route_equivalence_library_sweep():
    rng = random.Random(14)
    for name, f in LIB.items():
        for _ in range(10):
            g = random_basic(rng, rng.randint(1, 6))
            s = graph_to_structure(g)
            for k in range(3):
                fast = solve_dispatch(f, s, k)
                forced = solve_dispatch(f, s, k, route_override="OracleOnly")
                assert fast.answer == forced.answer, (name, k)
