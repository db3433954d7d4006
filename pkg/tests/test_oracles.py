import itertools
import random

import pytest

from weso.cardcsp import CspInstance
from weso.gadgets import formula_library
from weso.oracles import (OracleBudgetError, SignatureMismatchError,
                          oracle_csp, oracle_models, oracle_saturation,
                          oracle_wsat, saturation_max_weight)
from weso.saturation import pattern
from weso.structures import basic_graph, graph_to_structure, make_structure
from weso.wsat import make_wcnf

LIB = formula_library()


def random_basic(rng, n, p=None):
    p = p if p is not None else rng.choice((0.2, 0.5, 0.8))
    return basic_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)
                           if rng.random() < p])


# ----------------------------------------------------------- oracle_models

def test_models_clique_on_triangle():
    s = graph_to_structure(basic_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert oracle_models(LIB["clique"], s, 3)
    assert not oracle_models(LIB["clique"], s, 4)


def test_models_dominating_star():
    s = graph_to_structure(basic_graph(4, [(0, 1), (0, 2), (0, 3)]))
    assert oracle_models(LIB["dominating-set"], s, 1)


def test_models_signature_mismatch():
    s = make_structure(2, {"edge": [(0, 1)]})
    with pytest.raises(SignatureMismatchError):
        oracle_models(LIB["clique"], s, 1)


def test_models_budget():
    s = make_structure(25, {"adj": []})
    with pytest.raises(OracleBudgetError):
        oracle_models(LIB["clique"], s, 1)


def _is_clique(g, c):
    return all(g.has_edge(u, v) for u in c for v in c if u != v)


def _is_vertex_cover(g, c):
    return all(u in c or v in c for (u, v) in g.adjacency)


def _is_dominating(g, c):
    return all(v in c or any(u in c for u in g.neighbors(v))
               for v in g.vertices())


def test_models_agrees_with_direct_checkers():
    rng = random.Random(17)
    for _ in range(40):
        g = random_basic(rng, rng.randint(1, 6))
        s = graph_to_structure(g)
        n = g.n
        for k in range(n + 2):
            want_clique = any(_is_clique(g, set(c))
                              for size in range(k, n + 1)
                              for c in itertools.combinations(range(n), size))
            assert oracle_models(LIB["clique"], s, k) == want_clique
            want_vc = any(_is_vertex_cover(g, set(c))
                          for size in range(0, min(k, n) + 1)
                          for c in itertools.combinations(range(n), size))
            assert oracle_models(LIB["vertex-cover"], s, k) == want_vc
            want_ds = any(_is_dominating(g, set(c))
                          for size in range(0, min(k, n) + 1)
                          for c in itertools.combinations(range(n), size))
            assert oracle_models(LIB["dominating-set"], s, k) == want_ds


def test_models_monotone_in_k():
    rng = random.Random(23)
    for _ in range(20):
        g = random_basic(rng, rng.randint(1, 5))
        s = graph_to_structure(g)
        for name in ("clique", "vertex-cover"):
            f = LIB[name]
            answers = [oracle_models(f, s, k) for k in range(g.n + 2)]
            if f.mode == "ge":
                # accepting k implies accepting k-1
                for k in range(1, len(answers)):
                    if answers[k]:
                        assert answers[k - 1]
            else:
                for k in range(len(answers) - 1):
                    if answers[k]:
                        assert answers[k + 1]


# ------------------------------------------------------- oracle_saturation

def test_saturation_black_loop_edge():
    g = basic_graph(2, [(0, 1)])
    assert oracle_saturation(pattern("bb"), g, 2)


def test_saturation_isolated_vertex_rejects_plus_only():
    g = basic_graph(3, [(0, 1)])
    for k in range(4):
        assert not oracle_saturation(pattern("bb"), g, k)


def test_saturation_cross_arcs_p4():
    p4 = basic_graph(4, [(0, 1), (1, 2), (2, 3)])
    assert oracle_saturation(pattern("bw,wb"), p4, 2)


def test_saturation_requires_two_vertices():
    with pytest.raises(ValueError):
        oracle_saturation(pattern("bb"), basic_graph(1, []), 0)


def test_saturation_isomorphism_invariance():
    rng = random.Random(5)
    pats = [pattern("bb"), pattern("wb", "bw"), pattern("bw,wb"),
            pattern("ww", "bw,wb")]
    for _ in range(25):
        n = rng.randint(2, 6)
        g = random_basic(rng, n)
        perm = list(range(n))
        rng.shuffle(perm)
        h = basic_graph(n, [(perm[u], perm[v]) for (u, v) in g.adjacency
                            if u < v])
        for p in pats:
            for k in range(3):
                assert oracle_saturation(p, g, k) == oracle_saturation(p, h, k)


def test_saturation_max_weight_budget():
    with pytest.raises(OracleBudgetError):
        saturation_max_weight(pattern("bb"), basic_graph(17, []))


# ------------------------------------------------------------- oracle_csp

def test_csp_all_pairs_d12():
    inst = CspInstance(4, frozenset(), frozenset({1, 2}), frozenset(),
                       frozenset({0, 1}), 3)
    assert oracle_csp(inst)


def test_csp_all_pairs_d2():
    inst = CspInstance(3, frozenset(), frozenset({2}), frozenset(),
                       frozenset({0, 1}), 2)
    assert not oracle_csp(inst)


def test_csp_vertex_cover_compile_of_p3():
    # edges constrained to {1,2}, non-edges unconstrained
    edges = frozenset({frozenset({0, 1}), frozenset({1, 2})})
    inst = CspInstance(3, frozenset({0, 1, 2}), frozenset({1, 2}),
                       frozenset({frozenset({0, 2})}), frozenset({0, 1}), 1)
    # here c_pairs are the non-edges
    assert oracle_csp(inst)


def test_csp_monotone_in_k():
    rng = random.Random(31)
    sets3 = [frozenset(s) for s in
             ([], [0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2])]
    for _ in range(60):
        n = rng.randint(0, 6)
        pairs = frozenset(frozenset(p) for p in
                          itertools.combinations(range(n), 2)
                          if rng.random() < 0.5)
        inst0 = CspInstance(n, rng.choice(sets3), rng.choice(sets3), pairs,
                            frozenset({0, 1}), 0)
        answers = [oracle_csp(inst0.with_budget(k)) for k in range(4)]
        for k in range(3):
            if answers[k]:
                assert answers[k + 1]


# ------------------------------------------------------------ oracle_wsat

def test_wsat_examples():
    inst = make_wcnf(3, [[1, 2], [2, 3]], 1, "le")
    assert oracle_wsat(inst)
    assert not oracle_wsat(make_wcnf(3, [[1, 2], [2, 3]], 0, "le"))
    eq = make_wcnf(3, [[1], [-2]], 3, "eq")
    assert not oracle_wsat(eq)


def test_wsat_monotone():
    rng = random.Random(41)
    for _ in range(80):
        nv = rng.randint(1, 8)
        clauses = [[rng.choice((v, -v)) for v in rng.sample(range(1, nv + 1),
                                                            rng.randint(1, min(3, nv)))]
                   for _ in range(rng.randint(0, nv))]
        for mode in ("le", "ge"):
            inst0 = make_wcnf(nv, clauses, 0, mode)
            answers = [oracle_wsat(make_wcnf(nv, clauses, k, mode))
                       for k in range(nv + 2)]
            if mode == "ge":
                for k in range(1, len(answers)):
                    if answers[k]:
                        assert answers[k - 1]
            else:
                for k in range(len(answers) - 1):
                    if answers[k]:
                        assert answers[k + 1]
