"""Top-level dispatcher: classify the pattern, pick a route, solve."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import cardcsp, oracles, saturation, wsat
from .classify import (ROUTE_CSP, ROUTE_ONE_WSAT, ROUTE_ORACLE,
                       ROUTE_SATURATION, ROUTE_SEARCH_TREE, ComplexityLabel,
                       classify_pattern, route_for)
from .logic import MODE_LE, Formula
from .structures import Graph, Structure, StructureError, graph_view

ROUTES = (ROUTE_ONE_WSAT, ROUTE_SEARCH_TREE, ROUTE_SATURATION,
          ROUTE_CSP, ROUTE_ORACLE)


class UnsupportedCombination(ValueError):
    """Requested route/class does not apply to the given inputs."""


@dataclass
class Decision:
    answer: bool
    route: str
    label: ComplexityLabel
    stats: dict = field(default_factory=dict)


def detect_structure_class(s: Structure) -> str:
    """basic/undirected for graph signatures, arbitrary otherwise."""
    try:
        g = graph_view(s)
    except StructureError:
        return "arbitrary"
    if g.kind == "basic":
        return "basic"
    if g.kind == "undirected":
        return "undirected"
    return "arbitrary"


def _solve_one_wsat(f: Formula, s: Structure, k: int, stats: dict) -> bool:
    grounded = wsat.ground_formula(f, s, k)
    stats["disjuncts"] = len(grounded.disjuncts)
    for inst in grounded.disjuncts:
        if inst.width <= 1:
            if wsat.solve_1wsat(inst):
                return True
        elif f.mode == MODE_LE:
            # residual membership atoms of the existential prefix can push
            # the width above 1; the search tree still decides mode <=
            stats["wide_disjunct"] = True
            if wsat.solve_wsat_le_searchtree(inst):
                return True
        else:
            stats["wide_disjunct"] = True
            if oracles.oracle_wsat(inst):
                return True
    return False


def _solve_search_tree(f: Formula, s: Structure, k: int, stats: dict) -> bool:
    grounded = wsat.ground_formula(f, s, k)
    stats["disjuncts"] = len(grounded.disjuncts)
    nodes = 0
    max_frontier = 0
    answer = False
    for inst in grounded.disjuncts:
        sub: dict = {}
        if wsat.solve_wsat_le_searchtree(inst, sub):
            answer = True
        nodes += sub.get("nodes", 0)
        max_frontier = max(max_frontier, sub.get("max_frontier", 0))
        if answer:
            break
    stats["nodes"] = nodes
    stats["max_frontier"] = max_frontier
    return answer


def solve_dispatch(f: Formula, s: Structure, k: int,
                   route_override: Optional[str] = None) -> Decision:
    """Answer (s, k) |= f via the route the classifier prescribes."""
    if k < 0:
        raise ValueError("parameter k must be non-negative")
    structure_class = detect_structure_class(s)
    word = f.word
    label = classify_pattern(f.mode, word, structure_class)
    route = route_override or route_for(f.mode, word, structure_class)
    if route_override is not None and route_override not in ROUTES:
        raise UnsupportedCombination(f"unknown route {route_override!r}")
    stats: dict = {"structure_class": structure_class, "pattern": word,
                   "mode": f.mode}

    if route == ROUTE_ONE_WSAT:
        answer = _solve_one_wsat(f, s, k, stats)
    elif route == ROUTE_SEARCH_TREE:
        if f.mode != MODE_LE:
            raise UnsupportedCombination("search tree route requires mode <=")
        answer = _solve_search_tree(f, s, k, stats)
    elif route == ROUTE_SATURATION:
        answer, route = _solve_saturation_route(f, s, k, stats)
    elif route == ROUTE_CSP:
        answer = _solve_csp_route(f, s, k, stats)
    elif route == ROUTE_ORACLE:
        answer = oracles.oracle_models(f, s, k)
    else:
        raise UnsupportedCombination(f"unknown route {route!r}")
    return Decision(answer, route, label, stats)


def _require_basic(s: Structure) -> Graph:
    g = graph_view(s)
    if g.kind != "basic":
        raise UnsupportedCombination("route requires a basic graph")
    return g


def _solve_saturation_route(f: Formula, s: Structure, k: int,
                            stats: dict) -> tuple[bool, str]:
    g = _require_basic(s)
    if g.n < 2:
        # the pattern-graph correspondence assumes at least two vertices
        stats["fallback"] = "tiny-graph"
        return oracles.oracle_models(f, s, k), ROUTE_ORACLE
    try:
        p = saturation.compile_pattern_graph(f)
    except saturation.SelfWitnessError:
        stats["fallback"] = "self-witness"
        return oracles.oracle_models(f, s, k), ROUTE_ORACLE
    stats["pattern_graph"] = saturation.format_pattern(p)
    answer = saturation.solve_saturation_ge(p, g, k, stats)
    return answer, ROUTE_SATURATION


def _solve_csp_route(f: Formula, s: Structure, k: int, stats: dict) -> bool:
    g = _require_basic(s)
    inst = cardcsp.compile_csp(f, g, k)
    return cardcsp.solve_csp_le(inst, stats)
