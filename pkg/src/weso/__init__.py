"""weso: classifier and solver suite for weighted ESO quantifier patterns."""

__version__ = "0.1.0"

from .classify import ComplexityLabel, classify_pattern, route_for
from .engine import Decision, solve_dispatch
from .gadgets import formula_library, gen_matched_reach
from .logic import Formula, Pattern, extract_pattern, is_subsequence, parse_formula
from .structures import Graph, Structure, graph_view, load_graph, load_structure

__all__ = [
    "ComplexityLabel", "classify_pattern", "route_for",
    "Decision", "solve_dispatch",
    "formula_library", "gen_matched_reach",
    "Formula", "Pattern", "extract_pattern", "is_subsequence", "parse_formula",
    "Graph", "Structure", "graph_view", "load_graph", "load_structure",
    "__version__",
]
