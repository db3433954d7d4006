"""Exponential ground-truth deciders for every problem family in the package.

These are correctness anchors, not production solvers: straightforward
enumeration with hard size caps.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Optional

from .cardcsp import CspInstance
from .logic import MODE_EQ, MODE_GE, MODE_LE, Formula, Rel, _eval_node, matrix_atoms
from .saturation import BLACK, WHITE, PatternGraph
from .structures import Graph, Structure
from .wsat import WcnfInstance

SET_ENUM_CAP = 20
COLORING_ENUM_CAP = 16


class OracleBudgetError(RuntimeError):
    """The instance exceeds the oracle's enumeration budget."""


class SignatureMismatchError(ValueError):
    pass


# ----------------------------------------------------------------------
# Weighted-ESO model checking
# ----------------------------------------------------------------------

def _check_signature(f: Formula, s: Structure) -> None:
    arities = dict(s.signature)
    for atom in matrix_atoms(f.matrix):
        if isinstance(atom, Rel):
            if atom.name not in arities:
                raise SignatureMismatchError(
                    f"formula relation {atom.name!r} missing from structure")
            if arities[atom.name] != len(atom.args):
                raise SignatureMismatchError(
                    f"relation {atom.name!r} arity mismatch")


def _eval_fo(f: Formula, s: Structure, idx: int,
             assignment: dict[str, int], sv: set[int]) -> bool:
    if idx == len(f.prefix):
        return _eval_node(f.matrix, s, assignment, sv)
    quant, var = f.prefix[idx]
    universe = range(s.universe_size)
    if quant == "forall":
        for e in universe:
            assignment[var] = e
            if not _eval_fo(f, s, idx + 1, assignment, sv):
                del assignment[var]
                return False
        assignment.pop(var, None)
        return True
    for e in universe:
        assignment[var] = e
        if _eval_fo(f, s, idx + 1, assignment, sv):
            del assignment[var]
            return True
    assignment.pop(var, None)
    return False


def _expr_of(node, names: dict) -> str:
    from .logic import And, Eq, Iff, Implies, Member, Not, Or
    if isinstance(node, Rel):
        rel = f"R_{len(names)}"
        names[rel] = node.name
        args = ", ".join(f"v_{a}" for a in node.args)
        comma = "," if len(node.args) == 1 else ""
        return f"(({args}{comma}) in {rel})"
    if isinstance(node, Member):
        return f"(v_{node.term} in sv)"
    if isinstance(node, Eq):
        return f"(v_{node.left} == v_{node.right})"
    if isinstance(node, Not):
        return f"(not {_expr_of(node.sub, names)})"
    ops = {And: "and", Or: "or"}
    if type(node) in ops:
        return (f"({_expr_of(node.left, names)} {ops[type(node)]} "
                f"{_expr_of(node.right, names)})")
    if isinstance(node, Implies):
        return (f"((not {_expr_of(node.left, names)}) or "
                f"{_expr_of(node.right, names)})")
    if isinstance(node, Iff):
        return (f"({_expr_of(node.left, names)} == "
                f"{_expr_of(node.right, names)})")
    raise ValueError(f"unknown node {node!r}")


@lru_cache(maxsize=4096)
def _compiled_checker(f: Formula, s: Structure):
    """Compile the full quantifier expansion into one Python callable.

    Semantically identical to _eval_fo (left-to-right expansion with
    short-circuiting); only the interpretation overhead is removed.
    """
    names: dict = {}
    expr = _expr_of(f.matrix, names)
    for quant, var in reversed(f.prefix):
        fn = "all" if quant == "forall" else "any"
        expr = f"{fn}({expr} for v_{var} in U)"
    env = {rel: s.relations[name] for rel, name in names.items()}
    env["U"] = range(s.universe_size)
    return eval(f"lambda sv: {expr}", env)  # noqa: S307 - generated from our AST


def holds_for_set(f: Formula, s: Structure, sv: set[int]) -> bool:
    """Full quantifier expansion of the first-order part for a fixed set."""
    _check_signature(f, s)
    return _compiled_checker(f, s)(sv)


def _candidate_sizes(mode: str, k: int, n: int) -> list[int]:
    if mode == MODE_EQ:
        return [k] if 0 <= k <= n else []
    if mode == MODE_LE:
        return list(range(0, min(k, n) + 1))
    return list(range(max(k, 0), n + 1))


def oracle_models(f: Formula, s: Structure, k: int,
                  budget: int = SET_ENUM_CAP) -> bool:
    """True iff some set C with |C| {=,<=,>=} k satisfies the FO part."""
    if s.universe_size > budget:
        raise OracleBudgetError(
            f"universe size {s.universe_size} exceeds oracle budget {budget}")
    _check_signature(f, s)
    check = _compiled_checker(f, s)
    universe = range(s.universe_size)
    for size in _candidate_sizes(f.mode, k, s.universe_size):
        for combo in itertools.combinations(universe, size):
            if check(set(combo)):
                return True
    return False


# ----------------------------------------------------------------------
# Saturation
# ----------------------------------------------------------------------

@lru_cache(maxsize=65536)
def _saturation_signatures(g: Graph) -> dict:
    """Enumerate all colorings once per graph, pattern-independently.

    Each coloring is summarised by the set of (own color, available
    witness categories) pairs over its vertices; the table maps each
    summary to the maximum weight achieving it.
    """
    verts = g.vertices()
    m = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    full = (1 << m) - 1
    adj = [0] * m
    for v in verts:
        for u in g.neighbors(v):
            adj[idx[v]] |= 1 << idx[u]
    non = [(full & ~adj[i]) & ~(1 << i) for i in range(m)]
    table: dict[frozenset, int] = {}
    for c in range(1 << m):
        white = full & ~c
        entries = set()
        for i in range(m):
            avail = (bool(adj[i] & c), bool(adj[i] & white),
                     bool(non[i] & c), bool(non[i] & white))
            entries.add((BLACK if c >> i & 1 else WHITE, avail))
        sig = frozenset(entries)
        w = bin(c).count("1")
        if table.get(sig, -1) < w:
            table[sig] = w
    return table


def _signature_valid(p: PatternGraph, sig) -> bool:
    for color, (eb, ew, nb, nw) in sig:
        if ((eb and p.plus(color, BLACK)) or (ew and p.plus(color, WHITE))
                or (nb and p.minus(color, BLACK)) or (nw and p.minus(color, WHITE))):
            continue
        return False
    return True


def saturation_max_weight(p: PatternGraph, g: Graph,
                          budget: int = COLORING_ENUM_CAP) -> Optional[int]:
    """Maximum weight of a saturating coloring, None when unsaturable."""
    if g.kind != "basic":
        raise ValueError("saturation oracle requires a basic graph")
    if g.n > budget:
        raise OracleBudgetError(
            f"{g.n} vertices exceed the coloring enumeration budget {budget}")
    best = None
    for sig, w in _saturation_signatures(g).items():
        if (best is None or w > best) and _signature_valid(p, sig):
            best = w if best is None else max(best, w)
    return best


def oracle_saturation(p: PatternGraph, g: Graph, k: int,
                      budget: int = COLORING_ENUM_CAP) -> bool:
    """True iff some coloring with >= k black vertices has a witness function."""
    if g.n < 2:
        raise ValueError("saturation requires at least two vertices")
    best = saturation_max_weight(p, g, budget)
    return best is not None and best >= k


# ----------------------------------------------------------------------
# Cardinality CSP
# ----------------------------------------------------------------------

def oracle_csp(inst: CspInstance, budget: int = SET_ENUM_CAP) -> bool:
    """Enumerate candidate sets X with |X| <= k."""
    n = inst.universe_size
    if n > budget:
        raise OracleBudgetError(f"universe size {n} exceeds budget {budget}")
    for size in range(min(inst.k, n) + 1):
        for combo in itertools.combinations(range(n), size):
            x = set(combo)
            if all((1 if v in x else 0) in inst.unary_allowed for v in range(n)) \
               and all(((u in x) + (v in x)) in inst.pair_set(u, v)
                       for u, v in inst.all_pairs()):
                return True
    return False


# ----------------------------------------------------------------------
# Weighted CNF satisfiability
# ----------------------------------------------------------------------

def _clause_satisfied(clause, true_vars: set[int]) -> bool:
    for lit in clause:
        if lit > 0 and lit in true_vars:
            return True
        if lit < 0 and -lit not in true_vars:
            return True
    return False


def oracle_wsat(w: WcnfInstance, budget: int = SET_ENUM_CAP) -> bool:
    """Enumerate assignments of the admissible weights."""
    if w.num_vars > budget:
        raise OracleBudgetError(
            f"{w.num_vars} variables exceed the oracle budget {budget}")
    variables = range(1, w.num_vars + 1)
    for size in _candidate_sizes(w.mode, w.k, w.num_vars):
        for combo in itertools.combinations(variables, size):
            tv = set(combo)
            if all(_clause_satisfied(c, tv) for c in w.clauses):
                return True
    return False
