"""Cardinality-constraint CSPs for exists<= forall-forall formulas on basic graphs.

Every two-element subset of the universe is constrained to one of two
count sets C, D over {0,1,2}; a solution is a set X of size at most k
whose intersection count with every pair lies in the pair's set.  The
solver follows the case ladder over (C, D): closed forms when one
constraint covers everything, and a high-degree kernel plus forced
extension otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .logic import Formula, Rel, _eval_node, matrix_atoms
from .structures import Graph, StructureError, make_structure


class CspError(ValueError):
    pass


@dataclass(frozen=True)
class CspInstance:
    universe_size: int
    c_set: frozenset[int]
    d_set: frozenset[int]
    c_pairs: frozenset[frozenset[int]]
    unary_allowed: frozenset[int]
    k: int

    def __post_init__(self):
        if not self.c_set <= {0, 1, 2} or not self.d_set <= {0, 1, 2}:
            raise CspError("count sets must be subsets of {0,1,2}")
        if not self.unary_allowed <= {0, 1}:
            raise CspError("unary allowed set must be a subset of {0,1}")
        for pair in self.c_pairs:
            if len(pair) != 2:
                raise CspError("constraint pairs must be two-element sets")
            if not all(0 <= v < self.universe_size for v in pair):
                raise CspError("constraint pair out of range")
        if self.k < 0:
            raise CspError("budget must be non-negative")

    def pair_set(self, u: int, v: int) -> frozenset[int]:
        return self.c_set if frozenset((u, v)) in self.c_pairs else self.d_set

    def all_pairs(self):
        return itertools.combinations(range(self.universe_size), 2)

    def with_budget(self, k: int) -> "CspInstance":
        return CspInstance(self.universe_size, self.c_set, self.d_set,
                           self.c_pairs, self.unary_allowed, k)


# ----------------------------------------------------------------------
# Compilation
# ----------------------------------------------------------------------

def _pair_structure(edge: bool):
    pairs = {(0, 1), (1, 0)} if edge else set()
    return make_structure(2, {"adj": pairs})


def compile_csp(f: Formula, g: Graph, k: int = 0) -> CspInstance:
    """Compile an exists<= forall-forall graph formula over a basic graph.

    A count m is allowed for a pair iff every size-m assignment to the
    pair satisfies the matrix under both variable orders; by convention
    the C side holds the non-edge pairs.  The diagonal x = y of the
    universal quantifiers yields the per-element unary allowed set.
    """
    if f.mode != "le" or f.word != "aa":
        raise CspError("compilation requires mode <= and pattern word 'aa'")
    if g.kind != "basic":
        raise CspError("compilation requires a basic graph")
    for atom in matrix_atoms(f.matrix):
        if isinstance(atom, Rel) and (atom.name != "adj" or len(atom.args) != 2):
            raise CspError("compilation requires the graph signature (adj/2)")
    x = f.prefix[0][1]
    y = f.prefix[1][1]

    def allowed(edge: bool) -> frozenset[int]:
        s = _pair_structure(edge)
        counts = set()
        if _eval_node(f.matrix, s, {x: 0, y: 1}, set()):
            counts.add(0)
        if (_eval_node(f.matrix, s, {x: 0, y: 1}, {0})
                and _eval_node(f.matrix, s, {x: 0, y: 1}, {1})):
            counts.add(1)
        if _eval_node(f.matrix, s, {x: 0, y: 1}, {0, 1}):
            counts.add(2)
        return frozenset(counts)

    s0 = _pair_structure(False)
    unary = frozenset(m for m in (0, 1)
                      if _eval_node(f.matrix, s0, {x: 0, y: 0}, {0} if m else set()))

    verts = g.vertices()
    order = {v: i for i, v in enumerate(verts)}
    non_edges = frozenset(
        frozenset((order[u], order[v]))
        for u, v in itertools.combinations(verts, 2) if not g.has_edge(u, v))
    return CspInstance(len(verts), allowed(False), allowed(True),
                       non_edges, unary, k)


# ----------------------------------------------------------------------
# Solver
# ----------------------------------------------------------------------

def _pure_case(s: frozenset[int], n: int, k: int) -> bool:
    """All pairs carry the same count set (n >= 2)."""
    if 0 in s:
        return True
    if not s:
        return False
    if s == frozenset({1}):
        return n <= 2 and k >= 1
    if s == frozenset({2}):
        return n <= k
    # s == {1, 2}: all but at most one element enter the solution
    return n - 1 <= k


def _minimal_covers(edges: list[frozenset[int]], budget: int
                    ) -> list[frozenset[int]]:
    """All inclusion-minimal-ish vertex covers within the budget."""
    out: set[frozenset[int]] = set()

    def rec(chosen: frozenset[int], idx: int):
        while idx < len(edges) and edges[idx] & chosen:
            idx += 1
        if idx == len(edges):
            out.add(chosen)
            return
        if len(chosen) >= budget:
            return
        for v in sorted(edges[idx]):
            rec(chosen | {v}, idx + 1)

    rec(frozenset(), 0)
    return sorted(out, key=lambda c: (len(c), tuple(sorted(c))))


def _full_check(inst: CspInstance, x: set[int]) -> bool:
    if len(x) > inst.k:
        return False
    for v in range(inst.universe_size):
        if (1 if v in x else 0) not in inst.unary_allowed:
            return False
    for u, v in inst.all_pairs():
        if ((u in x) + (v in x)) not in inst.pair_set(u, v):
            return False
    return True


def _kernel_solve(inst: CspInstance, cover_pairs: list[frozenset[int]],
                  stats: Optional[dict]) -> bool:
    """Kernelize on the 0-free cover side, then extend by propagation.

    High-degree cover vertices are forced in; the remaining cover edges
    form the kernel whose covers are enumerated; everything else is
    determined by constraint propagation, with the leftover block
    completed all-out, all-in, or exhaustively when tiny.
    """
    n, k = inst.universe_size, inst.k
    degree: dict[int, int] = {v: 0 for v in range(n)}
    for pair in cover_pairs:
        for v in pair:
            degree[v] += 1
    high = {v for v in range(n) if degree[v] > k}
    if len(high) > k:
        return False
    kernel_edges = [p for p in cover_pairs if not p & high]
    # Buss-style bound: <= k cover vertices of degree <= k each
    if len(kernel_edges) > k * k:
        return False

    for core in _minimal_covers(kernel_edges, k - len(high)):
        value: dict[int, bool] = {v: True for v in high | core}
        dead = False
        changed = True
        while changed and not dead:
            changed = False
            for u, v in inst.all_pairs():
                su = value.get(u)
                sv = value.get(v)
                allowed = inst.pair_set(u, v)
                if su is None and sv is None:
                    continue
                if su is not None and sv is not None:
                    if (su + sv) not in allowed:
                        dead = True
                        break
                    continue
                fixed, free = (su, v) if su is not None else (sv, u)
                options = [b for b in (False, True) if (fixed + b) in allowed]
                if not options:
                    dead = True
                    break
                if len(options) == 1:
                    value[free] = options[0]
                    changed = True
        if dead:
            continue
        rest = [v for v in range(n) if v not in value]
        if len(rest) <= 2:
            candidates = [set(sub) for r in range(len(rest) + 1)
                          for sub in itertools.combinations(rest, r)]
        else:
            candidates = [set(), set(rest)]
        chosen = {v for v, b in value.items() if b}
        for cand in candidates:
            if _full_check(inst, chosen | cand):
                return True
    return False


def solve_csp_le(inst: CspInstance, stats: Optional[dict] = None) -> bool:
    """Decide the instance; equals brute-force enumeration over all X."""

    def note(case: str):
        if stats is not None:
            stats["case"] = case

    n, k = inst.universe_size, inst.k
    una = inst.unary_allowed
    if n == 0:
        note("empty-universe")
        return True
    if not una:
        note("unary-empty")
        return False
    if una == frozenset({1}):
        note("unary-all-in")
        if n > k:
            return False
        return all(2 in inst.pair_set(u, v) for u, v in inst.all_pairs())
    if una == frozenset({0}):
        note("unary-all-out")
        return all(0 in inst.pair_set(u, v) for u, v in inst.all_pairs())
    if n == 1:
        note("singleton")
        return True

    c_present = bool(inst.c_pairs)
    d_present = any(frozenset(p) not in inst.c_pairs for p in inst.all_pairs())

    if inst.c_set == inst.d_set or not c_present or not d_present:
        if inst.c_set == inst.d_set or not d_present:
            s = inst.c_set
        else:
            s = inst.d_set
        note(f"pure-{sorted(s)}")
        return _pure_case(s, n, k)
    if 0 in inst.c_set and 0 in inst.d_set:
        note("both-zero")
        return True
    if not inst.c_set or not inst.d_set:
        note("unsatisfiable-side")
        return False

    c_edges = [frozenset(p) for p in inst.c_pairs]
    d_edges = [frozenset(p) for p in inst.all_pairs()
               if frozenset(p) not in inst.c_pairs]
    if 0 in inst.c_set:
        note("kernel-cover-d")
        return _kernel_solve(inst, d_edges, stats)
    if 0 in inst.d_set:
        note("kernel-cover-c")
        return _kernel_solve(inst, c_edges, stats)
    # both sides 0-free: kernelize on the side whose partner is {1} or {2}
    if inst.c_set in (frozenset({1}), frozenset({2})):
        note("kernel-cover-d0")
        return _kernel_solve(inst, d_edges, stats)
    note("kernel-cover-c0")
    return _kernel_solve(inst, c_edges, stats)


# ----------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------

def dump_csp(inst: CspInstance) -> str:
    def braces(s):
        return "{" + ",".join(str(x) for x in sorted(s)) + "}"
    lines = [f"csp {inst.universe_size} {inst.k}",
             f"cset {braces(inst.c_set)}",
             f"dset {braces(inst.d_set)}",
             f"unary {braces(inst.unary_allowed)}"]
    for pair in sorted(tuple(sorted(p)) for p in inst.c_pairs):
        lines.append(f"cpair {pair[0]} {pair[1]}")
    return "\n".join(lines) + "\n"


def _parse_braced(tok: str) -> frozenset[int]:
    tok = tok.strip()
    if not (tok.startswith("{") and tok.endswith("}")):
        raise CspError(f"expected braced set, got {tok!r}")
    inner = tok[1:-1].strip()
    if not inner:
        return frozenset()
    return frozenset(int(t) for t in inner.split(","))


def load_csp(text: str) -> CspInstance:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("csp"):
        raise CspError("expected 'csp <n> <k>' header")
    head = lines[0].split()
    if len(head) != 3:
        raise CspError("malformed csp header")
    n, k = int(head[1]), int(head[2])
    c_set = d_set = None
    unary = frozenset({0, 1})
    pairs = set()
    for ln in lines[1:]:
        toks = ln.split(None, 1)
        if toks[0] == "cset":
            c_set = _parse_braced(toks[1])
        elif toks[0] == "dset":
            d_set = _parse_braced(toks[1])
        elif toks[0] == "unary":
            unary = _parse_braced(toks[1])
        elif toks[0] == "cpair":
            u, v = (int(t) for t in toks[1].split())
            pairs.add(frozenset((u, v)))
        else:
            raise CspError(f"unknown line {ln!r}")
    if c_set is None or d_set is None:
        raise CspError("missing cset or dset")
    return CspInstance(n, c_set, d_set, frozenset(pairs), unary, k)
