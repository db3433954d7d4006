"""Instance generators: matched-reach gadgets and the named formula library.

The matched-reach reductions produce inputs whose solvability under the
reachability formulas tracks the source instance exactly, making them
handy correctness and benchmark fodder for the minimisation routes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .logic import Formula, parse_formula
from .structures import Graph


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class MatchedReachInstance:
    """Layered graph of width n with perfect matchings between layers.

    `matchings[i]` maps position j in layer i+1 to a position in layer
    i+2 (0-based positions and layers).  s lives in the first layer,
    t in the last.
    """

    n: int
    k: int
    matchings: tuple[tuple[int, ...], ...]
    s: int
    t: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise GadgetError("width and layer count must be positive")
        if len(self.matchings) != self.k - 1:
            raise GadgetError("need exactly k-1 matchings")
        for perm in self.matchings:
            if sorted(perm) != list(range(self.n)):
                raise GadgetError("matchings must be permutations")
        if not (0 <= self.s < self.n and 0 <= self.t < self.n):
            raise GadgetError("s and t must be positions within a layer")

    def vertex(self, pos: int, layer: int) -> int:
        """Index of the vertex at `pos` in `layer` (0-based)."""
        return layer * self.n + pos

    def path_end(self) -> int:
        """Position reached in the last layer by following s's path."""
        pos = self.s
        for perm in self.matchings:
            pos = perm[pos]
        return pos

    def is_yes(self) -> bool:
        return self.path_end() == self.t


def gen_matched_reach(n: int, k: int, seed: int,
                      target: str = "yes") -> MatchedReachInstance:
    """Seeded random instance; target picks whether t lies on s's path."""
    if target not in ("yes", "no"):
        raise GadgetError("target must be 'yes' or 'no'")
    if target == "no" and n < 2:
        raise GadgetError("target=no needs width at least 2")
    rng = random.Random(seed)
    matchings = []
    for _ in range(k - 1):
        perm = list(range(n))
        rng.shuffle(perm)
        matchings.append(tuple(perm))
    s = rng.randrange(n)
    pos = s
    for perm in matchings:
        pos = perm[pos]
    if target == "yes":
        t = pos
    else:
        t = rng.choice([j for j in range(n) if j != pos])
    return MatchedReachInstance(n, k, tuple(matchings), s, t)


# ----------------------------------------------------------------------
# Reductions
# ----------------------------------------------------------------------

def _base_pairs(inst: MatchedReachInstance) -> set[tuple[int, int]]:
    pairs = set()
    for layer, perm in enumerate(inst.matchings):
        for pos, nxt in enumerate(perm):
            u = inst.vertex(pos, layer)
            v = inst.vertex(nxt, layer + 1)
            pairs.add((u, v))
            pairs.add((v, u))
    return pairs


def reduce_reach_aa(inst: MatchedReachInstance) -> tuple[Graph, int]:
    """Undirected graph with one self-loop at s; budget k.

    Directions are dropped, an extra matched layer is appended, the new
    edge at t is deleted, and the self-loop forces s into the solution;
    the closure of s then has size k exactly when t sits on s's path.
    """
    pairs = _base_pairs(inst)
    total = inst.n * (inst.k + 1)
    for pos in range(inst.n):
        u = inst.vertex(pos, inst.k - 1)
        v = inst.vertex(pos, inst.k)
        if pos != inst.t:
            pairs.add((u, v))
            pairs.add((v, u))
    s_vertex = inst.vertex(inst.s, 0)
    pairs.add((s_vertex, s_vertex))
    return Graph("undirected", total, frozenset(pairs),
                 frozenset(range(total))), inst.k


def reduce_reach_aaa(inst: MatchedReachInstance) -> tuple[Graph, int]:
    """Basic graph with triangles glued to s and t; budget k + 4."""
    pairs = _base_pairs(inst)
    total = inst.n * inst.k
    extra = []
    for anchor in (inst.vertex(inst.s, 0), inst.vertex(inst.t, inst.k - 1)):
        a, b = total + len(extra), total + len(extra) + 1
        extra.extend((a, b))
        for x, y in ((anchor, a), (anchor, b), (a, b)):
            pairs.add((x, y))
            pairs.add((y, x))
    total += len(extra)
    return Graph("basic", total, frozenset(pairs),
                 frozenset(range(total))), inst.k + 4


def reduce_reach_eaa(inst: MatchedReachInstance) -> tuple[Graph, int]:
    """Basic graph with a hub joined to all degree-1 vertices except s, t.

    Needs at least two layers: with a single layer the construction has
    no degree-1 vertices to anchor the hub and small closed sets appear
    regardless of reachability.
    """
    if inst.k < 2:
        raise GadgetError("the eaa reduction needs at least two layers")
    pairs = _base_pairs(inst)
    total = inst.n * inst.k
    degree: dict[int, int] = {}
    for u, v in pairs:
        degree[u] = degree.get(u, 0) + 1
    hub = total
    s_vertex = inst.vertex(inst.s, 0)
    t_vertex = inst.vertex(inst.t, inst.k - 1)
    for v in range(total):
        if degree.get(v, 0) == 1 and v not in (s_vertex, t_vertex):
            pairs.add((hub, v))
            pairs.add((v, hub))
    return Graph("basic", total + 1, frozenset(pairs),
                 frozenset(range(total + 1))), inst.k


# ----------------------------------------------------------------------
# Formula library
# ----------------------------------------------------------------------

_LIBRARY_SOURCES = {
    "clique":
        "exists>= C . forall x . forall y . "
        "((C(x) & C(y) & !(x = y)) -> adj(x, y))",
    "vertex-cover":
        "exists<= C . forall x . forall y . (adj(x, y) -> (C(x) | C(y)))",
    "dominating-set":
        "exists<= D . forall x . exists y . (D(y) & (x = y | adj(x, y)))",
    "reach-aa":
        "exists<= S . forall x . forall y . "
        "((adj(x, x) -> S(x)) & ((S(x) & adj(x, y)) -> S(y)))",
    "reach-aaa":
        "exists<= S . forall x . forall y . forall z . "
        "(((adj(x, y) & adj(y, z) & adj(x, z)) -> S(x))"
        " & ((S(x) & adj(x, y)) -> S(y)))",
    "reach-eaa":
        "exists<= S . exists z . forall x . forall y . "
        "(S(z) & ((S(x) & adj(x, y)) -> S(y)))",
}


def formula_library() -> dict[str, Formula]:
    """Named formulas used across the test suites and the CLI."""
    return {name: parse_formula(src) for name, src in _LIBRARY_SOURCES.items()}


def formula_source(name: str) -> str:
    return _LIBRARY_SOURCES[name]


# ----------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------

def dump_mreach(inst: MatchedReachInstance) -> str:
    lines = [f"mreach {inst.n} {inst.k} {inst.s} {inst.t}"]
    for perm in inst.matchings:
        lines.append(" ".join(str(p) for p in perm))
    return "\n".join(lines) + "\n"


def load_mreach(text: str) -> MatchedReachInstance:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("mreach"):
        raise GadgetError("expected 'mreach <n> <k> <s> <t>' header")
    head = lines[0].split()
    if len(head) != 5:
        raise GadgetError("malformed mreach header")
    n, k, s, t = (int(x) for x in head[1:])
    matchings = tuple(tuple(int(x) for x in ln.split()) for ln in lines[1:])
    return MatchedReachInstance(n, k, matchings, s, t)
