"""Finite relational structures, graph views, and peeling machinery.

Structures are plain relational structures over 0-based element indices.
Graphs are a specialised view used by the solvers; vertices are never
reindexed when removed, they are simply marked inactive, so indices stay
stable across reduction rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional


class StructureError(ValueError):
    """Invalid structure or graph (bad arity, index out of range, ...)."""


class StructureParseError(StructureError):
    """Parse failure in a structure/graph file; carries a line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite relational structure: universe {0..n-1} plus named relations."""

    universe_size: int
    signature: tuple[tuple[str, int], ...]
    relations: Mapping[str, frozenset[tuple[int, ...]]]

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.universe_size == other.universe_size
                and self.signature == other.signature
                and dict(self.relations) == dict(other.relations))

    def __hash__(self):
        return hash((self.universe_size, self.signature,
                     frozenset((k, v) for k, v in self.relations.items())))

    def __post_init__(self):
        if self.universe_size < 0:
            raise StructureError("universe size must be non-negative")
        arities = dict(self.signature)
        if len(arities) != len(self.signature):
            raise StructureError("duplicate relation name in signature")
        if set(self.relations) != set(arities):
            raise StructureError("relations do not match signature")
        for name, tuples in self.relations.items():
            arity = arities[name]
            for tup in tuples:
                if len(tup) != arity:
                    raise StructureError(
                        f"relation {name}: tuple {tup} does not have arity {arity}")
                for e in tup:
                    if not 0 <= e < self.universe_size:
                        raise StructureError(
                            f"relation {name}: element {e} out of range")

    def arity(self, name: str) -> int:
        for rel, ar in self.signature:
            if rel == name:
                return ar
        raise StructureError(f"unknown relation {name!r}")

    def has(self, name: str, tup: tuple[int, ...]) -> bool:
        try:
            return tup in self.relations[name]
        except KeyError:
            raise StructureError(f"unknown relation {name!r}") from None


def make_structure(universe_size: int,
                   relations: Mapping[str, Iterable[tuple[int, ...]]]) -> Structure:
    """Build a Structure, inferring the signature from the given tuples' arity."""
    sig = []
    rels = {}
    for name, tuples in relations.items():
        tuples = frozenset(tuple(t) for t in tuples)
        if tuples:
            arity = len(next(iter(tuples)))
        else:
            arity = 2  # empty relations default to binary (graph usage)
        sig.append((name, arity))
        rels[name] = tuples
    return Structure(universe_size, tuple(sig), rels)


@dataclass(frozen=True)
class Graph:
    """Graph view with an active-vertex encoding.

    `adjacency` holds ordered pairs (both directions for undirected/basic
    graphs).  `active` is the set of live vertices; inactive vertices and
    their edges are treated as absent everywhere.
    """

    kind: str  # "directed" | "undirected" | "basic"
    vertex_count: int
    adjacency: frozenset[tuple[int, int]]
    active: frozenset[int]

    def __post_init__(self):
        if self.kind not in ("directed", "undirected", "basic"):
            raise StructureError(f"unknown graph kind {self.kind!r}")
        for u, v in self.adjacency:
            if u not in self.active or v not in self.active:
                raise StructureError("edge between inactive vertices")
        for v in self.active:
            if not 0 <= v < self.vertex_count:
                raise StructureError("active vertex out of range")
        if self.kind in ("undirected", "basic"):
            for u, v in self.adjacency:
                if (v, u) not in self.adjacency:
                    raise StructureError("undirected graph with asymmetric pair")
        if self.kind == "basic":
            for u, v in self.adjacency:
                if u == v:
                    raise StructureError("basic graph with a self-loop")

    # -- basic queries ------------------------------------------------

    @cached_property
    def _nbrs(self) -> dict[int, frozenset[int]]:
        nbrs: dict[int, set[int]] = {v: set() for v in self.active}
        for u, v in self.adjacency:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(s - {v}) for v, s in nbrs.items()}

    @property
    def n(self) -> int:
        return len(self.active)

    def vertices(self) -> list[int]:
        return sorted(self.active)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.adjacency

    def neighbors(self, v: int) -> frozenset[int]:
        """Neighbours other than v itself (loops do not count)."""
        return self._nbrs[v]

    def degree(self, v: int) -> int:
        return len(self._nbrs[v])

    def is_isolated(self, v: int) -> bool:
        return not self._nbrs[v]

    def is_universal(self, v: int) -> bool:
        # A lone vertex counts as isolated, never as universal.
        return self.n >= 2 and len(self._nbrs[v]) == self.n - 1

    def isolated_vertices(self) -> frozenset[int]:
        return frozenset(v for v in self.active if self.is_isolated(v))

    def universal_vertices(self) -> frozenset[int]:
        return frozenset(v for v in self.active if self.is_universal(v))

    def is_empty_graph(self) -> bool:
        return not self.adjacency

    def is_clique(self) -> bool:
        return all(len(self._nbrs[v]) == self.n - 1 for v in self.active)

    # -- derived graphs -----------------------------------------------

    def deactivate(self, vertices: Iterable[int]) -> "Graph":
        """Remove vertices by clearing their active flags; indices stay stable."""
        gone = frozenset(vertices)
        keep = self.active - gone
        adj = frozenset((u, v) for (u, v) in self.adjacency
                        if u in keep and v in keep)
        return Graph(self.kind, self.vertex_count, adj, keep)

    def restrict(self, vertices: Iterable[int]) -> "Graph":
        keep = frozenset(vertices) & self.active
        return self.deactivate(self.active - keep)


def basic_graph(vertex_count: int, edges: Iterable[tuple[int, int]],
                active: Optional[Iterable[int]] = None) -> Graph:
    """Convenience constructor: basic graph from undirected edge pairs."""
    act = frozenset(active) if active is not None else frozenset(range(vertex_count))
    adj = set()
    for u, v in edges:
        if u == v:
            raise StructureError("basic graph with a self-loop")
        adj.add((u, v))
        adj.add((v, u))
    return Graph("basic", vertex_count, frozenset(adj), act)


# ----------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------

def load_structure(text: str) -> Structure:
    """Parse the line-based structure/graph file format.

    Two forms are accepted::

        graph {basic|undirected|digraph} <n>
        edge <u> <v>
        ...

        structure
        universe <n>
        relation <name> <arity>
        <e1> <e2> ... (tuple lines)
        ...
        end
    """
    lines = text.splitlines()
    tokens_per_line = []
    for i, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens_per_line.append((i, line.split()))
    if not tokens_per_line:
        raise StructureParseError("empty input", 1)

    lineno, head = tokens_per_line[0]
    if head[0] == "graph":
        return _parse_graph_form(lineno, head, tokens_per_line[1:])
    if head[0] == "structure":
        if len(head) != 1:
            raise StructureParseError("expected bare 'structure' header", lineno)
        return _parse_structure_form(tokens_per_line[1:])
    raise StructureParseError(f"expected 'graph' or 'structure', got {head[0]!r}", lineno)


def _parse_graph_form(lineno, head, rest) -> Structure:
    if len(head) != 3:
        raise StructureParseError("expected 'graph <kind> <n>'", lineno)
    kind = head[1]
    if kind not in ("basic", "undirected", "digraph"):
        raise StructureParseError(f"unknown graph kind {kind!r}", lineno)
    try:
        n = int(head[2])
    except ValueError:
        raise StructureParseError("vertex count must be an integer", lineno) from None
    if n < 0:
        raise StructureParseError("vertex count must be non-negative", lineno)
    pairs = set()
    for i, toks in rest:
        if toks[0] != "edge" or len(toks) != 3:
            raise StructureParseError("expected 'edge <u> <v>'", i)
        try:
            u, v = int(toks[1]), int(toks[2])
        except ValueError:
            raise StructureParseError("edge endpoints must be integers", i) from None
        if not (0 <= u < n and 0 <= v < n):
            raise StructureParseError("edge endpoint out of range", i)
        if kind == "basic" and u == v:
            raise StructureParseError("self-loop in a basic graph", i)
        pairs.add((u, v))
        if kind in ("basic", "undirected"):
            pairs.add((v, u))
    return Structure(n, (("adj", 2),), {"adj": frozenset(pairs)})


def _parse_structure_form(rest) -> Structure:
    n = None
    sig: list[tuple[str, int]] = []
    rels: dict[str, set[tuple[int, ...]]] = {}
    current: Optional[str] = None
    ended = False
    for i, toks in rest:
        if ended:
            raise StructureParseError("content after 'end'", i)
        if toks[0] == "universe":
            if n is not None or len(toks) != 2:
                raise StructureParseError("expected single 'universe <n>'", i)
            try:
                n = int(toks[1])
            except ValueError:
                raise StructureParseError("universe size must be an integer", i) from None
        elif toks[0] == "relation":
            if n is None:
                raise StructureParseError("'relation' before 'universe'", i)
            if len(toks) != 3:
                raise StructureParseError("expected 'relation <name> <arity>'", i)
            name = toks[1]
            if name in rels:
                raise StructureParseError(f"duplicate relation {name!r}", i)
            try:
                arity = int(toks[2])
            except ValueError:
                raise StructureParseError("arity must be an integer", i) from None
            if arity < 1:
                raise StructureParseError("arity must be positive", i)
            sig.append((name, arity))
            rels[name] = set()
            current = name
        elif toks[0] == "end":
            ended = True
        else:
            if current is None:
                raise StructureParseError("tuple line outside a relation block", i)
            try:
                tup = tuple(int(t) for t in toks)
            except ValueError:
                raise StructureParseError("tuple entries must be integers", i) from None
            arity = dict(sig)[current]
            if len(tup) != arity:
                raise StructureParseError(
                    f"arity mismatch: relation {current!r} expects {arity} entries", i)
            for e in tup:
                if not 0 <= e < n:
                    raise StructureParseError(f"element {e} out of range", i)
            rels[current].add(tup)
    if n is None:
        raise StructureParseError("missing 'universe' line", 1)
    if not ended:
        raise StructureParseError("missing 'end' line", 1)
    return Structure(n, tuple(sig), {k: frozenset(v) for k, v in rels.items()})


def graph_view(s: Structure) -> Graph:
    """Classify a single-binary-relation structure as directed/undirected/basic."""
    if len(s.signature) != 1 or s.signature[0][1] != 2:
        raise StructureError("graph view requires exactly one binary relation")
    name = s.signature[0][0]
    pairs = s.relations[name]
    symmetric = all((v, u) in pairs for (u, v) in pairs)
    loop_free = all(u != v for (u, v) in pairs)
    if symmetric and loop_free:
        kind = "basic"
    elif symmetric:
        kind = "undirected"
    else:
        kind = "directed"
    return Graph(kind, s.universe_size, frozenset(pairs),
                 frozenset(range(s.universe_size)))


def load_graph(text: str) -> Graph:
    return graph_view(load_structure(text))


def graph_to_structure(g: Graph) -> Structure:
    """Re-encode a graph as an `adj` structure over its active vertices.

    Active vertices are compacted to 0..n-1 in index order.
    """
    order = {v: i for i, v in enumerate(g.vertices())}
    pairs = frozenset((order[u], order[v]) for (u, v) in g.adjacency)
    return Structure(len(order), (("adj", 2),), {"adj": pairs})


def dump_graph(g: Graph) -> str:
    """Write a graph in the `graph` file form (active vertices compacted)."""
    kind = {"directed": "digraph", "undirected": "undirected", "basic": "basic"}[g.kind]
    order = {v: i for i, v in enumerate(g.vertices())}
    lines = [f"graph {kind} {len(order)}"]
    seen = set()
    for u, v in sorted(g.adjacency):
        if kind != "digraph":
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
        lines.append(f"edge {order[u]} {order[v]}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Graph algorithms used by the solvers
# ----------------------------------------------------------------------

def complement_basic(g: Graph) -> Graph:
    """Exchange edges and non-edges over two-element pairs; never adds loops."""
    if g.kind != "basic":
        raise StructureError("complement is defined for basic graphs only")
    verts = g.vertices()
    adj = set()
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            if not g.has_edge(u, v):
                adj.add((u, v))
                adj.add((v, u))
    return Graph("basic", g.vertex_count, frozenset(adj), g.active)


def _are_twins(g: Graph, u: int, v: int) -> bool:
    return g.neighbors(u) - {v} == g.neighbors(v) - {u}


def twin_quotient(g: Graph) -> tuple[Graph, dict[int, int]]:
    """Collapse every twin class to its smallest-index member.

    Returns the induced quotient graph and the vertex -> representative map.
    """
    if g.kind != "basic":
        raise StructureError("twin quotient is defined for basic graphs only")
    reps: list[int] = []
    mapping: dict[int, int] = {}
    for v in g.vertices():
        for r in reps:
            if _are_twins(g, r, v):
                mapping[v] = r
                break
        else:
            reps.append(v)
            mapping[v] = v
    return g.restrict(reps), mapping


@dataclass(frozen=True)
class Peeling:
    """Alternating removal stages (I0, U1, I1, U2, ...), each non-empty."""

    stages: tuple[frozenset[int], ...]

    def isolated_stages(self) -> tuple[frozenset[int], ...]:
        return self.stages[0::2]

    def removed(self) -> frozenset[int]:
        out: set[int] = set()
        for s in self.stages:
            out |= s
        return frozenset(out)


def peel_naive(g: Graph) -> Peeling:
    """Maximal peeling by literal alternating removal.

    Requires a basic graph with no universal vertices; the residual after
    applying the full peeling has neither isolated nor universal vertices.
    """
    if g.kind != "basic":
        raise StructureError("peeling is defined for basic graphs only")
    if g.universal_vertices():
        raise StructureError("peeling requires a graph without universal vertices")
    stages: list[frozenset[int]] = []
    cur = g
    while True:
        iso = cur.isolated_vertices()
        if not iso:
            break
        stages.append(iso)
        cur = cur.deactivate(iso)
        uni = cur.universal_vertices()
        if not uni:
            break
        stages.append(uni)
        cur = cur.deactivate(uni)
    return Peeling(tuple(stages))


def apply_peeling(g: Graph, peeling: Peeling) -> Graph:
    return g.deactivate(peeling.removed())


def peel_by_degrees(q: Graph, l: int) -> Optional[tuple[frozenset[int], ...]]:
    """Identify the first 2l+1 peeling stages of a twin quotient by degrees.

    Returns ({i0},{u1},...,{il}) when the four structural tests hold for
    this l, and None otherwise.  When present the result equals the first
    2l+1 entries of peel_naive(q).
    """
    if q.kind != "basic":
        raise StructureError("peel_by_degrees is defined for basic graphs only")
    if l < 0:
        return None
    verts = q.vertices()
    by_degree: dict[int, list[int]] = {}
    for v in verts:
        by_degree.setdefault(q.degree(v), []).append(v)

    # Test 1: exactly one vertex of degree j for each j <= l.
    i_seq: list[int] = []
    for j in range(l + 1):
        if len(by_degree.get(j, [])) != 1:
            return None
        i_seq.append(by_degree[j][0])
    iset = set(i_seq)
    if any(q.degree(v) < l for v in verts if v not in iset):
        return None

    # Test 2: exactly one vertex adjacent to i_j but not i_{j-1}.
    u_seq: list[int] = []
    for j in range(1, l + 1):
        cands = [v for v in verts
                 if q.has_edge(v, i_seq[j]) and not q.has_edge(v, i_seq[j - 1])]
        if len(cands) != 1:
            return None
        u_seq.append(cands[0])

    # Test 3: i_j adjacent exactly to u_1..u_j.
    for j in range(l + 1):
        if q.neighbors(i_seq[j]) != frozenset(u_seq[:j]):
            return None

    # Test 4: u_j adjacent exactly to everything except i_0..i_{j-1} (and itself).
    all_v = frozenset(verts)
    for j in range(1, l + 1):
        expect = all_v - frozenset(i_seq[:j]) - {u_seq[j - 1]}
        if q.neighbors(u_seq[j - 1]) != expect:
            return None

    out: list[frozenset[int]] = [frozenset({i_seq[0]})]
    for j in range(1, l + 1):
        out.append(frozenset({u_seq[j - 1]}))
        out.append(frozenset({i_seq[j]}))
    return tuple(out)


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Components of the active subgraph, ordered by smallest member."""
    seen: set[int] = set()
    comps = []
    for v in g.vertices():
        if v in seen:
            continue
        comp = {v}
        queue = [v]
        while queue:
            x = queue.pop()
            for y in g.neighbors(x):
                if y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def bfs_spanning_tree(g: Graph, component: frozenset[int]) -> dict[int, Optional[int]]:
    """BFS spanning tree from the smallest vertex; maps vertex -> parent."""
    root = min(component)
    parent: dict[int, Optional[int]] = {root: None}
    queue = [root]
    while queue:
        nxt = []
        for x in queue:
            for y in sorted(g.neighbors(x)):
                if y not in parent:
                    parent[y] = x
                    nxt.append(y)
        queue = nxt
    return parent


def proper_leaf_count(g: Graph, component: frozenset[int]) -> int:
    """Leaves of the BFS spanning tree minus one designated root leaf."""
    if len(component) == 1:
        return 0
    parent = bfs_spanning_tree(g, component)
    children: dict[int, int] = {v: 0 for v in component}
    for v, p in parent.items():
        if p is not None:
            children[p] += 1
    leaves = [v for v in component if children[v] == 0]
    return max(0, len(leaves) - 1)


def greedy_matching(g: Graph) -> list[tuple[int, int]]:
    """Greedy maximal matching, edges scanned in sorted order."""
    used: set[int] = set()
    out = []
    for u, v in sorted(g.adjacency):
        if u < v and u not in used and v not in used:
            out.append((u, v))
            used.add(u)
            used.add(v)
    return out
