"""Weighted CNF instances, grounding of e*a* formulas, and WSAT solvers.

Grounding maps a prenex formula with pattern in e*a* over a concrete
structure to one weighted CNF per assignment of the existential prefix
("disjuncts"); the whole instance accepts iff some disjunct accepts, and
per disjunct the satisfying assignments correspond weight-for-weight to
the sets making the universal part true.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .logic import (MODE_EQ, MODE_GE, MODE_LE, MODES, Formula, Member,
                    _eval_node, word_in_estar_astar)
from .structures import Structure


class WsatError(ValueError):
    pass


def _canon_clause(lits: Iterable[int]) -> frozenset[int]:
    c = frozenset(lits)
    if 0 in c:
        raise WsatError("0 is not a valid literal")
    return c


def _is_tautology(c: frozenset[int]) -> bool:
    return any(-l in c for l in c)


@dataclass(frozen=True)
class WcnfInstance:
    """CNF over set-membership variables 1..num_vars with a weight budget."""

    num_vars: int
    clauses: tuple[frozenset[int], ...]
    d: int
    k: int
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise WsatError(f"unknown mode {self.mode!r}")
        for c in self.clauses:
            if len(c) > self.d:
                raise WsatError(f"clause {sorted(c)} exceeds declared width {self.d}")
            for l in c:
                if not 1 <= abs(l) <= self.num_vars:
                    raise WsatError(f"literal {l} out of range")

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)


def make_wcnf(num_vars: int, clauses: Iterable[Iterable[int]], k: int,
              mode: str, d: Optional[int] = None) -> WcnfInstance:
    """Normalise clauses (dedupe literals/clauses, drop tautologies)."""
    seen = set()
    out = []
    for raw in clauses:
        c = _canon_clause(raw)
        if _is_tautology(c) or c in seen:
            continue
        seen.add(c)
        out.append(c)
    width = max((len(c) for c in out), default=0)
    return WcnfInstance(num_vars, tuple(out), d if d is not None else width, k, mode)


@dataclass(frozen=True)
class GroundedInstance:
    """One WCNF per existential-prefix assignment; accept iff any accepts."""

    disjuncts: tuple[WcnfInstance, ...]
    num_vars: int
    k: int
    mode: str

    def __post_init__(self):
        for w in self.disjuncts:
            if (w.num_vars, w.k, w.mode) != (self.num_vars, self.k, self.mode):
                raise WsatError("disjuncts must share variables, budget, and mode")


# ----------------------------------------------------------------------
# Grounding
# ----------------------------------------------------------------------

def _collect_rel_atoms(f: Formula):
    from .logic import matrix_atoms, Rel
    return [a for a in matrix_atoms(f.matrix) if isinstance(a, Rel)]


def check_signature(f: Formula, s: Structure) -> None:
    arities = dict(s.signature)
    for atom in _collect_rel_atoms(f):
        if atom.name not in arities:
            raise WsatError(f"formula uses relation {atom.name!r} "
                            f"missing from the structure")
        if arities[atom.name] != len(atom.args):
            raise WsatError(f"relation {atom.name!r} arity mismatch")


def _membership_elements(f: Formula, assignment: dict[str, int]) -> list[int]:
    from .logic import matrix_atoms
    elems = {assignment[a.term]
             for a in matrix_atoms(f.matrix) if isinstance(a, Member)}
    return sorted(elems)


def _truth_table(f: Formula, s: Structure, assignment: dict[str, int],
                 elems: Sequence[int]) -> list[bool]:
    table = []
    for bits in range(1 << len(elems)):
        sv = {e for i, e in enumerate(elems) if bits >> i & 1}
        table.append(_eval_node(f.matrix, s, assignment, sv))
    return table


def _minimal_cnf(elems: Sequence[int], table: list[bool]) -> list[frozenset[int]]:
    """CNF for the Boolean function given by `table`, via prime implicates.

    Literals are global membership literals +-(element+1).
    """
    m = len(elems)
    if all(table):
        return []
    if not any(table):
        return [frozenset()]
    true_rows = [r for r in range(1 << m) if table[r]]
    false_rows = [r for r in range(1 << m) if not table[r]]

    def clause_satisfied(template, row) -> bool:
        # template: tuple over atoms of {1 (positive), -1 (negative), 0 (absent)}
        for i, t in enumerate(template):
            if t == 1 and row >> i & 1:
                return True
            if t == -1 and not row >> i & 1:
                return True
        return False

    implicates = []
    for template in itertools.product((0, 1, -1), repeat=m):
        if all(t == 0 for t in template):
            continue
        if all(clause_satisfied(template, r) for r in true_rows):
            implicates.append(template)

    def is_sub(a, b) -> bool:
        return a != b and all(x == 0 or x == y for x, y in zip(a, b))

    primes = [t for t in implicates
              if not any(is_sub(o, t) for o in implicates)]
    primes.sort(key=lambda t: (sum(1 for x in t if x), t))

    chosen: list[frozenset[int]] = []
    uncovered = set(false_rows)
    for t in primes:
        if not uncovered:
            break
        blocked = {r for r in uncovered if not clause_satisfied(t, r)}
        if blocked:
            uncovered -= blocked
            chosen.append(frozenset(
                (e + 1) if x == 1 else -(e + 1)
                for e, x in zip(elems, t) if x))
    if uncovered:
        raise WsatError("internal error: prime implicates failed to cover")
    return chosen


def ground_formula(f: Formula, s: Structure, k: int) -> GroundedInstance:
    """Ground a formula with pattern in e*a* over the structure.

    For each assignment of the existential prefix variables, every tuple
    of universal-variable values contributes the CNF of the residual
    Boolean function of the remaining membership atoms; satisfied ground
    clauses are dropped.
    """
    if not word_in_estar_astar(f.word):
        raise WsatError(f"pattern {f.word!r} outside e*a*")
    check_signature(f, s)
    n = s.universe_size
    evars = [v for q, v in f.prefix if q == "exists"]
    avars = [v for q, v in f.prefix if q == "forall"]

    disjuncts = []
    for alpha in itertools.product(range(n), repeat=len(evars)):
        assignment = dict(zip(evars, alpha))
        clauses: list[frozenset[int]] = []
        for tup in itertools.product(range(n), repeat=len(avars)):
            assignment.update(zip(avars, tup))
            elems = _membership_elements(f, assignment)
            table = _truth_table(f, s, assignment, elems)
            clauses.extend(_minimal_cnf(elems, table))
        disjuncts.append(make_wcnf(n, clauses, k, f.mode))
    return GroundedInstance(tuple(disjuncts), n, k, f.mode)


# ----------------------------------------------------------------------
# Solvers
# ----------------------------------------------------------------------

def solve_1wsat(w: WcnfInstance) -> bool:
    """Decide a unit-clause instance by counting forced and free variables."""
    pos: set[int] = set()
    neg: set[int] = set()
    for c in w.clauses:
        if len(c) > 1:
            raise WsatError("solve_1wsat requires clause width <= 1")
        if not c:
            return False
        lit = next(iter(c))
        (pos if lit > 0 else neg).add(abs(lit))
    if pos & neg:
        return False
    p, q = len(pos), len(neg)
    free = w.num_vars - p - q
    if w.mode == MODE_EQ:
        return p <= w.k <= p + free
    if w.mode == MODE_LE:
        return p <= w.k
    return p + free >= w.k


def _reduce_set_true(clauses: tuple[frozenset[int], ...],
                     var: int) -> tuple[frozenset[int], ...]:
    out = []
    seen = set()
    for c in clauses:
        if var in c:
            continue
        if -var in c:
            c = c - {-var}
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


def solve_wsat_le_searchtree(w: WcnfInstance,
                             stats: Optional[dict] = None) -> bool:
    """Bounded search tree for mode <=.

    Level i holds formulas obtained from the input by setting i variables
    true; accept as soon as some formula is satisfied by the all-0
    assignment, reject after level k+1.
    """
    if w.mode != MODE_LE:
        raise WsatError("search tree solver requires mode <=")
    frontier_sizes = []
    captured = [] if stats is not None and stats.get("capture_levels") else None
    level: dict[frozenset[frozenset[int]], tuple[frozenset[int], ...]]
    level = {frozenset(w.clauses): w.clauses}
    accepted = False
    for i in range(w.k + 1):
        frontier_sizes.append(len(level))
        if captured is not None:
            captured.append(list(level.values()))
        nxt: dict[frozenset[frozenset[int]], tuple[frozenset[int], ...]] = {}
        for rho in level.values():
            branch_clause = None
            for c in rho:
                if all(l > 0 for l in c):
                    branch_clause = c
                    break
            if branch_clause is None:
                accepted = True
                break
            if i == w.k:
                # members of the never-inspected last level all carry
                # weight k+1 already; no point materialising it
                continue
            for var in sorted(branch_clause):
                red = _reduce_set_true(rho, var)
                nxt.setdefault(frozenset(red), red)
        if accepted or i == w.k:
            break
        level = nxt
        if not level:
            break
    if stats is not None:
        stats["frontier_sizes"] = frontier_sizes
        stats["max_frontier"] = max(frontier_sizes, default=0)
        stats["nodes"] = sum(frontier_sizes)
        if captured is not None:
            stats["levels"] = captured
    return accepted


def exact_sat(clauses: Iterable[Iterable[int]],
              num_vars: Optional[int] = None) -> Optional[dict[int, bool]]:
    """Backtracking SAT with unit propagation; returns a model or None."""
    cls = [frozenset(c) for c in clauses]
    for c in cls:
        if any(-l in c for l in c):
            continue
    variables = {abs(l) for c in cls for l in c}
    if num_vars is not None:
        variables |= set(range(1, num_vars + 1))

    def propagate(cs, assign):
        cs = list(cs)
        changed = True
        while changed:
            changed = False
            new = []
            for c in cs:
                reduced = []
                sat = False
                for l in c:
                    v = assign.get(abs(l))
                    if v is None:
                        reduced.append(l)
                    elif (l > 0) == v:
                        sat = True
                        break
                if sat:
                    continue
                if not reduced:
                    return None, None
                if len(reduced) == 1:
                    lit = reduced[0]
                    assign[abs(lit)] = lit > 0
                    changed = True
                else:
                    new.append(frozenset(reduced))
            cs = new
        return cs, assign

    def search(cs, assign):
        cs, assign = propagate(cs, dict(assign))
        if cs is None:
            return None
        if not cs:
            return assign
        var = min(abs(l) for c in cs for l in c if abs(l) not in assign)
        for val in (True, False):
            trial = dict(assign)
            trial[var] = val
            result = search(cs, trial)
            if result is not None:
                return result
        return None

    model = search(cls, {})
    if model is None:
        return None
    for v in variables:
        model.setdefault(v, False)
    return model


# ----------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------

_MODE_TOKEN = {MODE_EQ: "=", MODE_LE: "<=", MODE_GE: ">="}
_TOKEN_MODE = {v: k for k, v in _MODE_TOKEN.items()}


def dump_wcnf(w: WcnfInstance) -> str:
    lines = [f"wcnf {w.num_vars} {_MODE_TOKEN[w.mode]} {w.k} {w.d}"]
    for c in w.clauses:
        lines.append(" ".join(str(l) for l in sorted(c, key=abs)))
    return "\n".join(lines) + "\n"


def load_wcnf(text: str) -> WcnfInstance:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("wcnf"):
        raise WsatError("expected 'wcnf <numvars> <mode> <k> <d>' header")
    head = lines[0].split()
    if len(head) != 5 or head[2] not in _TOKEN_MODE:
        raise WsatError("malformed wcnf header")
    num_vars, k, d = int(head[1]), int(head[3]), int(head[4])
    clauses = []
    for ln in lines[1:]:
        clauses.append([int(t) for t in ln.split()])
    return make_wcnf(num_vars, clauses, k, _TOKEN_MODE[head[2]], d)
