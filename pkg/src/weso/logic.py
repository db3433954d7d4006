"""Prenex weighted-ESO formulas: AST, parser, printer, pattern tools, evaluation.

A formula is a weighted monadic second-order head (exists=, exists<=,
exists>=) binding one set variable, a first-order prefix, and a
quantifier-free matrix over relation atoms, set membership, and equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .structures import Structure, StructureError

MODE_EQ = "eq"
MODE_LE = "le"
MODE_GE = "ge"
MODES = (MODE_EQ, MODE_LE, MODE_GE)

MODE_SYMBOL = {MODE_EQ: "exists=", MODE_LE: "exists<=", MODE_GE: "exists>="}


class FormulaError(ValueError):
    pass


class FormulaParseError(FormulaError):
    pass


# -- matrix nodes ------------------------------------------------------

@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Member:
    term: str


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    sub: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Implies:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Iff:
    left: "Node"
    right: "Node"


Node = Union[Rel, Member, Eq, Not, And, Or, Implies, Iff]


@dataclass(frozen=True)
class Formula:
    mode: str
    set_var: str
    prefix: tuple[tuple[str, str], ...]  # (quantifier, variable)
    matrix: Node

    def __post_init__(self):
        if self.mode not in MODES:
            raise FormulaError(f"unknown mode {self.mode!r}")
        for q, _ in self.prefix:
            if q not in ("forall", "exists"):
                raise FormulaError(f"unknown quantifier {q!r}")

    @property
    def word(self) -> str:
        return "".join("a" if q == "forall" else "e" for q, _ in self.prefix)


@dataclass(frozen=True)
class Pattern:
    mode: str
    word: str


def extract_pattern(f: Formula) -> Pattern:
    return Pattern(f.mode, f.word)


# -- pattern word helpers ----------------------------------------------

def is_subsequence(p: str, q: str) -> bool:
    """True iff p can be obtained from q by deleting letters."""
    it = iter(q)
    return all(c in it for c in p)


def word_le_estar_a(word: str) -> bool:
    """word is a subsequence of some e*a, i.e. word is in e* or e*a."""
    return re.fullmatch(r"e*a?", word) is not None


def word_in_estar_astar(word: str) -> bool:
    """word is a subsequence of some e*a*, i.e. word is itself in e*a*."""
    return re.fullmatch(r"e*a*", word) is not None


def word_le_ae(word: str) -> bool:
    return word in ("", "a", "e", "ae")


# -- parsing -----------------------------------------------------------

def _tokenize(text: str) -> list[tuple[str, str]]:
    spec = [
        ("HEAD", r"exists>=|exists<=|exists="),
        ("FORALL", r"forall(?![A-Za-z0-9_\-])"),
        ("EXISTS", r"exists(?![A-Za-z0-9_\-])"),
        ("NAME", r"[A-Za-z_][A-Za-z0-9_\-]*"),
        ("IFF", r"<->"),
        ("ARROW", r"->"),
        ("AMP", r"&"),
        ("PIPE", r"\|"),
        ("BANG", r"!"),
        ("EQ", r"="),
        ("DOT", r"\."),
        ("LPAREN", r"\("),
        ("RPAREN", r"\)"),
        ("COMMA", r","),
        ("WS", r"\s+"),
    ]
    master = re.compile("|".join(f"(?P<{n}>{p})" for n, p in spec))
    out = []
    pos = 0
    while pos < len(text):
        m = master.match(text, pos)
        if not m:
            raise FormulaParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.lastgroup != "WS":
            out.append((m.lastgroup, m.group()))
        pos = m.end()
    out.append(("EOF", ""))
    return out


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> tuple[str, str]:
        return self.toks[self.i]

    def take(self, kind: Optional[str] = None) -> tuple[str, str]:
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise FormulaParseError(f"expected {kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse_formula(self) -> Formula:
        head = self.take("HEAD")[1]
        mode = {"exists=": MODE_EQ, "exists<=": MODE_LE, "exists>=": MODE_GE}[head]
        set_var = self.take("NAME")[1]
        self.take("DOT")
        prefix: list[tuple[str, str]] = []
        while self.peek()[0] in ("FORALL", "EXISTS"):
            q = "forall" if self.take()[0] == "FORALL" else "exists"
            var = self.take("NAME")[1]
            if var == set_var or any(v == var for _, v in prefix):
                raise FormulaParseError(f"variable {var!r} bound twice")
            self.take("DOT")
            prefix.append((q, var))
        matrix = self.parse_iff()
        self.take("EOF")
        bound = {v for _, v in prefix}
        _check_matrix(matrix, set_var, bound)
        return Formula(mode, set_var, tuple(prefix), matrix)

    def parse_iff(self) -> Node:
        node = self.parse_implies()
        while self.peek()[0] == "IFF":
            self.take()
            node = Iff(node, self.parse_implies())
        return node

    def parse_implies(self) -> Node:
        node = self.parse_or()
        if self.peek()[0] == "ARROW":
            self.take()
            return Implies(node, self.parse_implies())
        return node

    def parse_or(self) -> Node:
        node = self.parse_and()
        while self.peek()[0] == "PIPE":
            self.take()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Node:
        node = self.parse_unary()
        while self.peek()[0] == "AMP":
            self.take()
            node = And(node, self.parse_unary())
        return node

    def parse_unary(self) -> Node:
        kind, val = self.peek()
        if kind == "BANG":
            self.take()
            return Not(self.parse_unary())
        if kind == "LPAREN":
            self.take()
            node = self.parse_iff()
            self.take("RPAREN")
            return node
        if kind in ("FORALL", "EXISTS", "HEAD"):
            raise FormulaParseError(
                "quantifier inside the matrix: input must be prenex")
        if kind == "NAME":
            name = self.take()[1]
            if self.peek()[0] == "LPAREN":
                self.take()
                args = [self.take("NAME")[1]]
                while self.peek()[0] == "COMMA":
                    self.take()
                    args.append(self.take("NAME")[1])
                self.take("RPAREN")
                return Rel(name, tuple(args))
            if self.peek()[0] == "EQ":
                self.take()
                other = self.take("NAME")[1]
                return Eq(name, other)
            raise FormulaParseError(
                f"bare name {name!r}: expected R(...), X(x) or x=y")
        raise FormulaParseError(f"unexpected token {val!r}")


def _check_matrix(node: Node, set_var: str, bound: set[str]) -> None:
    if isinstance(node, Rel):
        if node.name == set_var:
            if len(node.args) != 1:
                raise FormulaError(
                    f"set variable {set_var!r} used with arity {len(node.args)}")
            if node.args[0] not in bound:
                raise FormulaError(f"unbound variable {node.args[0]!r}")
            return
        for a in node.args:
            if a not in bound:
                raise FormulaError(f"unbound variable {a!r}")
    elif isinstance(node, Eq):
        for a in (node.left, node.right):
            if a not in bound:
                raise FormulaError(f"unbound variable {a!r}")
    elif isinstance(node, Not):
        _check_matrix(node.sub, set_var, bound)
    elif isinstance(node, (And, Or, Implies, Iff)):
        _check_matrix(node.left, set_var, bound)
        _check_matrix(node.right, set_var, bound)


def _resolve_members(node: Node, set_var: str) -> Node:
    """Rewrite Rel(set_var, (t,)) atoms into Member(t)."""
    if isinstance(node, Rel):
        if node.name == set_var:
            return Member(node.args[0])
        return node
    if isinstance(node, Not):
        return Not(_resolve_members(node.sub, set_var))
    if isinstance(node, And):
        return And(_resolve_members(node.left, set_var),
                   _resolve_members(node.right, set_var))
    if isinstance(node, Or):
        return Or(_resolve_members(node.left, set_var),
                  _resolve_members(node.right, set_var))
    if isinstance(node, Implies):
        return Implies(_resolve_members(node.left, set_var),
                       _resolve_members(node.right, set_var))
    if isinstance(node, Iff):
        return Iff(_resolve_members(node.left, set_var),
                   _resolve_members(node.right, set_var))
    return node


def parse_formula(text: str) -> Formula:
    f = _Parser(_tokenize(text)).parse_formula()
    return Formula(f.mode, f.set_var, f.prefix,
                   _resolve_members(f.matrix, f.set_var))


# -- printing ----------------------------------------------------------

def _format_node(node: Node, set_var: str) -> str:
    if isinstance(node, Rel):
        return f"{node.name}({', '.join(node.args)})"
    if isinstance(node, Member):
        return f"{set_var}({node.term})"
    if isinstance(node, Eq):
        return f"{node.left} = {node.right}"
    if isinstance(node, Not):
        return f"!{_format_node(node.sub, set_var)}" \
            if isinstance(node.sub, (Rel, Member, Not)) \
            else f"!({_format_node(node.sub, set_var)})"
    op = {And: "&", Or: "|", Implies: "->", Iff: "<->"}[type(node)]
    return (f"({_format_node(node.left, set_var)} {op} "
            f"{_format_node(node.right, set_var)})")


def format_formula(f: Formula) -> str:
    parts = [f"{MODE_SYMBOL[f.mode]} {f.set_var} ."]
    for q, v in f.prefix:
        parts.append(f"{q} {v} .")
    parts.append(_format_node(f.matrix, f.set_var))
    return " ".join(parts)


# -- evaluation --------------------------------------------------------

def eval_matrix(f: Formula, s: Structure, assignment: Mapping[str, int],
                set_value: Iterable[int]) -> bool:
    """Evaluate the quantifier-free matrix under a full assignment."""
    sv = set_value if isinstance(set_value, (set, frozenset)) else set(set_value)
    return _eval_node(f.matrix, s, assignment, sv)


def _eval_node(node: Node, s: Structure, a: Mapping[str, int],
               sv: set[int]) -> bool:
    if isinstance(node, Rel):
        try:
            tup = tuple(a[x] for x in node.args)
        except KeyError as e:
            raise FormulaError(f"missing assignment for variable {e.args[0]!r}") from None
        if node.name not in s.relations:
            raise StructureError(f"unknown relation {node.name!r}")
        return tup in s.relations[node.name]
    if isinstance(node, Member):
        try:
            return a[node.term] in sv
        except KeyError as e:
            raise FormulaError(f"missing assignment for variable {e.args[0]!r}") from None
    if isinstance(node, Eq):
        try:
            return a[node.left] == a[node.right]
        except KeyError as e:
            raise FormulaError(f"missing assignment for variable {e.args[0]!r}") from None
    if isinstance(node, Not):
        return not _eval_node(node.sub, s, a, sv)
    if isinstance(node, And):
        return _eval_node(node.left, s, a, sv) and _eval_node(node.right, s, a, sv)
    if isinstance(node, Or):
        return _eval_node(node.left, s, a, sv) or _eval_node(node.right, s, a, sv)
    if isinstance(node, Implies):
        return (not _eval_node(node.left, s, a, sv)) or _eval_node(node.right, s, a, sv)
    if isinstance(node, Iff):
        return _eval_node(node.left, s, a, sv) == _eval_node(node.right, s, a, sv)
    raise FormulaError(f"unknown node {node!r}")


def matrix_atoms(node: Node) -> set[Node]:
    """All atomic subformulas of a matrix."""
    if isinstance(node, (Rel, Member, Eq)):
        return {node}
    if isinstance(node, Not):
        return matrix_atoms(node.sub)
    return matrix_atoms(node.left) | matrix_atoms(node.right)
