"""Complexity classification and solver routing for quantifier patterns.

Maps (mode, pattern word, structure class) to the exact tractability
bucket and picks the constructive solver route for tractable rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .logic import (MODE_EQ, MODE_GE, MODE_LE, MODES, is_subsequence,
                    word_in_estar_astar, word_le_ae, word_le_estar_a)

BUCKET_AC0 = "InParaAC0"
BUCKET_AC0_UP = "InParaAC0UpNotInParaAC0"
BUCKET_HARD = "ContainsWHard"

NOTE_W1 = "W1"
NOTE_W2 = "W2"
NOTE_PARANP = "ParaNP"

STRUCTURE_CLASSES = ("arbitrary", "undirected", "basic")

ROUTE_ONE_WSAT = "OneWsat"
ROUTE_SEARCH_TREE = "SearchTree"
ROUTE_SATURATION = "SaturationBasic"
ROUTE_CSP = "CspBasic"
ROUTE_ORACLE = "OracleOnly"


@dataclass(frozen=True)
class ComplexityLabel:
    bucket: str
    hardness_note: Optional[str] = None

    def __post_init__(self):
        if (self.hardness_note is not None) != (self.bucket == BUCKET_HARD):
            raise ValueError("hardness note present iff the bucket is hard")


def _check_inputs(mode: str, word: str, structure_class: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if structure_class not in STRUCTURE_CLASSES:
        raise ValueError(f"unknown structure class {structure_class!r}")
    if any(c not in "ae" for c in word):
        raise ValueError(f"pattern word must be over {{a,e}}, got {word!r}")


def classify_pattern(mode: str, word: str, structure_class: str) -> ComplexityLabel:
    """Exact tractability bucket for the pattern class, per structure class.

    Arbitrary structures and undirected graphs coincide throughout; basic
    graphs differ exactly at the (ge, ae) and (le, aa) rows.
    """
    _check_inputs(mode, word, structure_class)
    basic = structure_class == "basic"

    if word_le_estar_a(word):
        return ComplexityLabel(BUCKET_AC0)

    if mode == MODE_EQ:
        note = NOTE_W2 if is_subsequence("ae", word) else NOTE_W1
        return ComplexityLabel(BUCKET_HARD, note)

    if mode == MODE_GE:
        if basic:
            if word_le_ae(word):
                return ComplexityLabel(BUCKET_AC0)
            if is_subsequence("eae", word) or is_subsequence("aee", word):
                return ComplexityLabel(BUCKET_HARD, NOTE_PARANP)
            return ComplexityLabel(BUCKET_HARD, NOTE_W1)
        if is_subsequence("ae", word):
            return ComplexityLabel(BUCKET_HARD, NOTE_PARANP)
        return ComplexityLabel(BUCKET_HARD, NOTE_W1)

    # mode == MODE_LE
    if basic and word == "aa":
        return ComplexityLabel(BUCKET_AC0)
    if word_in_estar_astar(word):
        # here aa is a subsequence of word (word not in e* or e*a)
        return ComplexityLabel(BUCKET_AC0_UP)
    return ComplexityLabel(BUCKET_HARD, NOTE_W2)


def route_for(mode: str, word: str, structure_class: str) -> str:
    """Solver route; never contradicts classify_pattern."""
    _check_inputs(mode, word, structure_class)
    if word_le_estar_a(word):
        return ROUTE_ONE_WSAT
    if mode == MODE_LE and word == "aa" and structure_class == "basic":
        return ROUTE_CSP
    if mode == MODE_GE and word == "ae" and structure_class == "basic":
        return ROUTE_SATURATION
    if mode == MODE_LE and word_in_estar_astar(word):
        return ROUTE_SEARCH_TREE
    return ROUTE_ORACLE
