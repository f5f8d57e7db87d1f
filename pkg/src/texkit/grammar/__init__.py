"""Grammar-based deep semantics: rule DSL, Earley parsing, normalization."""

from .earley import Leaf, ParseTree, accepts, earley_parse, parse_full, recognize
from .normalize import (
    KIND_QUANTITY,
    KIND_TIME_DELTA,
    KIND_TIME_POINT,
    ReferenceTime,
    SemanticValue,
    normalize,
    shift_months,
)
from .rules import Grammar, Rule, Symbol, compile_grammar, load_grammar

__all__ = [
    "Grammar", "KIND_QUANTITY", "KIND_TIME_DELTA", "KIND_TIME_POINT", "Leaf",
    "ParseTree", "ReferenceTime", "Rule", "SemanticValue", "Symbol", "accepts",
    "compile_grammar", "earley_parse", "load_grammar", "normalize",
    "parse_full", "recognize", "shift_months",
]
