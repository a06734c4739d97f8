"""Reversible ID/LP grammars with logical word-order constraints and non-contiguous constituents."""

from .grammar import Grammar, GrammarError, GrammarSyntaxError, load_grammar, read_grammar, serialize, validate_grammar
from .oracle import GenerationConfig, enumerate_trees, generate_language, oracle_recognize
from .chart import ParseForest, UnknownToken, parse, recognize
from .terms import Compound, Var, unify

__version__ = "0.1.0"

__all__ = [
    "Grammar", "GrammarError", "GrammarSyntaxError", "load_grammar", "read_grammar",
    "serialize", "validate_grammar",
    "GenerationConfig", "enumerate_trees", "generate_language", "oracle_recognize",
    "ParseForest", "UnknownToken", "parse", "recognize",
    "Compound", "Var", "unify",
]
