"""Reference semantics by exhaustive enumeration.

Derivation trees are enumerated top-down to a depth bound, every
linearization of every tree is generated, and the LP formulas filter them.
Slow by design; it defines the language the chart parser must agree with.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Sequence, Set, Tuple

from .grammar import Grammar
from .semantics import DerivationTree, Linearization, eval_ground, ground_all, linearizations
from .terms import Subst, Term, fresh_suffix, rename, unify

__all__ = [
    "GenerationConfig",
    "CapExceeded",
    "enumerate_trees",
    "admissible_linearizations",
    "generate_language",
    "generate_with_trees",
    "oracle_recognize",
]


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GenerationConfig:
    depth_bound: int = 8
    max_sentences: int = 100_000

    def __post_init__(self):
        if self.depth_bound < 1:
            raise ValueError("depth_bound must be >= 1")
        if self.max_sentences < 1:
            raise ValueError("max_sentences must be >= 1")


def _rename_rule(head: Term, body: Sequence[Term]):
    mapping: dict = {}
    suffix = fresh_suffix()
    return rename(head, mapping, suffix), [rename(t, mapping, suffix) for t in body]


def _expand(g: Grammar, goal: Term, depth: int, s: Subst) -> Iterator[Tuple[DerivationTree, Subst]]:
    if depth < 1:
        return
    for i, rule in enumerate(g.id_rules):
        head, body = _rename_rule(rule.mother, [d.category for d in rule.daughters])
        s1 = unify(goal, head, s)
        if s1 is None:
            continue
        flags = [d.contiguous for d in rule.daughters]
        for kids, s2 in _expand_seq(g, body, flags, depth - 1, s1):
            yield DerivationTree(head, i, True, kids), s2
    for i, rule in enumerate(g.lex_rules):
        s1 = unify(goal, rule.category, s)
        if s1 is not None:
            yield DerivationTree(rule.category, i, True, (), rule.terminal), s1


def _expand_seq(g, goals, flags, depth, s) -> Iterator[Tuple[tuple, Subst]]:
    if not goals:
        yield (), s
        return
    for first, s1 in _expand(g, goals[0], depth, s):
        if not flags[0]:
            first = DerivationTree(first.category, first.rule, False, first.children, first.terminal)
        for rest, s2 in _expand_seq(g, goals[1:], flags[1:], depth, s1):
            yield (first,) + rest, s2


def enumerate_trees(g: Grammar, cfg: GenerationConfig = GenerationConfig()) -> List[DerivationTree]:
    """All derivation trees rooted in the start symbol with height <= depth_bound.

    Order is deterministic: rule-declaration order, leftmost expansion first.
    """
    return list(_trees(g, cfg.depth_bound))


@lru_cache(maxsize=64)
def _trees(g: Grammar, depth_bound: int) -> Tuple[DerivationTree, ...]:
    out, seen = [], set()
    for tree, s in _expand(g, g.start, depth_bound, {}):
        tree = tree.substitute(s)
        if tree not in seen:
            seen.add(tree)
            out.append(tree)
    return tuple(out)


def admissible_linearizations(g: Grammar, tree: DerivationTree) -> Iterator[Linearization]:
    instances = ground_all(tree, g.lp_formulas)
    for lin in linearizations(tree):
        if all(eval_ground(gi, lin) for gi in instances):
            yield lin


def generate_with_trees(g: Grammar, cfg: GenerationConfig = GenerationConfig()
                        ) -> Dict[Tuple[str, ...], List[Tuple[DerivationTree, Linearization]]]:
    """Map each generated sentence to its (tree, linearization) witnesses."""
    out: Dict[Tuple[str, ...], list] = {}
    for tree in _trees(g, cfg.depth_bound):
        for lin in admissible_linearizations(g, tree):
            sent = lin.tokens
            if sent not in out and len(out) >= cfg.max_sentences:
                raise CapExceeded("more than %d sentences" % cfg.max_sentences)
            out.setdefault(sent, []).append((tree, lin))
    return out


def generate_language(g: Grammar, cfg: GenerationConfig = GenerationConfig()) -> Set[Tuple[str, ...]]:
    """The set of token sequences of all admissible linearizations of all trees."""
    return set(generate_with_trees(g, cfg))


@lru_cache(maxsize=64)
def _trees_by_multiset(g: Grammar, depth_bound: int) -> Dict[FrozenSet, Tuple[DerivationTree, ...]]:
    index: Dict[FrozenSet, list] = {}
    for tree in _trees(g, depth_bound):
        key = frozenset(Counter(tree.terminals()).items())
        index.setdefault(key, []).append(tree)
    return {k: tuple(v) for k, v in index.items()}


@lru_cache(maxsize=4096)
def _sentences_for(g: Grammar, depth_bound: int, key: FrozenSet):
    out: Dict[Tuple[str, ...], list] = {}
    for tree in _trees_by_multiset(g, depth_bound).get(key, ()):
        for lin in admissible_linearizations(g, tree):
            out.setdefault(lin.tokens, []).append((tree, lin))
    return out


def oracle_recognize(g: Grammar, tokens: Sequence[str], cfg: GenerationConfig = GenerationConfig()
                     ) -> Tuple[bool, List[Tuple[DerivationTree, Linearization]]]:
    """Ground-truth membership: ``(accepted, witnesses)``.

    Only trees whose leaf multiset equals the token multiset are linearized;
    this gives the same answer as membership in :func:`generate_language`.
    """
    tokens = tuple(tokens)
    lexicon = set(g.lexicon)
    if not tokens or any(t not in lexicon for t in tokens):
        return False, []
    key = frozenset(Counter(tokens).items())
    witnesses = _sentences_for(g, cfg.depth_bound, key).get(tokens, [])
    return bool(witnesses), list(witnesses)
