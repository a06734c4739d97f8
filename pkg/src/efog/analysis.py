"""ECPO analysis and language comparison.

A set of rules has the ECPO property when one constant partial order over
sibling categories accounts for the permitted orderings in every rule.
"""

from __future__ import annotations

import graphlib
import itertools
from dataclasses import dataclass
from typing import FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from .grammar import Grammar, IDRule
from .oracle import GenerationConfig, generate_language
from .semantics import DerivationTree, Linearization, eval_ground, ground_all

__all__ = [
    "OrderingSet",
    "Ecpo",
    "NonEcpo",
    "UnsupportedRule",
    "permitted_orders",
    "grammar_ordering_sets",
    "candidate_pairs",
    "consistent_orders",
    "ecpo_check",
    "language_diff",
    "render_verdict",
]

Pair = Tuple[Hashable, Hashable]


class UnsupportedRule(ValueError):
    pass


@dataclass(frozen=True)
class OrderingSet:
    rule_id: Hashable
    daughters: Tuple[Hashable, ...]
    permitted: FrozenSet[Tuple[Hashable, ...]]

    def __post_init__(self):
        if not self.permitted:
            raise ValueError("rule %s permits no ordering" % (self.rule_id,))
        want = sorted(map(repr, self.daughters))
        for p in self.permitted:
            if sorted(map(repr, p)) != want:
                raise ValueError("%r is not a permutation of %r" % (p, self.daughters))


@dataclass(frozen=True)
class Ecpo:
    pairs: FrozenSet[Pair]


@dataclass(frozen=True)
class NonEcpo:
    rule_id: Optional[Hashable]
    permitted: FrozenSet[tuple] = frozenset()
    consistent: FrozenSet[tuple] = frozenset()
    cycle: Tuple[Hashable, ...] = ()

    @property
    def missing(self) -> FrozenSet[tuple]:
        """Permitted orders the pair set cannot produce."""
        return self.permitted - self.consistent

    @property
    def extra(self) -> FrozenSet[tuple]:
        """Orders the pair set allows but the rule does not."""
        return self.consistent - self.permitted


def permitted_orders(g: Grammar, rule: IDRule, rule_id: Hashable = None) -> OrderingSet:
    """Sibling permutations of an all-contiguous rule that satisfy every global formula.

    The rule is treated as a local tree of depth 1: its mother is the only
    node that ``first``/``last`` may refer to.
    """
    if not rule.all_contiguous:
        raise UnsupportedRule("rule %s has non-contiguous daughters" % rule)
    cats = tuple(d.category for d in rule.daughters)
    leaves = tuple(DerivationTree(c, -1, True, (), str(c)) for c in cats)
    tree = DerivationTree(rule.mother, -1, True, leaves)
    instances = ground_all(tree, g.lp_formulas)
    permitted = set()
    for perm in itertools.permutations(range(len(cats))):
        lin = Linearization(tree, (((), tuple((i,) for i in perm)),))
        if all(eval_ground(gi, lin) for gi in instances):
            permitted.add(tuple(cats[i] for i in perm))
    if rule_id is None:
        rule_id = str(rule)
    if not permitted:
        raise UnsupportedRule("rule %s admits no ordering under the LP formulas" % rule)
    return OrderingSet(rule_id, cats, frozenset(permitted))


def grammar_ordering_sets(g: Grammar) -> Tuple[List[OrderingSet], List[int]]:
    """Ordering sets for every all-contiguous ID rule, plus indices of skipped rules."""
    sets, skipped = [], []
    for i, rule in enumerate(g.id_rules):
        if rule.all_contiguous:
            sets.append(permitted_orders(g, rule, i))
        else:
            skipped.append(i)
    return sets, skipped


def _respects(order: Sequence, pairs: Iterable[Pair]) -> bool:
    for a, b in pairs:
        last_a = max((i for i, x in enumerate(order) if x == a), default=None)
        first_b = min((i for i, x in enumerate(order) if x == b), default=None)
        if last_a is not None and first_b is not None and last_a > first_b:
            return False
    return True


def consistent_orders(daughters: Sequence, pairs: Iterable[Pair]) -> FrozenSet[tuple]:
    """Distinct permutations of ``daughters`` that put every a before every b for (a, b) in pairs."""
    present = set(daughters)
    relevant = [(a, b) for a, b in pairs if a in present and b in present]
    return frozenset(p for p in set(itertools.permutations(daughters)) if _respects(p, relevant))


def candidate_pairs(sets: Sequence[OrderingSet]) -> FrozenSet[Pair]:
    """Ordered pairs (a, b) with a before b in every permitted order of every rule containing both."""
    pairs = set()
    broken = set()
    for os_ in sets:
        cats = list(dict.fromkeys(os_.daughters))
        for a, b in itertools.permutations(cats, 2):
            if all(_respects(p, [(a, b)]) for p in os_.permitted):
                pairs.add((a, b))
            else:
                broken.add((a, b))
    return frozenset(pairs - broken)


def _find_cycle(pairs: Iterable[Pair]) -> Tuple[Hashable, ...]:
    graph: dict = {}
    for a, b in pairs:
        graph.setdefault(b, set()).add(a)
    try:
        graphlib.TopologicalSorter(graph).prepare()
    except graphlib.CycleError as exc:
        return tuple(exc.args[1][:-1])
    return ()


def ecpo_check(sets: Sequence[OrderingSet]):
    """Return :class:`Ecpo` with the maximal candidate pair set, or a :class:`NonEcpo` witness."""
    if not sets:
        raise ValueError("no ordering sets")
    pairs = candidate_pairs(sets)
    for os_ in sets:
        consistent = consistent_orders(os_.daughters, pairs)
        if consistent != os_.permitted:
            return NonEcpo(os_.rule_id, os_.permitted, consistent)
    cycle = _find_cycle(pairs)
    if cycle:
        return NonEcpo(None, cycle=cycle)
    return Ecpo(pairs)


def language_diff(g1: Grammar, g2: Grammar, cfg: GenerationConfig = GenerationConfig()
                  ) -> Tuple[Set[tuple], Set[tuple]]:
    l1 = generate_language(g1, cfg)
    l2 = generate_language(g2, cfg)
    return l1 - l2, l2 - l1


def _fmt_order(order) -> str:
    return " ".join(str(c) for c in order)


def render_verdict(verdict, sets: Sequence[OrderingSet] = ()) -> str:
    lines = []
    for os_ in sets:
        lines.append("rule %s: %s" % (os_.rule_id, ", ".join(str(d) for d in os_.daughters)))
        for p in sorted(os_.permitted, key=_fmt_order):
            lines.append("  permitted: %s" % _fmt_order(p))
    if isinstance(verdict, Ecpo):
        lines.append("ECPO")
        for a, b in sorted(verdict.pairs, key=lambda p: (str(p[0]), str(p[1]))):
            lines.append("  %s < %s" % (a, b))
    elif verdict.cycle:
        lines.append("NOT ECPO: precedence pairs form a cycle")
        lines.append("  " + " < ".join(str(c) for c in verdict.cycle + verdict.cycle[:1]))
    else:
        lines.append("NOT ECPO: rule %s" % (verdict.rule_id,))
        for p in sorted(verdict.permitted, key=_fmt_order):
            lines.append("  permitted:  %s" % _fmt_order(p))
        for p in sorted(verdict.consistent, key=_fmt_order):
            lines.append("  consistent: %s" % _fmt_order(p))
    return "\n".join(lines)
