import itertools
import random

import pytest

from efog.analysis import (
    Ecpo,
    NonEcpo,
    OrderingSet,
    UnsupportedRule,
    candidate_pairs,
    consistent_orders,
    ecpo_check,
    grammar_ordering_sets,
    language_diff,
    permitted_orders,
    render_verdict,
)
from efog.fixtures import fixture_text
from efog.grammar import read_grammar
from efog.oracle import generate_language
from efog.terms import Compound


def cat(name):
    return Compound(name)


def oset(rule_id, *orders):
    orders = [tuple(o.split()) for o in orders]
    return OrderingSet(rule_id, orders[0], frozenset(orders))


def test_nonecpo_mirror_set():
    v = ecpo_check([oset(0, "b c d", "d c b")])
    assert isinstance(v, NonEcpo)
    assert v.rule_id == 0
    assert len(v.consistent) == 6 and len(v.permitted) == 2
    assert len(v.extra) == 4 and not v.missing


def test_ecpo_three_orders():
    v = ecpo_check([oset(0, "b d c", "d b c", "d c b")])
    assert isinstance(v, Ecpo)
    assert ("d", "c") in v.pairs
    assert v.pairs == {("d", "c")}


def test_unconstrained_rule_is_ecpo_with_no_pairs():
    v = ecpo_check([oset(0, *(" ".join(p) for p in itertools.permutations("bcd")))])
    assert v == Ecpo(frozenset())


def test_cycle_across_rules_is_not_ecpo():
    sets = [oset(0, "a b"), oset(1, "b c"), oset(2, "c a")]
    v = ecpo_check(sets)
    assert isinstance(v, NonEcpo) and v.rule_id is None
    assert set(v.cycle) == {"a", "b", "c"}
    pairs = candidate_pairs(sets)
    assert all((x, y) in pairs for x, y in zip(v.cycle, v.cycle[1:] + v.cycle[:1]))
    assert "cycle" in render_verdict(v, sets)


def test_contradicting_rules():
    v = ecpo_check([oset(0, "a b c"), oset(1, "b a")])
    assert isinstance(v, NonEcpo) and v.rule_id == 0


def test_ordering_set_validation():
    with pytest.raises(ValueError):
        OrderingSet(0, ("a", "b"), frozenset())
    with pytest.raises(ValueError):
        OrderingSet(0, ("a", "b"), frozenset({("a", "c")}))


def test_permitted_orders_local_rule():
    g = read_grammar("a ==> b, c, d.\nlp: d < c.")
    s = permitted_orders(g, g.id_rules[0])
    assert {" ".join(map(str, p)) for p in s.permitted} == {"b d c", "d b c", "d c b"}


def test_permitted_orders_bulgarian_rule_two(bulgarian):
    s = permitted_orders(bulgarian, bulgarian.id_rules[2])
    assert len(s.permitted) == 6


def test_permitted_orders_simple_precedence():
    g = read_grammar("s ==> np, vp.\nnp ==> [n].\nvp ==> [v].\nlp: np < vp.")
    s = permitted_orders(g, g.id_rules[0])
    assert s.permitted == {(cat("np"), cat("vp"))}


def test_discontinuous_rules_are_unsupported(latin):
    with pytest.raises(UnsupportedRule):
        permitted_orders(latin, latin.id_rules[0])
    sets, skipped = grammar_ordering_sets(latin)
    assert skipped == [0, 2] and len(sets) == 1


def test_fixture_verdicts(fixtures):
    assert isinstance(ecpo_check(grammar_ordering_sets(fixtures["nonecpo"])[0]), NonEcpo)
    v = ecpo_check(grammar_ordering_sets(fixtures["ecpo"])[0])
    assert v == Ecpo(frozenset({(cat("d"), cat("c"))}))


# brute-force oracle: search every acyclic pair set for one reproducing each rule

def _acyclic(pairs):
    succ = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    done, active = set(), set()

    def visit(v):
        if v in active:
            return False
        if v in done:
            return True
        active.add(v)
        ok = all(visit(w) for w in succ.get(v, ()))
        active.discard(v)
        done.add(v)
        return ok

    return all(visit(v) for v in list(succ))


def _brute_force_ecpo(sets):
    cats = sorted({c for s in sets for c in s.daughters})
    all_pairs = list(itertools.permutations(cats, 2))
    tables = []
    for s in sets:
        perms = list(itertools.permutations(s.daughters))
        full = (1 << len(perms)) - 1
        want = sum(1 << i for i, p in enumerate(perms) if p in s.permitted)
        violated = []
        for a, b in all_pairs:
            m = 0
            if a in s.daughters and b in s.daughters:
                for i, p in enumerate(perms):
                    if p.index(a) > p.index(b):
                        m |= 1 << i
            violated.append(m)
        tables.append((full, want, violated))
    for k in range(1 << len(all_pairs)):
        chosen = [i for i in range(len(all_pairs)) if k >> i & 1]
        ok = True
        for full, want, violated in tables:
            allowed = full
            for i in chosen:
                allowed &= ~violated[i]
            if allowed != want:
                ok = False
                break
        if ok and _acyclic([all_pairs[i] for i in chosen]):
            return True
    return False


def _random_sets(rng):
    cats = "abcd"[: rng.randint(2, 4)]
    sets = []
    truth = [p for p in itertools.permutations(cats, 2) if rng.random() < 0.3]
    for rid in range(rng.randint(1, 3)):
        ds = tuple(rng.sample(cats, rng.randint(2, len(cats))))
        perms = list(itertools.permutations(ds))
        if rng.random() < 0.5:
            permitted = consistent_orders(ds, truth)
        else:
            permitted = frozenset(rng.sample(perms, rng.randint(1, len(perms))))
        if permitted:
            sets.append(OrderingSet(rid, ds, permitted))
    return sets


def test_brute_force_agreement():
    rng = random.Random(7)
    seen = {True: 0, False: 0}
    for _ in range(400):
        sets = _random_sets(rng)
        if not sets:
            continue
        expected = _brute_force_ecpo(sets)
        assert isinstance(ecpo_check(sets), Ecpo) is expected, sets
        seen[expected] += 1
    assert seen[True] > 50 and seen[False] > 50


def test_soundness():
    rng = random.Random(11)
    for _ in range(400):
        sets = _random_sets(rng)
        if not sets:
            continue
        v = ecpo_check(sets)
        if isinstance(v, Ecpo):
            assert _acyclic(v.pairs)
            for s in sets:
                got = {p for p in itertools.permutations(s.daughters)
                       if all(p.index(a) < p.index(b) for a, b in v.pairs
                              if a in p and b in p)}
                assert got == s.permitted


def test_candidate_pairs_are_maximal():
    sets = [oset(0, "a b c", "a c b")]
    assert candidate_pairs(sets) == {("a", "b"), ("a", "c")}


def test_permitted_orders_match_generated_language(fixtures):
    # for flat grammars whose lexicon maps categories one-to-one onto words
    for name in ("nonecpo", "ecpo", "universal20"):
        g = fixtures[name]
        word = {r.category: r.terminal for r in g.lex_rules}
        (s,), _ = grammar_ordering_sets(g)
        assert {tuple(word[c] for c in p) for p in s.permitted} == generate_language(g)


def test_language_diff_identity(bulgarian):
    assert language_diff(bulgarian, bulgarian) == (set(), set())


def test_language_diff_without_lp(bulgarian):
    only1, only2 = language_diff(bulgarian, bulgarian.with_formulas([]))
    assert not only1
    assert ("se", "brasna", "vcera") in only2


def test_language_diff_without_discontinuity(latin):
    flat = read_grammar(fixture_text("latin").replace("#", ""))
    only1, only2 = language_diff(latin, flat)
    assert ("puella", "puerum", "bona", "parvum", "amat") in only1
    assert not only2
