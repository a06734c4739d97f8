"""Random grammars and small independent oracles shared by the test modules."""

import itertools

from efog import formulas as F
from efog.grammar import DaughterSpec, Grammar, IDRule, LexRule
from efog.oracle import enumerate_trees
from efog.terms import Compound, Var

NONTERMINALS = ["s", "p", "q", "r"]
PRETERMINALS = ["a", "b", "c", "d"]
FEATURES = ["x", "y"]


def _cat(name, arg=None):
    return Compound(name, () if arg is None else (arg,))


def random_formula(rng, cats, nodes, depth):
    if depth == 0 or rng.random() < 0.4:
        if nodes and rng.random() < 0.25:
            cls = rng.choice([F.First, F.Last])
            return cls(rng.choice(cats), rng.choice(nodes))
        a, b = rng.sample(cats, 2)
        cls = rng.choice([F.Precede, F.ImmPrecede, F.Follow, F.ImmFollow, F.Adjacent])
        return cls(a, b)
    sub = lambda: random_formula(rng, cats, nodes, depth - 1)
    kind = rng.choice(["and", "or", "not", "if", "iff", "ite"])
    if kind == "and":
        return F.And(sub(), sub())
    if kind == "or":
        return F.Or(sub(), sub())
    if kind == "not":
        return F.Not(sub())
    if kind == "if":
        return F.If(sub(), sub())
    if kind == "iff":
        return F.Iff(sub(), sub())
    return F.IfThenElse(sub(), sub(), sub())


def random_grammar(rng, n_formulas=None, unbound_vars=False, recursive=False):
    """A small random grammar: <= 5 ID rules, <= 4 daughters, random '#' flags.

    Preterminal categories optionally carry a feature; ID rules may pass it
    through a shared variable.
    """
    lex = []
    tokens = ["t%d" % i for i in range(5)]
    featured = {p: rng.random() < 0.4 for p in PRETERMINALS}
    for p in PRETERMINALS:
        if featured[p]:
            for f in FEATURES:
                lex.append(LexRule(_cat(p, Compound(f)), rng.choice(tokens)))
        else:
            lex.append(LexRule(_cat(p), rng.choice(tokens)))
    rules = []
    n_rules = rng.randint(1, 5)
    for k in range(n_rules):
        mi = 0 if k == 0 else rng.randint(0, len(NONTERMINALS) - 1)
        mother_name = NONTERMINALS[mi]
        n_d = rng.randint(1, 4)
        ds = []
        use_var = rng.random() < 0.3
        for _ in range(n_d):
            later = NONTERMINALS[mi + (0 if recursive else 1):]
            if later and rng.random() < 0.35:
                name = rng.choice(later)
                arg = Var("X") if use_var and rng.random() < 0.5 else None
            else:
                name = rng.choice(PRETERMINALS)
                arg = None
                if featured[name]:
                    arg = Var("X") if use_var else Compound(rng.choice(FEATURES))
            ds.append(DaughterSpec(_cat(name, arg), rng.random() < 0.6))
        if mother_name == "s":
            mother = _cat("s")
        elif unbound_vars and rng.random() < 0.5:
            mother = _cat(mother_name, Var("Y"))
        elif use_var and any(Var("X") in d.category.args for d in ds):
            mother = _cat(mother_name, Var("X"))
        else:
            mother = _cat(mother_name)
        rules.append(IDRule(mother, tuple(ds)))
    # nonterminals referenced with an argument need an arity-1 mother to exist, and
    # vice versa; mismatches simply derive nothing, which is fine
    pats = [_cat(n) for n in NONTERMINALS + PRETERMINALS]
    pats += [_cat(n, Var("Z")) for n in NONTERMINALS + PRETERMINALS]
    pats += [_cat(p, Compound(f)) for p in PRETERMINALS for f in FEATURES]
    nodes = [_cat(n) for n in NONTERMINALS] + [_cat(n, Var("Z")) for n in NONTERMINALS[1:]]
    if n_formulas is None:
        n_formulas = rng.randint(0, 2)
    formulas = tuple(random_formula(rng, pats, nodes, rng.randint(0, 2)) for _ in range(n_formulas))
    return Grammar(tuple(rules), tuple(lex), formulas, _cat("s"))


def tame_random_grammar(rng, cfg, max_trees=200, max_leaves=7, **kw):
    """Draw random grammars until one derives something and stays small enough."""
    while True:
        g = random_grammar(rng, **kw)
        trees = enumerate_trees(g, cfg)
        if trees and len(trees) <= max_trees and all(t.size <= max_leaves for t in trees):
            return g, trees


def random_strings(rng, g, trees, n):
    out = []
    lexicon = list(g.lexicon)
    for i in range(n):
        if i % 2 == 0 and trees:
            words = rng.choice(trees).terminals()
            rng.shuffle(words)
            if rng.random() < 0.2:
                words[rng.randrange(len(words))] = rng.choice(lexicon)
            out.append(tuple(words))
        else:
            out.append(tuple(rng.choice(lexicon) for _ in range(rng.randint(1, 7))))
    return out


def permutation_closure_language(g, cat, depth):
    """Direct recursive language of an all-contiguous, LP-free, ground grammar:
    each rule's daughter yields are concatenated in every order."""
    if depth < 1:
        return set()
    out = set()
    for r in g.lex_rules:
        if r.category == cat:
            out.add((r.terminal,))
    for r in g.id_rules:
        if r.mother != cat:
            continue
        parts = [permutation_closure_language(g, d.category, depth - 1) for d in r.daughters]
        for choice in itertools.product(*parts):
            for perm in itertools.permutations(choice):
                out.add(tuple(w for block in perm for w in block))
    return out
