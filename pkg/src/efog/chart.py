"""Bottom-up chart parser over coverage bitmasks.

Each chart item records the set of token positions it covers as an integer
bitmask.  Items for a coverage mask are built only from items whose masks
partition it, so cells are filled in order of increasing popcount and unary
rules are closed within a cell.  A completed item may serve as a contiguous
daughter only if its mask is an interval; a non-contiguous daughter may cover
any set of positions, which is where discontinuity comes from.

LP formulas made only of binary atoms are checked as soon as a contiguous
node's ordering domain is complete.  Everything else (``first``/``last``
resolving to ancestors) waits for a final admissibility pass over complete
candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import formulas as F
from .grammar import Grammar
from .semantics import (
    DerivationTree,
    Linearization,
    admissible,
    domain_of,
    eval_with_spans,
    ground_formula,
    render_orders,
    render_tree,
)
from .terms import Subst, apply, fresh_suffix, is_ground, rename, unify

__all__ = ["UnknownToken", "ParseForest", "parse", "recognize", "DEFAULT_DEPTH_BOUND"]

DEFAULT_DEPTH_BOUND = 8


class UnknownToken(ValueError):
    def __init__(self, token: str):
        super().__init__("unknown token %r" % token)
        self.token = token


@dataclass(frozen=True)
class ParseForest:
    tokens: Tuple[str, ...]
    entries: Tuple[Tuple[DerivationTree, Linearization], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def trees(self) -> List[DerivationTree]:
        out = []
        for tree, _ in self.entries:
            if tree not in out:
                out.append(tree)
        return out

    def render(self, orders: bool = True) -> str:
        lines = []
        for tree, lin in self.entries:
            lines.append(render_tree(tree, lin))
            if orders:
                lines.extend("  " + line for line in render_orders(lin))
        return "\n".join(lines)


class _Item:
    __slots__ = ("tree", "mask", "leafpos", "height", "ground", "contig_ok")

    def __init__(self, tree, mask, leafpos, height, contig_ok):
        self.tree = tree
        self.mask = mask
        self.leafpos = leafpos
        self.height = height
        self.ground = is_ground(tree.category)
        self.contig_ok = contig_ok


def _is_interval(mask: int) -> bool:
    m = mask >> ((mask & -mask).bit_length() - 1)
    return m & (m + 1) == 0


def _rename_tree(tree: DerivationTree, mapping: dict, suffix: str) -> DerivationTree:
    return DerivationTree(
        rename(tree.category, mapping, suffix), tree.rule, tree.contiguous,
        tuple(_rename_tree(c, mapping, suffix) for c in tree.children), tree.terminal,
    )


def _with_flag(tree: DerivationTree, contiguous: bool) -> DerivationTree:
    if tree.contiguous == contiguous:
        return tree
    return DerivationTree(tree.category, tree.rule, contiguous, tree.children, tree.terminal)


class _UnificationChart:
    """General path: items carry terms and combine by unification."""

    def __init__(self, g: Grammar, tokens: Tuple[str, ...], depth_bound: int, prune: bool):
        self.g = g
        self.tokens = tokens
        self.depth_bound = depth_bound
        self.cells: Dict[int, List[_Item]] = {}
        self.local = [f for f in g.lp_formulas if not F.has_position_atoms(f)] if prune else []
        self.unary = [(i, r) for i, r in enumerate(g.id_rules) if len(r.daughters) == 1]
        self.nary = [(i, r) for i, r in enumerate(g.id_rules) if len(r.daughters) > 1]

    def _make(self, tree, mask, leafpos, height) -> _Item:
        contig_ok = _is_interval(mask) and _passes_local(self.local, tree, leafpos)
        return _Item(tree, mask, leafpos, height, contig_ok)

    def _build(self, rule_index, kids, subst: Subst, mother) -> Optional[_Item]:
        trees = []
        for item, flag, renamed in kids:
            t = renamed if renamed is not None else item.tree
            if not item.ground or renamed is not None:
                t = t.substitute(subst)
            trees.append(_with_flag(t, flag))
        height = 1 + max(item.height for item, _, _ in kids)
        if height > self.depth_bound:
            return None
        mask = 0
        leafpos: tuple = ()
        for item, _, _ in kids:
            mask |= item.mask
            leafpos += item.leafpos
        tree = DerivationTree(apply(mother, subst), rule_index, True, tuple(trees))
        return self._make(tree, mask, leafpos, height)

    def _match(self, pattern, item: _Item, s: Subst):
        """Unify a daughter pattern with an item; returns (subst, renamed tree or None)."""
        if item.ground:
            return unify(pattern, item.tree.category, s), None
        renamed = _rename_tree(item.tree, {}, fresh_suffix())
        return unify(pattern, renamed.category, s), renamed

    def _fits(self, item: _Item, contiguous: bool) -> bool:
        return item.contig_ok or not contiguous or item.tree.is_leaf

    def run(self) -> List[_Item]:
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens):
            cell = self.cells.setdefault(1 << i, [])
            for k, r in enumerate(self.g.lex_rules):
                if r.terminal == tok:
                    leaf = DerivationTree(r.category, k, True, (), tok)
                    cell.append(_Item(leaf, 1 << i, (i,), 1, True))
        for mask in sorted(range(1, 1 << n), key=lambda m: (bin(m).count("1"), m)):
            items = self.cells.get(mask, [])
            if bin(mask).count("1") > 1:
                items = self._combine(mask)
            self._close_unary(items)
            if items:
                self.cells[mask] = items
        return self.cells.get((1 << n) - 1, [])

    def _combine(self, mask: int) -> List[_Item]:
        out = []
        nonempty = [m for m in self.cells if m & mask == m and m != mask]
        for rule_index, rule in self.nary:
            mapping: dict = {}
            suffix = fresh_suffix()
            mother = rename(rule.mother, mapping, suffix)
            pats = [rename(d.category, mapping, suffix) for d in rule.daughters]
            flags = [d.contiguous for d in rule.daughters]
            k = len(pats)

            def go(j, remaining, s, kids):
                if j == k - 1:
                    for item in self.cells.get(remaining, ()):
                        if not self._fits(item, flags[j]):
                            continue
                        s2, renamed = self._match(pats[j], item, s)
                        if s2 is not None:
                            built = self._build(rule_index, kids + [(item, flags[j], renamed)], s2, mother)
                            if built is not None:
                                out.append(built)
                    return
                for m in nonempty:
                    if m & remaining != m or m == remaining:
                        continue
                    if bin(remaining & ~m).count("1") < k - 1 - j:
                        continue
                    for item in self.cells[m]:
                        if not self._fits(item, flags[j]):
                            continue
                        s2, renamed = self._match(pats[j], item, s)
                        if s2 is not None:
                            go(j + 1, remaining & ~m, s2, kids + [(item, flags[j], renamed)])

            go(0, mask, {}, [])
        return out

    def _close_unary(self, items: List[_Item]) -> None:
        queue = list(items)
        while queue:
            item = queue.pop(0)
            for rule_index, rule in self.unary:
                d = rule.daughters[0]
                if not self._fits(item, d.contiguous):
                    continue
                mapping: dict = {}
                suffix = fresh_suffix()
                mother = rename(rule.mother, mapping, suffix)
                pat = rename(d.category, mapping, suffix)
                s, renamed = self._match(pat, item, {})
                if s is None:
                    continue
                built = self._build(rule_index, [(item, d.contiguous, renamed)], s, mother)
                if built is not None:
                    items.append(built)
                    queue.append(built)


# --------------------------------------------------------------------------
# Ground fast path.  Rule instances over derivable ground categories are
# computed once per (grammar, depth bound); parsing then joins integer ids.

class _GroundGrammar:
    def __init__(self, terms, lexical, instances, components, roots):
        self.terms = terms
        self.lexical = lexical          # token -> [(cat id, lex rule index)]
        self.instances = instances      # [(rule index, mother, daughters, flags)]
        self.components = components    # [(instance indices, cyclic)] daughters first
        self.roots = roots              # cat ids unifying with the start symbol


_MAX_INSTANCES = 50_000


@lru_cache(maxsize=64)
def _ground_grammar(g: Grammar, depth_bound: int) -> Optional[_GroundGrammar]:
    """Instantiate ID rules over derivable categories; None if any stays non-ground."""
    ids: Dict = {}
    terms: list = []
    min_h: list = []

    def intern(t, h):
        if t not in ids:
            ids[t] = len(terms)
            terms.append(t)
            min_h.append(h)
        return ids[t]

    lexical: Dict[str, list] = {}
    for k, r in enumerate(g.lex_rules):
        lexical.setdefault(r.terminal, []).append((intern(r.category, 1), k))

    instances: Dict[tuple, None] = {}
    for h in range(2, depth_bound + 1):
        avail = [(terms[c], c) for c in range(len(terms)) if min_h[c] <= h - 1]
        before = (len(terms), len(instances))
        for ri, rule in enumerate(g.id_rules):
            mapping: dict = {}
            suffix = fresh_suffix()
            mother = rename(rule.mother, mapping, suffix)
            pats = [rename(d.category, mapping, suffix) for d in rule.daughters]
            flags = tuple(d.contiguous for d in rule.daughters)
            stack = [((), {})]
            while stack:
                chosen, s = stack.pop()
                j = len(chosen)
                if j == len(pats):
                    m = apply(mother, s)
                    if not is_ground(m):
                        return None
                    instances[(ri, intern(m, h), chosen, flags)] = None
                    if len(instances) > _MAX_INSTANCES:
                        return None
                    continue
                for t, c in avail:
                    s2 = unify(pats[j], t, s)
                    if s2 is not None:
                        stack.append((chosen + (c,), s2))
        if (len(terms), len(instances)) == before:
            break

    inst_list = sorted(instances)
    by_mother: Dict[int, list] = {}
    for idx, (_, mother, _, _) in enumerate(inst_list):
        by_mother.setdefault(mother, []).append(idx)
    edges = {c: set() for c in range(len(terms))}
    for _, mother, ds, _ in inst_list:
        for d in ds:
            edges[d].add(mother)
    components = []
    for comp in _sccs_daughters_first(len(terms), edges):
        idxs = sorted(i for c in comp for i in by_mother.get(c, ()))
        cyclic = len(comp) > 1 or any(c in edges[c] for c in comp)
        if idxs:
            components.append((tuple(idxs), cyclic))
    roots = tuple(c for c, t in enumerate(terms) if unify(g.start, rename(t, {}, fresh_suffix())) is not None)
    return _GroundGrammar(tuple(terms), lexical, tuple(inst_list), tuple(components), roots)


def _sccs_daughters_first(n: int, edges: Dict[int, set]) -> List[List[int]]:
    """Tarjan's algorithm; edges run daughter -> mother, so reversing Tarjan's
    output order (which is reverse-topological) puts daughters first."""
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on_stack = set()
    stack: List[int] = []
    out: List[List[int]] = []
    counter = 0
    for root in range(n):
        if root in index:
            continue
        work = [(root, iter(sorted(edges[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(edges[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    out.reverse()
    return out


class _Deriv:
    __slots__ = ("tree", "leafpos", "height", "contig_ok")

    def __init__(self, tree, leafpos, height, contig_ok):
        self.tree = tree
        self.leafpos = leafpos
        self.height = height
        self.contig_ok = contig_ok


class _GroundChart:
    def __init__(self, g: Grammar, gg: _GroundGrammar, tokens, depth_bound: int, prune: bool):
        self.g = g
        self.gg = gg
        self.tokens = tokens
        self.depth_bound = depth_bound
        self.prune = prune
        self.local = [f for f in g.lp_formulas if not F.has_position_atoms(f)] if prune else []
        n_cats = len(gg.terms)
        self.items: List[Dict[int, int]] = [dict() for _ in range(n_cats)]
        self.back: Dict[Tuple[int, int], list] = {}
        self.memo: Dict[tuple, list] = {}

    def fill(self) -> None:
        items, back, bound = self.items, self.back, self.depth_bound
        for i, tok in enumerate(self.tokens):
            for cid, k in self.gg.lexical.get(tok, ()):
                items[cid][1 << i] = 1
                back.setdefault((cid, 1 << i), []).append(("lex", k))
        instances = self.gg.instances
        for idxs, cyclic in self.gg.components:
            changed = True
            while changed:
                changed = False
                for ii in idxs:
                    _, mother, ds, flags = instances[ii]
                    target = items[mother]
                    for masks, used, h in self._join(ds, flags):
                        if h > bound:
                            continue
                        key = (mother, used)
                        entry = (ii, masks)
                        bps = back.setdefault(key, [])
                        if entry not in bps:
                            bps.append(entry)
                            changed = True
                        old = target.get(used)
                        if old is None or h < old:
                            target[used] = h
                            changed = True
                if not cyclic:
                    break

    def _join(self, ds, flags):
        items = self.items
        k = len(ds)
        out = []

        def rec(j, used, masks, h):
            if j == k:
                out.append((masks, used, h + 1))
                return
            for m, hm in list(items[ds[j]].items()):
                if m & used:
                    continue
                if flags[j]:
                    low = m >> ((m & -m).bit_length() - 1)
                    if low & (low + 1):
                        continue
                rec(j + 1, used | m, masks + (m,), hm if hm > h else h)

        rec(0, 0, (), 0)
        return out

    def derivations(self, cid: int, mask: int, limit: int) -> List[_Deriv]:
        key = (cid, mask, limit)
        if key in self.memo:
            return self.memo[key]
        out: List[_Deriv] = []
        self.memo[key] = out
        if limit < 1:
            return out
        for entry in self.back.get((cid, mask), ()):
            if entry[0] == "lex":
                leaf = DerivationTree(self.gg.terms[cid], entry[1], True, (), self.tokens[mask.bit_length() - 1])
                out.append(_Deriv(leaf, (mask.bit_length() - 1,), 1, True))
                continue
            ii, masks = entry
            rule_index, _, ds, flags = self.gg.instances[ii]
            options = []
            for d, m, flag in zip(ds, masks, flags):
                opts = self.derivations(d, m, limit - 1)
                if flag and self.prune:
                    opts = [o for o in opts if o.contig_ok]
                if not opts:
                    break
                options.append([(o, flag) for o in opts])
            else:
                for combo in itertools.product(*options):
                    kids = tuple(_with_flag(o.tree, flag) for o, flag in combo)
                    leafpos = tuple(p for o, _ in combo for p in o.leafpos)
                    height = 1 + max(o.height for o, _ in combo)
                    tree = DerivationTree(self.gg.terms[cid], rule_index, True, kids)
                    ok = _is_interval(mask) and _passes_local(self.local, tree, leafpos)
                    out.append(_Deriv(tree, leafpos, height, ok))
        return out

    def roots(self) -> List[_Deriv]:
        full = (1 << len(self.tokens)) - 1
        out = []
        for cid in self.gg.roots:
            if full in self.items[cid]:
                out.extend(self.derivations(cid, full, self.depth_bound))
        return out


def _passes_local(local, tree: DerivationTree, leafpos: tuple) -> bool:
    """Check LP formulas without position atoms on the root domain of ``tree``."""
    if not local or tree.is_leaf:
        return True
    dom = domain_of(tree, ())
    spans = None
    for f in local:
        for gi in ground_formula(f, dom, tree):
            if spans is None:
                spans = _element_spans(tree, leafpos, dom)
            if not eval_with_spans(gi, spans):
                return False
    return True


def _element_spans(tree: DerivationTree, leafpos: tuple, dom) -> dict:
    pos = {p: leafpos[k] for k, (p, _) in enumerate(tree.leaves())}
    spans = {}
    for ep in dom.elements:
        n = len(ep)
        inside = [v for p, v in pos.items() if p[:n] == ep]
        spans[ep] = (min(inside), max(inside))
    return spans


def _candidates(g: Grammar, tokens, depth_bound: int, prune: bool):
    """Yield (tree, leaf positions) for complete candidates before the final pass."""
    gg = _ground_grammar(g, depth_bound)
    if gg is not None:
        chart = _GroundChart(g, gg, tokens, depth_bound, prune)
        chart.fill()
        for d in chart.roots():
            if prune and not d.contig_ok:
                continue
            yield d.tree, d.leafpos
        return
    for item in _UnificationChart(g, tokens, depth_bound, prune).run():
        if prune and not item.contig_ok:
            continue
        if item.ground:
            s, tree = unify(g.start, item.tree.category), item.tree
        else:
            tree = _rename_tree(item.tree, {}, fresh_suffix())
            s = unify(g.start, tree.category)
            if s is not None:
                tree = tree.substitute(s)
        if s is not None:
            yield tree, item.leafpos


def parse(g: Grammar, tokens: Sequence[str], depth_bound: int = DEFAULT_DEPTH_BOUND,
          prune: bool = True) -> ParseForest:
    """All admissible (tree, linearization) pairs whose yield is ``tokens``.

    ``depth_bound`` caps derivation height exactly as the oracle's
    generation bound does.  ``prune=False`` disables combination-time LP
    checks, leaving only the final pass.
    """
    tokens = tuple(tokens)
    if not tokens:
        raise ValueError("empty input")
    lexicon = set(g.lexicon)
    for t in tokens:
        if t not in lexicon:
            raise UnknownToken(t)
    entries = []
    seen = set()
    for tree, leafpos in _candidates(g, tokens, depth_bound, prune):
        positions = {p: leafpos[k] for k, (p, _) in enumerate(tree.leaves())}
        lin = Linearization.from_leaf_positions(tree, positions)
        if (tree, lin.orders) not in seen and admissible(tree, lin, g):
            seen.add((tree, lin.orders))
            entries.append((tree, lin))
    return ParseForest(tokens, tuple(entries))


def recognize(g: Grammar, tokens: Sequence[str], depth_bound: int = DEFAULT_DEPTH_BOUND) -> bool:
    return bool(parse(g, tokens, depth_bound))
