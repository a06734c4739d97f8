"""Ordering domains, linearizations, and LP-constraint satisfaction.

A contiguous node owns an ordering domain.  Its elements are its contiguous
children plus, recursively, whatever its non-contiguous children would have
contributed: a non-contiguous node is dissolved into the nearest contiguous
ancestor.  Lexical leaves are always atomic elements.

Nodes are addressed by *paths*: tuples of child indices from the root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from . import formulas as F
from .terms import Subst, Term, apply, fresh_suffix, rename, unify

__all__ = [
    "DerivationTree",
    "OrderingDomain",
    "Linearization",
    "GroundInstance",
    "collect_domains",
    "ground_formula",
    "ground_all",
    "eval_ground",
    "eval_with_spans",
    "admissible",
    "linearizations",
    "count_linearizations",
    "render_tree",
    "render_orders",
]

Path = Tuple[int, ...]
Span = Tuple[int, int]


@dataclass(frozen=True)
class DerivationTree:
    category: Term
    rule: int
    contiguous: bool = True
    children: Tuple["DerivationTree", ...] = ()
    terminal: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return self.terminal is not None

    def at(self, path: Path) -> "DerivationTree":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def leaves(self) -> Iterator[Tuple[Path, "DerivationTree"]]:
        """Lexical leaves in left-to-right *tree* order (not surface order)."""
        stack = [((), self)]
        while stack:
            path, node = stack.pop()
            if node.is_leaf:
                yield path, node
            else:
                for i in range(len(node.children) - 1, -1, -1):
                    stack.append((path + (i,), node.children[i]))

    def terminals(self) -> List[str]:
        return [leaf.terminal for _, leaf in self.leaves()]

    @cached_property
    def size(self) -> int:
        if self.is_leaf:
            return 1
        return sum(c.size for c in self.children)

    @cached_property
    def height(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + max(c.height for c in self.children)

    def substitute(self, s: Subst) -> "DerivationTree":
        if not s:
            return self
        return DerivationTree(
            apply(self.category, s), self.rule, self.contiguous,
            tuple(c.substitute(s) for c in self.children), self.terminal,
        )

    def __str__(self) -> str:
        return render_tree(self)


@dataclass(frozen=True)
class OrderingDomain:
    owner: Path
    elements: Tuple[Path, ...]


def _lift(node: DerivationTree, path: Path) -> Iterator[Path]:
    for i, child in enumerate(node.children):
        cpath = path + (i,)
        if child.contiguous or child.is_leaf:
            yield cpath
        else:
            yield from _lift(child, cpath)


def domain_of(tree: DerivationTree, owner: Path) -> OrderingDomain:
    return OrderingDomain(owner, tuple(_lift(tree.at(owner), owner)))


def collect_domains(tree: DerivationTree) -> List[OrderingDomain]:
    """One domain per contiguous internal node, pre-order.  The root counts as contiguous."""
    out = []

    def visit(node, path, contiguous):
        if node.is_leaf:
            return
        if contiguous:
            out.append(OrderingDomain(path, tuple(_lift(node, path))))
        for i, c in enumerate(node.children):
            visit(c, path + (i,), c.contiguous)

    visit(tree, (), True)
    return out


@dataclass(frozen=True)
class Linearization:
    """A permutation of every ordering domain of ``tree``.

    ``orders`` maps each domain owner to its elements in surface order.
    ``offset`` is the position of the tree's first terminal, so that a
    subtree can be linearized at its absolute place in a sentence.
    """

    tree: DerivationTree
    orders: Tuple[Tuple[Path, Tuple[Path, ...]], ...]
    offset: int = 0

    @cached_property
    def spans(self) -> Dict[Path, Span]:
        order_map = dict(self.orders)
        spans: Dict[Path, Span] = {}

        def layout(owner: Path, start: int):
            pos = start
            for ep in order_map[owner]:
                node = self.tree.at(ep)
                spans[ep] = (pos, pos + node.size - 1)
                if not node.is_leaf:
                    layout(ep, pos)
                pos += node.size

        if not self.tree.is_leaf:
            layout((), self.offset)
        spans[()] = (self.offset, self.offset + self.tree.size - 1)

        def fill(node: DerivationTree, path: Path) -> Span:
            # dissolved nodes: leftmost/rightmost terminal of their yield
            if path in spans:
                for i, c in enumerate(node.children):
                    fill(c, path + (i,))
                return spans[path]
            sub = [fill(c, path + (i,)) for i, c in enumerate(node.children)]
            spans[path] = (min(s for s, _ in sub), max(e for _, e in sub))
            return spans[path]

        fill(self.tree, ())
        return spans

    @cached_property
    def tokens(self) -> Tuple[str, ...]:
        spans = self.spans
        out = [None] * self.tree.size
        for path, leaf in self.tree.leaves():
            out[spans[path][0] - self.offset] = leaf.terminal
        return tuple(out)

    def leaf_positions(self) -> Dict[Path, int]:
        return {p: self.spans[p][0] for p, _ in self.tree.leaves()}

    @classmethod
    def from_leaf_positions(cls, tree: DerivationTree, positions: Dict[Path, int]) -> "Linearization":
        """Recover the per-domain orders from absolute leaf positions.

        Raises ValueError when the positions are not a linearization (some
        contiguous node would have a gapped yield, or positions collide).
        """
        leaf_pos = {}
        for path, _ in tree.leaves():
            leaf_pos[path] = positions[path]
        offset = min(leaf_pos.values())
        if sorted(leaf_pos.values()) != list(range(offset, offset + len(leaf_pos))):
            raise ValueError("leaf positions are not a contiguous range")

        lo_hi: Dict[Path, Span] = {}

        def span(node, path):
            if node.is_leaf:
                p = leaf_pos[path]
                lo_hi[path] = (p, p)
            else:
                sub = [span(c, path + (i,)) for i, c in enumerate(node.children)]
                lo_hi[path] = (min(s for s, _ in sub), max(e for _, e in sub))
            return lo_hi[path]

        span(tree, ())
        orders = []
        for d in collect_domains(tree):
            for ep in d.elements + (d.owner,):
                s, e = lo_hi[ep]
                if e - s + 1 != tree.at(ep).size:
                    raise ValueError("contiguous node %r has a gapped yield" % (ep,))
            orders.append((d.owner, tuple(sorted(d.elements, key=lambda p: lo_hi[p][0]))))
        return cls(tree, tuple(orders), offset)


def linearizations(tree: DerivationTree) -> Iterator[Linearization]:
    """Every linearization of ``tree``: the product of per-domain permutations."""
    domains = collect_domains(tree)
    for combo in itertools.product(*(itertools.permutations(d.elements) for d in domains)):
        yield Linearization(tree, tuple((d.owner, order) for d, order in zip(domains, combo)))


def count_linearizations(tree: DerivationTree) -> int:
    return math.prod(math.factorial(len(d.elements)) for d in collect_domains(tree))


# --------------------------------------------------------------------------
# Grounding

@dataclass(frozen=True)
class GroundInstance:
    formula: F.Formula
    elements: Tuple[Tuple[Term, Path], ...]
    nodes: Tuple[Tuple[Term, Path], ...]
    bindings: Tuple[Tuple[Term, Term], ...] = field(default=(), compare=False)

    @cached_property
    def _lookup(self):
        return dict(self.elements), dict(self.nodes)


def _ancestors(owner: Path) -> Iterator[Path]:
    for k in range(len(owner), -1, -1):
        yield owner[:k]


@lru_cache(maxsize=1024)
def _prepared(f: F.Formula):
    # renamed once per formula; substitutions stay local to each grounding
    mapping: dict = {}
    suffix = fresh_suffix()
    orig_e = tuple(F.element_patterns(f))
    orig_n = tuple(F.node_patterns(f))
    epats = tuple(rename(p, mapping, suffix) for p in orig_e)
    npats = tuple(rename(p, mapping, suffix) for p in orig_n)
    return orig_e, orig_n, epats, npats


def ground_formula(f: F.Formula, d: OrderingDomain, tree: DerivationTree) -> List[GroundInstance]:
    """All complete, injective groundings of ``f`` on domain ``d``.

    Element patterns bind distinct elements of ``d`` under one consistent
    substitution.  Each ``first``/``last`` node pattern then resolves to the
    nearest ancestor of the domain owner (owner included) whose category
    unifies.  An assignment that leaves any pattern unmatched yields nothing.
    """
    orig_e, orig_n, epats, npats = _prepared(f)
    if len(epats) > len(d.elements):
        return []
    cats = [(ep, tree.at(ep).category) for ep in d.elements]
    out: List[GroundInstance] = []

    def resolve_nodes(s: Subst):
        chosen = []
        for orig, pat in zip(orig_n, npats):
            for anc in _ancestors(d.owner):
                s2 = unify(pat, tree.at(anc).category, s)
                if s2 is not None:
                    s = s2
                    chosen.append((orig, anc))
                    break
            else:
                return None
        return tuple(chosen), s

    def assign(i: int, used: Tuple[Path, ...], s: Subst):
        if i == len(epats):
            resolved = resolve_nodes(s)
            if resolved is None:
                return
            nodes, s_final = resolved
            out.append(GroundInstance(
                f, tuple(zip(orig_e, used)), nodes,
                tuple((k, v) for k, v in s_final.items()),
            ))
            return
        for ep, cat in cats:
            if ep in used:
                continue
            s2 = unify(epats[i], cat, s)
            if s2 is not None:
                assign(i + 1, used + (ep,), s2)

    assign(0, (), {})
    return out


def ground_all(tree: DerivationTree, formulas: Sequence[F.Formula]) -> List[GroundInstance]:
    out = []
    for d in collect_domains(tree):
        for f in formulas:
            out.extend(ground_formula(f, d, tree))
    return out


def _atom_value(atom, gi: GroundInstance, spans: Dict[Path, Span]) -> bool:
    elems, nodes = gi._lookup
    if isinstance(atom, (F.First, F.Last)):
        a = spans[elems[atom.elem]]
        n = spans[nodes[atom.node]]
        if isinstance(atom, F.First):
            return a[0] == n[0]
        return a[1] == n[1]
    a = spans[elems[atom.a]]
    b = spans[elems[atom.b]]
    if isinstance(atom, F.Precede):
        return a[1] < b[0]
    if isinstance(atom, F.Follow):
        return b[1] < a[0]
    if isinstance(atom, F.ImmPrecede):
        return a[1] + 1 == b[0]
    if isinstance(atom, F.ImmFollow):
        return b[1] + 1 == a[0]
    if isinstance(atom, F.Adjacent):
        return a[1] + 1 == b[0] or b[1] + 1 == a[0]
    raise TypeError(atom)


def eval_ground(gi: GroundInstance, lin: Linearization) -> bool:
    return eval_with_spans(gi, lin.spans)


def eval_with_spans(gi: GroundInstance, spans: Dict[Path, Span]) -> bool:
    """Evaluate against bare spans; only the paths ``gi`` mentions must be present."""
    return F.evaluate(gi.formula, lambda atom: _atom_value(atom, gi, spans))


def admissible(tree: DerivationTree, lin: Linearization, g) -> bool:
    """True iff every grounding of every LP formula of ``g`` holds under ``lin``."""
    return all(eval_ground(gi, lin) for gi in ground_all(tree, g.lp_formulas))


# --------------------------------------------------------------------------
# Rendering

def render_tree(tree: DerivationTree, lin: Optional[Linearization] = None) -> str:
    """Bracketed form; with ``lin``, children are listed in surface order and
    dissolved nodes carry a ``#`` prefix."""
    spans = lin.spans if lin is not None else None

    def go(node, path):
        label = ("" if node.contiguous else "#") + str(node.category)
        if node.is_leaf:
            return "%s(%s)" % (label, node.terminal)
        idx = list(range(len(node.children)))
        if spans is not None:
            idx.sort(key=lambda i: spans[path + (i,)][0])
        return "%s(%s)" % (label, ", ".join(go(node.children[i], path + (i,)) for i in idx))

    return go(tree, ())


def _element_label(node: DerivationTree) -> str:
    if node.is_leaf:
        return "%s(%s)" % (node.category, node.terminal)
    return str(node.category)


def render_orders(lin: Linearization) -> List[str]:
    """One line per domain: owner category, then its elements in surface order."""
    lines = []
    for owner, order in lin.orders:
        s, e = lin.spans[owner]
        lines.append("[%s %d-%d] %s" % (
            lin.tree.at(owner).category, s, e,
            " < ".join(_element_label(lin.tree.at(p)) for p in order),
        ))
    return lines
