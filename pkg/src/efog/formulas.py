"""Abstract syntax for linear-precedence (LP) formulas.

Atoms relate category patterns (``a < b``, ``a << b``, ``a > b``, ``a >> b``,
``a <> b``) or pin a pattern to the edge of a node (``first(a, s)``,
``last(a, s)``).  Atoms combine with and/or/not/if/iff/ifthenelse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, List, Union

from .terms import Term, variables

__all__ = [
    "Precede", "ImmPrecede", "Follow", "ImmFollow", "Adjacent", "First", "Last",
    "And", "Or", "Not", "If", "Iff", "IfThenElse",
    "Formula", "BinaryAtom", "PositionAtom",
    "element_patterns", "node_patterns", "has_position_atoms", "evaluate",
    "atoms", "formula_variables",
]


@dataclass(frozen=True)
class _Binary:
    a: Term
    b: Term
    symbol = "?"

    def __str__(self) -> str:
        return "%s %s %s" % (self.a, self.symbol, self.b)


@dataclass(frozen=True)
class Precede(_Binary):
    symbol = "<"


@dataclass(frozen=True)
class ImmPrecede(_Binary):
    symbol = "<<"


@dataclass(frozen=True)
class Follow(_Binary):
    symbol = ">"


@dataclass(frozen=True)
class ImmFollow(_Binary):
    symbol = ">>"


@dataclass(frozen=True)
class Adjacent(_Binary):
    symbol = "<>"


@dataclass(frozen=True)
class _Position:
    elem: Term
    node: Term
    keyword = "?"

    def __str__(self) -> str:
        return "%s(%s, %s)" % (self.keyword, self.elem, self.node)


@dataclass(frozen=True)
class First(_Position):
    keyword = "first"


@dataclass(frozen=True)
class Last(_Position):
    keyword = "last"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class If:
    """``consequent if antecedent``, written consequent first."""

    consequent: "Formula"
    antecedent: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class IfThenElse:
    cond: "Formula"
    then: "Formula"
    else_: "Formula"


BinaryAtom = Union[Precede, ImmPrecede, Follow, ImmFollow, Adjacent]
PositionAtom = Union[First, Last]
Formula = Union[BinaryAtom, PositionAtom, And, Or, Not, If, Iff, IfThenElse]

BINARY_SYMBOLS = {
    "<": Precede,
    "<<": ImmPrecede,
    ">": Follow,
    ">>": ImmFollow,
    "<>": Adjacent,
}


def _children(f: Formula) -> tuple:
    if isinstance(f, (And, Or, Iff)):
        return (f.left, f.right)
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, If):
        return (f.consequent, f.antecedent)
    if isinstance(f, IfThenElse):
        return (f.cond, f.then, f.else_)
    return ()


def atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, (_Binary, _Position)):
        yield f
    else:
        for c in _children(f):
            yield from atoms(c)


def _unique(terms) -> List[Term]:
    seen: List[Term] = []
    for t in terms:
        if t not in seen:
            seen.append(t)
    return seen


def element_patterns(f: Formula) -> List[Term]:
    """Distinct patterns that must be matched by ordering elements, in order of appearance."""
    out = []
    for a in atoms(f):
        if isinstance(a, _Binary):
            out.extend((a.a, a.b))
        else:
            out.append(a.elem)
    return _unique(out)


def node_patterns(f: Formula) -> List[Term]:
    return _unique(a.node for a in atoms(f) if isinstance(a, _Position))


def has_position_atoms(f: Formula) -> bool:
    return any(isinstance(a, _Position) for a in atoms(f))


def formula_variables(f: Formula):
    out = []
    for a in atoms(f):
        terms = (a.a, a.b) if isinstance(a, _Binary) else (a.elem, a.node)
        for t in terms:
            out.extend(variables(t))
    return _unique(out)


def evaluate(f: Formula, atom_value: Callable[[Formula], bool]) -> bool:
    """Classical two-valued evaluation given a truth value for each atom."""
    if isinstance(f, (_Binary, _Position)):
        return atom_value(f)
    if isinstance(f, And):
        return evaluate(f.left, atom_value) and evaluate(f.right, atom_value)
    if isinstance(f, Or):
        return evaluate(f.left, atom_value) or evaluate(f.right, atom_value)
    if isinstance(f, Not):
        return not evaluate(f.arg, atom_value)
    if isinstance(f, If):
        return evaluate(f.consequent, atom_value) or not evaluate(f.antecedent, atom_value)
    if isinstance(f, Iff):
        return evaluate(f.left, atom_value) == evaluate(f.right, atom_value)
    if isinstance(f, IfThenElse):
        if evaluate(f.cond, atom_value):
            return evaluate(f.then, atom_value)
        return evaluate(f.else_, atom_value)
    raise TypeError("not a formula: %r" % (f,))
