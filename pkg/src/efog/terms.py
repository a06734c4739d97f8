"""First-order terms naming grammatical categories, plus unification.

Categories are plain first-order terms: ``np(nom)``, ``v(refl)``, ``adj(Case)``.
Constants and functors are lowercase-initial, variables uppercase-initial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple, Union

__all__ = [
    "Var",
    "Compound",
    "Term",
    "Subst",
    "unify",
    "apply",
    "walk",
    "variables",
    "is_ground",
    "rename",
    "fresh_suffix",
    "depth",
]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compound:
    functor: str
    args: Tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return "%s(%s)" % (self.functor, ", ".join(str(a) for a in self.args))

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Union[Var, Compound]
Subst = Dict[Var, Term]

_counter = itertools.count()


def fresh_suffix() -> str:
    # '#' cannot occur in a user-written variable, so renamed variables never clash
    return "#%d" % next(_counter)


def walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def apply(t: Term, s: Subst) -> Term:
    """Apply a (possibly triangular) substitution all the way down."""
    if not s:
        return t
    t = walk(t, s)
    if isinstance(t, Var) or not t.args:
        return t
    return Compound(t.functor, tuple(apply(a, s) for a in t.args))


def _occurs(v: Var, t: Term, s: Subst) -> bool:
    t = walk(t, s)
    if t == v:
        return True
    if isinstance(t, Compound):
        return any(_occurs(v, a, s) for a in t.args)
    return False


def _unify(a: Term, b: Term, s: Subst) -> bool:
    # mutates s (triangular form); caller owns the copy
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = walk(x, s)
        y = walk(y, s)
        if x == y:
            continue
        if isinstance(x, Var):
            if _occurs(x, y, s):
                return False
            s[x] = y
        elif isinstance(y, Var):
            if _occurs(y, x, s):
                return False
            s[y] = x
        else:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
    return True


def unify(t1: Term, t2: Term, bindings: Optional[Subst] = None) -> Optional[Subst]:
    """Return the most general unifier of ``t1`` and ``t2`` extending ``bindings``.

    The result is idempotent (no bound variable occurs in any binding value).
    Returns ``None`` on a functor/arity clash or an occurs-check violation.
    ``bindings`` is never modified.
    """
    s = dict(bindings) if bindings else {}
    if not _unify(t1, t2, s):
        return None
    return {v: apply(t, s) for v, t in s.items()}


def variables(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    else:
        for a in t.args:
            yield from variables(a)


def is_ground(t: Term) -> bool:
    return next(variables(t), None) is None


def rename(t: Term, mapping: Dict[Var, Var], suffix: str) -> Term:
    """Rename every variable in ``t`` apart, memoising choices in ``mapping``."""
    if isinstance(t, Var):
        if t not in mapping:
            mapping[t] = Var(t.name.split("#")[0] + suffix)
        return mapping[t]
    if not t.args:
        return t
    return Compound(t.functor, tuple(rename(a, mapping, suffix) for a in t.args))


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)
