"""Grammar model: ID rules, lexical rules, global LP formulas, and the file reader.

File syntax::

    % comment
    start: s.
    s ==> #np(nom), #vp.
    np(Case) ==> adj(Case), noun(Case).
    verb ==> [amat].
    lp: not(first(part(refl), s)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

from . import formulas as F
from .terms import Compound, Term, Var, is_ground, rename, unify, variables

__all__ = [
    "DaughterSpec",
    "IDRule",
    "LexRule",
    "Grammar",
    "Diagnostic",
    "GrammarError",
    "GrammarSyntaxError",
    "read_grammar",
    "load_grammar",
    "serialize",
    "format_formula",
    "validate_grammar",
]

DEFAULT_MAX_TERM_DEPTH = 8


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = "%d:%d: " % (self.line, self.column or 1)
        return "%s%s: %s" % (where, self.severity, self.message)


class GrammarSyntaxError(GrammarError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__("line %d, column %d: %s" % (line, column, message))
        self.diagnostic = Diagnostic("error", message, line, column)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class DaughterSpec:
    category: Compound
    contiguous: bool = True

    def __str__(self) -> str:
        return ("" if self.contiguous else "#") + str(self.category)


@dataclass(frozen=True)
class IDRule:
    mother: Compound
    daughters: Tuple[DaughterSpec, ...]
    line: Optional[int] = field(default=None, compare=False)

    def __str__(self) -> str:
        return "%s ==> %s." % (self.mother, ", ".join(str(d) for d in self.daughters))

    @property
    def all_contiguous(self) -> bool:
        return all(d.contiguous for d in self.daughters)


@dataclass(frozen=True)
class LexRule:
    category: Compound
    terminal: str
    line: Optional[int] = field(default=None, compare=False)

    def __str__(self) -> str:
        return "%s ==> [%s]." % (self.category, self.terminal)


@dataclass(frozen=True)
class Grammar:
    id_rules: Tuple[IDRule, ...]
    lex_rules: Tuple[LexRule, ...]
    lp_formulas: Tuple[F.Formula, ...]
    start: Compound

    def __hash__(self) -> int:
        # grammars key several caches; hashing the rule tuples each time is slow
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.id_rules, self.lex_rules, self.lp_formulas, self.start))
            object.__setattr__(self, "_hash", h)
        return h

    @cached_property
    def lexicon(self) -> Tuple[str, ...]:
        seen = []
        for r in self.lex_rules:
            if r.terminal not in seen:
                seen.append(r.terminal)
        return tuple(seen)

    def with_formulas(self, formulas) -> "Grammar":
        return Grammar(self.id_rules, self.lex_rules, tuple(formulas), self.start)


# --------------------------------------------------------------------------
# Reader

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow>==>)
  | (?P<terminal>\[[^\]\s]*\])
  | (?P<op><<|>>|<>|<|>)
  | (?P<punct>[(),.\#])
  | (?P<decl>(?:lp|start)\s*:)
  | (?P<name>[a-z0-9][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"and", "or", "not", "if", "iff", "ifthenelse", "first", "last"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise GrammarSyntaxError("unexpected character %r" % text[pos], line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "decl":
                value = value.split(":")[0].strip()
            toks.append(_Tok(kind, value, line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, max_depth: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.max_depth = max_depth

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise GrammarSyntaxError("%s (found %r)" % (msg, found), tok.line, tok.col)

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        if not self.at(kind, text):
            self.error("expected %s" % (repr(text) if text else kind))
        t = self.tok
        self.i += 1
        return t

    # terms

    def term(self, level: int = 0) -> Term:
        if level > self.max_depth:
            self.error("term nesting exceeds depth %d" % self.max_depth)
        if self.at("var"):
            return Var(self.expect("var").text)
        return self.compound(level)

    def compound(self, level: int = 0) -> Compound:
        if not self.at("name"):
            self.error("expected a category")
        name = self.expect("name").text
        args = []
        if self.at("punct", "("):
            self.i += 1
            args.append(self.term(level + 1))
            while self.at("punct", ","):
                self.i += 1
                args.append(self.term(level + 1))
            self.expect("punct", ")")
        return Compound(name, tuple(args))

    # formulas; precedence: not > and > or > if/iff

    def formula(self) -> F.Formula:
        left = self.disjunction()
        while self.at("name", "if") or self.at("name", "iff"):
            op = self.expect("name").text
            right = self.disjunction()
            left = F.If(left, right) if op == "if" else F.Iff(left, right)
        return left

    def disjunction(self) -> F.Formula:
        left = self.conjunction()
        while self.at("name", "or"):
            self.i += 1
            left = F.Or(left, self.conjunction())
        return left

    def conjunction(self) -> F.Formula:
        left = self.unary()
        while self.at("name", "and"):
            self.i += 1
            left = F.And(left, self.unary())
        return left

    def unary(self) -> F.Formula:
        if self.at("name", "not"):
            self.i += 1
            return F.Not(self.unary())
        if self.at("punct", "("):
            self.i += 1
            f = self.formula()
            self.expect("punct", ")")
            return f
        if self.at("name", "ifthenelse"):
            self.i += 1
            self.expect("punct", "(")
            c = self.formula()
            self.expect("punct", ",")
            t = self.formula()
            self.expect("punct", ",")
            e = self.formula()
            self.expect("punct", ")")
            return F.IfThenElse(c, t, e)
        if self.at("name", "first") or self.at("name", "last"):
            kw = self.expect("name").text
            self.expect("punct", "(")
            elem = self.pattern()
            self.expect("punct", ",")
            node = self.pattern()
            self.expect("punct", ")")
            return F.First(elem, node) if kw == "first" else F.Last(elem, node)
        start = self.tok
        a = self.pattern()
        if not self.at("op"):
            self.error("expected one of < << > >> <>")
        op = self.expect("op").text
        b = self.pattern()
        if a == b:
            raise GrammarSyntaxError(
                "identical patterns on both sides of %r" % op, start.line, start.col
            )
        return F.BINARY_SYMBOLS[op](a, b)

    def pattern(self) -> Compound:
        tok = self.tok
        if tok.kind == "var":
            self.error("a pattern must be a category, not a bare variable")
        if tok.kind == "name" and tok.text in _KEYWORDS:
            self.error("keyword used as a category")
        return self.compound()

    # declarations

    def grammar(self) -> Grammar:
        id_rules, lex_rules, lps = [], [], []
        start = None
        while not self.at("eof"):
            tok = self.tok
            if self.at("decl", "lp"):
                self.i += 1
                lps.append(self.formula())
            elif self.at("decl", "start"):
                self.i += 1
                start = self.compound()
            else:
                head = self.compound()
                self.expect("arrow")
                if self.at("terminal"):
                    term_tok = self.expect("terminal")
                    word = term_tok.text[1:-1]
                    if not word:
                        self.error("empty terminal", term_tok)
                    if not is_ground(head):
                        raise GrammarSyntaxError(
                            "lexical category must be ground", tok.line, tok.col
                        )
                    lex_rules.append(LexRule(head, word, tok.line))
                else:
                    if self.at("punct", "."):
                        self.error("empty daughter list")
                    ds = [self.daughter()]
                    while self.at("punct", ","):
                        self.i += 1
                        ds.append(self.daughter())
                    id_rules.append(IDRule(head, tuple(ds), tok.line))
            self.expect("punct", ".")
        if start is None:
            if id_rules:
                start = id_rules[0].mother
            elif lex_rules:
                start = lex_rules[0].category
            else:
                raise GrammarSyntaxError("grammar declares no rules", 1, 1)
        return Grammar(tuple(id_rules), tuple(lex_rules), tuple(lps), start)

    def daughter(self) -> DaughterSpec:
        contiguous = True
        if self.at("punct", "#"):
            self.i += 1
            contiguous = False
        if self.at("var"):
            self.error("a variable cannot be a daughter")
        return DaughterSpec(self.compound(), contiguous)


def read_grammar(text: str, max_term_depth: int = DEFAULT_MAX_TERM_DEPTH) -> Grammar:
    """Parse grammar source text.

    Raises :class:`GrammarSyntaxError` (carrying line and column) on any
    syntax error, an empty rule body, a variable daughter, or a binary LP
    atom with identical patterns on both sides.
    """
    return _Parser(text, max_term_depth).grammar()


def load_grammar(path, max_term_depth: int = DEFAULT_MAX_TERM_DEPTH) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return read_grammar(fh.read(), max_term_depth)


# --------------------------------------------------------------------------
# Serializer

def format_formula(f: F.Formula) -> str:
    def wrap(g):
        s = format_formula(g)
        if isinstance(g, (F.And, F.Or, F.If, F.Iff)):
            return "(%s)" % s
        return s

    if isinstance(f, (F.And, F.Or, F.Iff)):
        op = {F.And: "and", F.Or: "or", F.Iff: "iff"}[type(f)]
        return "%s %s %s" % (wrap(f.left), op, wrap(f.right))
    if isinstance(f, F.If):
        return "%s if %s" % (wrap(f.consequent), wrap(f.antecedent))
    if isinstance(f, F.Not):
        return "not(%s)" % format_formula(f.arg)
    if isinstance(f, F.IfThenElse):
        return "ifthenelse(%s, %s, %s)" % tuple(
            format_formula(g) for g in (f.cond, f.then, f.else_)
        )
    return str(f)


def serialize(g: Grammar) -> str:
    lines = ["start: %s." % g.start]
    lines += [str(r) for r in g.id_rules]
    lines += [str(r) for r in g.lex_rules]
    lines += ["lp: %s." % format_formula(f) for f in g.lp_formulas]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Static validation

def _fresh(t: Term) -> Term:
    return rename(t, {}, "#v")


def _unifiable(a: Term, b: Term) -> bool:
    return unify(_fresh(a), b) is not None


def validate_grammar(g: Grammar) -> List[Diagnostic]:
    diags: List[Diagnostic] = []
    heads = [r.mother for r in g.id_rules] + [r.category for r in g.lex_rules]
    daughters = [d.category for r in g.id_rules for d in r.daughters]
    known = heads + daughters

    if not any(_unifiable(g.start, h) for h in heads):
        diags.append(Diagnostic("error", "start symbol %s has no rule" % g.start))

    for r in g.id_rules:
        dvars = {v for d in r.daughters for v in variables(d.category)}
        for v in variables(r.mother):
            if v not in dvars:
                diags.append(Diagnostic(
                    "warning", "variable %s of mother %s does not occur in any daughter" % (v, r.mother),
                    r.line))

    for i, f in enumerate(g.lp_formulas):
        for p in F.element_patterns(f) + F.node_patterns(f):
            if not any(_unifiable(p, k) for k in known):
                diags.append(Diagnostic(
                    "warning", "lp formula %d: pattern %s matches nothing" % (i + 1, p)))

    # reachability over unification of daughters with rule heads
    reached_id, reached_lex = set(), set()
    frontier = [g.start]
    seen_goals: List[Term] = []
    while frontier:
        goal = frontier.pop()
        if goal in seen_goals:
            continue
        seen_goals.append(goal)
        for i, r in enumerate(g.id_rules):
            if i not in reached_id and _unifiable(goal, r.mother):
                reached_id.add(i)
                frontier.extend(d.category for d in r.daughters)
        for i, r in enumerate(g.lex_rules):
            if _unifiable(goal, r.category):
                reached_lex.add(i)
    for i, r in enumerate(g.id_rules):
        if i not in reached_id:
            diags.append(Diagnostic("warning", "rule %s unreachable from start" % r, r.line))
    for i, r in enumerate(g.lex_rules):
        if i not in reached_lex:
            diags.append(Diagnostic("warning", "rule %s unreachable from start" % r, r.line))
    return diags
