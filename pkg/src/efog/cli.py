"""Command-line workbench for EFOG grammars.

Exit codes: 0 accept/success, 1 reject (no parse, not ECPO, languages
differ), 2 usage or grammar errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .analysis import Ecpo, ecpo_check, grammar_ordering_sets, language_diff, render_verdict
from .chart import UnknownToken, parse
from .grammar import GrammarError, load_grammar, validate_grammar
from .oracle import CapExceeded, GenerationConfig, generate_with_trees, oracle_recognize
from .semantics import render_orders, render_tree


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="efog", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sentence=False, bounds=True):
        sp.add_argument("-g", "--grammar", required=True, help="grammar file")
        if bounds:
            sp.add_argument("--depth", type=int, default=8, help="derivation depth bound (default 8)")
            sp.add_argument("--max", type=int, default=100_000, help="cap on generated sentences")
        if sentence:
            sp.add_argument("tokens", nargs="+", help="whitespace-separated sentence")
        return sp

    sp = common(sub.add_parser("parse", help="parse a sentence"), sentence=True)
    sp.add_argument("--oracle", action="store_true", help="use the brute-force oracle")
    sp.add_argument("--format", choices=("plain", "trees"), default="plain")

    sp = common(sub.add_parser("trees", help="bracketed derivations with per-domain orders"), sentence=True)
    sp.add_argument("--oracle", action="store_true")

    sp = common(sub.add_parser("generate", help="list every sentence of the language"))
    sp.add_argument("--oracle", action="store_true",
                    help="accepted for symmetry; generation always enumerates")
    sp.add_argument("--format", choices=("plain", "trees"), default="plain")

    common(sub.add_parser("check-ecpo", help="ECPO verdict over all-contiguous rules"), bounds=False)
    common(sub.add_parser("validate", help="static grammar diagnostics"), bounds=False)

    sp = sub.add_parser("diff", help="sentences generated by only one of two grammars")
    sp.add_argument("-g", "--grammar", action="append", required=True,
                    help="grammar file (give exactly two)")
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--max", type=int, default=100_000)
    return p


def _render(entries, orders: bool) -> List[str]:
    lines = []
    for tree, lin in entries:
        lines.append(render_tree(tree, lin))
        if orders:
            lines.extend("  " + line for line in render_orders(lin))
    return lines


def _cfg(args) -> GenerationConfig:
    return GenerationConfig(depth_bound=args.depth, max_sentences=args.max)


def _parse(args, g, orders: bool, out) -> int:
    tokens = [t for chunk in args.tokens for t in chunk.split()]
    if args.oracle:
        unknown = [t for t in tokens if t not in set(g.lexicon)]
        if unknown:
            raise UnknownToken(unknown[0])
        _, entries = oracle_recognize(g, tokens, _cfg(args))
    else:
        entries = list(parse(g, tokens, depth_bound=args.depth))
    if not entries:
        print("no parse", file=out)
        return 1
    print("\n".join(_render(entries, orders)), file=out)
    return 0


def _generate(args, g, out) -> int:
    lang = generate_with_trees(g, _cfg(args))
    for sent in sorted(lang, key=" ".join):
        print(" ".join(sent), file=out)
        if args.format == "trees":
            for line in _render(lang[sent], True):
                print("  " + line, file=out)
    return 0


def _check_ecpo(g, out) -> int:
    sets, skipped = grammar_ordering_sets(g)
    for i in skipped:
        print("rule %d skipped (non-contiguous daughters): %s" % (i, g.id_rules[i]), file=out)
    if not sets:
        raise GrammarError("no all-contiguous ID rules to analyse")
    verdict = ecpo_check(sets)
    print(render_verdict(verdict, sets), file=out)
    return 0 if isinstance(verdict, Ecpo) else 1


def _validate(g, out) -> int:
    diags = validate_grammar(g)
    for d in diags:
        print(d, file=out)
    errors = [d for d in diags if d.severity == "error"]
    if not diags:
        print("ok", file=out)
    return 1 if errors else 0


def _diff(args, out, err) -> int:
    if len(args.grammar) != 2:
        print("efog diff: give exactly two grammars", file=err)
        return 2
    g1, g2 = (load_grammar(p) for p in args.grammar)
    only1, only2 = language_diff(g1, g2, _cfg(args))
    for path, only in zip(args.grammar, (only1, only2)):
        print("only in %s (%d):" % (path, len(only)), file=out)
        for sent in sorted(only, key=" ".join):
            print("  " + " ".join(sent), file=out)
    return 0 if not (only1 or only2) else 1


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "diff":
            return _diff(args, out, err)
        g = load_grammar(args.grammar)
        if args.command == "parse":
            return _parse(args, g, args.format == "trees", out)
        if args.command == "trees":
            return _parse(args, g, True, out)
        if args.command == "generate":
            return _generate(args, g, out)
        if args.command == "check-ecpo":
            return _check_ecpo(g, out)
        if args.command == "validate":
            return _validate(g, out)
    except UnknownToken as exc:
        print("efog: %s" % exc, file=err)
        return 1
    except (OSError, GrammarError, CapExceeded, ValueError) as exc:
        print("efog: %s" % exc, file=err)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
