"""Grammars shipped with the package."""

from importlib import resources

from .grammar import Grammar, read_grammar

NAMES = ("latin", "bulgarian", "universal20", "nonecpo", "ecpo")


def fixture_text(name: str) -> str:
    return resources.files("efog").joinpath("grammars", name + ".efog").read_text(encoding="utf-8")


def fixture_path(name: str):
    return resources.files("efog").joinpath("grammars", name + ".efog")


def load_fixture(name: str) -> Grammar:
    return read_grammar(fixture_text(name))
