"""Boolean query language: AST, parser, renderer and structural expansion.

Grammar (AND binds tighter than OR, adjacency of atoms is an implicit AND)::

    expr  := or
    or    := and ("OR" and)*
    and   := atom (["AND"] atom)*
    atom  := "(" expr ")" | '"' phrase '"' | term ["*"]

Keywords are case-insensitive. Terms are lowercased; a trailing ``*`` marks
prefix truncation. Phrase text keeps its spacing and case and is matched
case-insensitively downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Term:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty term")


@dataclass(frozen=True)
class PrefixTerm:
    stem: str

    def __post_init__(self):
        if not self.stem:
            raise ValueError("empty prefix stem")


@dataclass(frozen=True)
class Phrase:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty phrase")


@dataclass(frozen=True)
class And:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("And needs at least 2 children")


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Or needs at least 2 children")


QueryAst = Term | PrefixTerm | Phrase | And | Or

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<phrase>"(?P<phrase_text>[^"]*)")
      | (?P<word>[^\s()"*]+)(?P<star>\*)?
      | (?P<bad>\*)
    )""",
    re.VERBOSE,
)


def _lex(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group("bad") is not None:
            raise QuerySyntaxError("unexpected '*'", m.start("bad"))
        if m.group("lparen"):
            tokens.append(("(", "(", m.start("lparen")))
        elif m.group("rparen"):
            tokens.append((")", ")", m.start("rparen")))
        elif m.group("phrase") is not None:
            tokens.append(("phrase", m.group("phrase_text"), m.start("phrase")))
        elif m.group("word") is not None:
            word = m.group("word")
            start = m.start("word")
            if m.group("star"):
                tokens.append(("prefix", word, start))
            elif word.upper() == "AND":
                tokens.append(("AND", word, start))
            elif word.upper() == "OR":
                tokens.append(("OR", word, start))
            else:
                tokens.append(("term", word, start))
        pos = m.end()
    rest = text[pos:].strip()
    if rest:
        if rest.startswith('"'):
            raise QuerySyntaxError("unterminated phrase", pos + text[pos:].index('"'))
        raise QuerySyntaxError(f"cannot tokenize {rest!r}", pos)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _lex(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message: str):
        tok = self.peek()
        pos = tok[2] if tok else len(self.text)
        raise QuerySyntaxError(message, pos)

    def parse(self) -> QueryAst:
        node = self.parse_or()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def parse_or(self) -> QueryAst:
        children = [self.parse_and()]
        while self.peek() and self.peek()[0] == "OR":
            self.i += 1
            children.append(self.parse_and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def parse_and(self) -> QueryAst:
        children = [self.parse_atom()]
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok[0] == "AND":
                self.i += 1
                children.append(self.parse_atom())
            elif tok[0] in ("term", "prefix", "phrase", "("):
                # bare adjacency is an implicit AND
                children.append(self.parse_atom())
            else:
                break
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_atom(self) -> QueryAst:
        tok = self.peek()
        if tok is None:
            self.error("dangling operator")
        kind, value, pos = tok
        if kind == "(":
            self.i += 1
            node = self.parse_or()
            closing = self.peek()
            if closing is None or closing[0] != ")":
                raise QuerySyntaxError("unbalanced parenthesis", pos)
            self.i += 1
            return node
        if kind == "phrase":
            if not value.strip():
                raise QuerySyntaxError("empty phrase", pos)
            self.i += 1
            return Phrase(value.lower())
        if kind == "term":
            self.i += 1
            return Term(value.lower())
        if kind == "prefix":
            self.i += 1
            return PrefixTerm(value.lower())
        if kind in ("AND", "OR"):
            self.error(f"dangling operator {value!r}")
        self.error(f"unexpected {value!r}")


def parse_query(text: str) -> QueryAst:
    """Parse a boolean query string into its AST."""
    if not text or not text.strip():
        raise QuerySyntaxError("empty query", 0)
    return _Parser(text).parse()


def render_query(ast: QueryAst) -> str:
    """Render an AST in canonical form; parse(render(ast)) == ast.

    Composite children are always parenthesized, so the structure survives
    re-parsing even for nested Or-in-Or trees.
    """
    if isinstance(ast, Term):
        return ast.text
    if isinstance(ast, PrefixTerm):
        return ast.stem + "*"
    if isinstance(ast, Phrase):
        return f'"{ast.text}"'
    if isinstance(ast, (And, Or)):
        sep = " AND " if isinstance(ast, And) else " OR "
        parts = []
        for child in ast.children:
            rendered = render_query(child)
            if isinstance(child, (And, Or)):
                rendered = f"({rendered})"
            parts.append(rendered)
        return sep.join(parts)
    raise TypeError(f"not a query node: {ast!r}")


def expand_query(ast: QueryAst, terms) -> QueryAst:
    """OR the given controlled terms onto a query.

    Terms are attached verbatim as phrase leaves, in the given order. An
    empty term list leaves the query untouched. The result set of the
    expanded query is always a superset of the original's.
    """
    terms = list(terms)
    if not terms:
        return ast
    return Or((ast, *[Phrase(t) for t in terms]))


def query_leaves(ast: QueryAst):
    """All Term / PrefixTerm / Phrase leaves, left to right."""
    if isinstance(ast, (And, Or)):
        for child in ast.children:
            yield from query_leaves(child)
    else:
        yield ast
