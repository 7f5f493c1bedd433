"""Parser and pretty-printer for the `.mvdl` textual format.

Grammar (line comments start with `%`):

    fact   :=  [degree '::'] atom '.'          degree defaults to 1
    rule   :=  atom ':-' atom (',' atom)* '.'
    degree :=  NUMBER | INT '/' INT            decimals parse exactly
    atom   :=  ident ['(' term (',' term)* ')']
    term   :=  ident | VARIABLE | NUMBER

Identifiers starting lowercase are constants/predicates, starting
uppercase are variables. Head variables absent from the body are
existentially quantified unless strict mode is on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .core import (
    ONE,
    Atom,
    Constant,
    DomainError,
    FuzzyDatabase,
    Program,
    Rule,
    Term,
    Variable,
    as_degree,
    infer_signature,
    make_rule,
)


class ParseError(ValueError):
    """Malformed syntax; always carries a source location."""

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        where = f"line {line}, column {column}"
        shown = f" near {token!r}" if token else ""
        super().__init__(f"{message} ({where}{shown})")


class SafetyError(ValueError):
    """A head variable does not occur in the body (strict mode only)."""


class NonGroundQuery(ValueError):
    """A query atom contains variables."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+)
    | (?P<COMMENT>%[^\n]*)
    | (?P<NUMBER>\d+(?:\.\d+)?)
    | (?P<IDENT>[a-z][A-Za-z0-9_']*)
    | (?P<VAR>[A-Z_][A-Za-z0-9_]*)
    | (?P<IMPLIEDBY>:-)
    | (?P<DEGSEP>::)
    | (?P<LPAREN>\()
    | (?P<RPAREN>\))
    | (?P<COMMA>,)
    | (?P<DOT>\.)
    | (?P<SLASH>/)
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup or ""
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, value, line, m.start() - line_start + 1))
        line += value.count("\n")
        if "\n" in value:
            line_start = m.start() + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class FactStatement:
    degree: Fraction
    atom: Atom
    line: int
    column: int


@dataclass(frozen=True)
class RuleStatement:
    head: Atom
    body: tuple[Atom, ...]
    line: int
    column: int


Statement = Union[FactStatement, RuleStatement]


@dataclass(frozen=True)
class SourceFile:
    """The ordered statements of one parsed text."""

    statements: tuple[Statement, ...]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}", tok.line, tok.column, tok.text)
        return self.next()

    def fail(self, message: str) -> None:
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column, tok.text)

    def source_file(self) -> SourceFile:
        statements: list[Statement] = []
        while self.peek().kind != "EOF":
            statements.append(self.statement())
        return SourceFile(tuple(statements))

    def statement(self) -> Statement:
        start = self.peek()
        if start.kind == "NUMBER":
            degree = self.degree()
            self.expect("DEGSEP")
            a = self.atom()
            self.expect("DOT")
            return FactStatement(degree, a, start.line, start.column)
        if start.kind != "IDENT":
            self.fail("expected a fact or rule")
        head = self.atom()
        if self.peek().kind == "IMPLIEDBY":
            self.next()
            body = [self.atom()]
            while self.peek().kind == "COMMA":
                self.next()
                body.append(self.atom())
            self.expect("DOT")
            return RuleStatement(head, tuple(body), start.line, start.column)
        self.expect("DOT")
        return FactStatement(ONE, head, start.line, start.column)

    def degree(self) -> Fraction:
        first = self.expect("NUMBER")
        if self.peek().kind == "SLASH":
            self.next()
            second = self.expect("NUMBER")
            if "." in first.text or "." in second.text:
                raise ParseError(
                    "fraction degrees must be integer/integer", first.line, first.column, first.text
                )
            if second.text == "0":
                raise ParseError("zero denominator", second.line, second.column, second.text)
            return Fraction(int(first.text), int(second.text))
        # Fraction parses decimal strings exactly (no float intermediate).
        return Fraction(first.text)

    def atom(self) -> Atom:
        name = self.expect("IDENT")
        if self.peek().kind != "LPAREN":
            return Atom(name.text)
        self.next()
        args = [self.term()]
        while self.peek().kind == "COMMA":
            self.next()
            args.append(self.term())
        self.expect("RPAREN")
        return Atom(name.text, tuple(args))

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "IDENT" or tok.kind == "NUMBER":
            self.next()
            return Constant(tok.text)
        if tok.kind == "VAR":
            self.next()
            return Variable(tok.text)
        self.fail("expected a term")
        raise AssertionError("unreachable")


def parse_source(text: str) -> SourceFile:
    """Tokenize and parse one text into its statement list."""
    return _Parser(tokenize(text)).source_file()


def _assemble(
    statements: Sequence[Statement], *, strict: bool = False
) -> tuple[Program, FuzzyDatabase]:
    facts: dict[Atom, Fraction] = {}
    rules: list[Rule] = []
    for stmt in statements:
        if isinstance(stmt, FactStatement):
            if not stmt.atom.is_ground():
                raise ParseError("facts must be ground", stmt.line, stmt.column, str(stmt.atom))
            degree = as_degree(stmt.degree, positive=True)
            known = facts.get(stmt.atom)
            if known is not None and known != degree:
                raise DomainError(
                    f"conflicting degrees {known} and {degree} for fact {stmt.atom} "
                    f"(line {stmt.line})"
                )
            facts[stmt.atom] = degree
        else:
            body_vars = set().union(*(a.variables() for a in stmt.body))
            loose = stmt.head.variables() - body_vars
            if strict and loose:
                raise SafetyError(
                    f"head variables {sorted(loose)} do not occur in the body "
                    f"(line {stmt.line}): {stmt.head}"
                )
            rules.append(make_rule(len(rules), stmt.body, stmt.head))
    all_atoms = [a for r in rules for a in (*r.body, r.head)] + list(facts)
    infer_signature(all_atoms)
    return Program.from_rules(rules, extra_atoms=list(facts)), FuzzyDatabase(facts)


def parse(text: str, *, strict: bool = False) -> tuple[Program, FuzzyDatabase]:
    """Parse one `.mvdl` text into a program and fuzzy database."""
    return _assemble(parse_source(text).statements, strict=strict)


def parse_many(texts: Iterable[str], *, strict: bool = False) -> tuple[Program, FuzzyDatabase]:
    """Parse and merge several texts; conflicting duplicate facts are errors."""
    statements: list[Statement] = []
    for text in texts:
        statements.extend(parse_source(text).statements)
    return _assemble(statements, strict=strict)


def parse_ground_atom(text: str) -> Atom:
    """Parse a single ground atom, e.g. a query argument."""
    parser = _Parser(tokenize(text))
    a = parser.atom()
    tok = parser.peek()
    if tok.kind == "DOT":
        parser.next()
        tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError("trailing input after atom", tok.line, tok.column, tok.text)
    if not a.is_ground():
        raise NonGroundQuery(f"query atom must be ground: {a}")
    return a


def format_instance(program: Program, database: FuzzyDatabase) -> str:
    """Canonical text: facts sorted by predicate then arguments, rules in order.

    parse(format_instance(p, d)) is structurally identical to (p, d) for
    parser-produced instances (rule ids are positional).
    """
    lines = []
    for a in sorted(database.entries, key=Atom.sort_key):
        lines.append(f"{database.entries[a]} :: {a}.")
    for r in program.rules:
        lines.append(f"{r.head} :- {', '.join(str(b) for b in r.body)}.")
    return "\n".join(lines) + ("\n" if lines else "")
