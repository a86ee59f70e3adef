"""Proposition AST, recursive-descent parser and printer.

Grammar::

    prop  := or
    or    := and ( "OR" and )*
    and   := unary ( "AND" unary )*
    unary := "NOT" unary | "(" prop ")" | atom
    atom  := "X" "(" label "," time ")"

Keywords are upper case.  Labels are bare identifiers (letters, digits and
``_ @ . -``, not starting with a digit or sign) or double-quoted strings
with ``\\"`` and ``\\\\`` escapes.  Times are decimal literals.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

from ..errors import PropositionSyntaxError

KEYWORDS = frozenset({"NOT", "AND", "OR"})


@dataclass(frozen=True)
class Atom:
    """"My experience at time `time` is `label`"."""

    label: str
    time: float

    def __post_init__(self):
        if not self.label:
            raise ValueError("atom label must be nonempty")
        if not math.isfinite(self.time):
            raise ValueError(f"atom time must be finite, got {self.time}")
        object.__setattr__(self, "time", float(self.time))


@dataclass(frozen=True)
class Not:
    operand: "Proposition"


@dataclass(frozen=True)
class And:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Or:
    left: "Proposition"
    right: "Proposition"


Proposition = Union[Atom, Not, And, Or]


def atoms(p: Proposition) -> Iterator[Atom]:
    if isinstance(p, Atom):
        yield p
    elif isinstance(p, Not):
        yield from atoms(p.operand)
    else:
        yield from atoms(p.left)
        yield from atoms(p.right)


# --- lexer ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_@.\-]*)
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_@.\-]*\Z")


@dataclass(frozen=True)
class _Token:
    kind: str  # "string", "number", "ident", "keyword", "(", ")", ",", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise PropositionSyntaxError("unterminated string", text, pos)
            raise PropositionSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        tok = m.group()
        if kind == "punct":
            kind = tok
        elif kind == "ident" and tok in KEYWORDS:
            kind = "keyword"
        if kind != "ws":
            out.append(_Token(kind, tok, pos))
        pos = m.end()
    out.append(_Token("end", "", len(text)))
    return out


def _unescape(quoted: str) -> str:
    return re.sub(r"\\(.)", r"\1", quoted[1:-1])


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.toks[self.i]

    def error(self, expected: str) -> PropositionSyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        return PropositionSyntaxError(f"expected {expected}, found {found}", self.text, t.pos)

    def expect(self, kind: str, what: str | None = None) -> _Token:
        if self.tok.kind != kind:
            raise self.error(what or repr(kind))
        t = self.tok
        self.i += 1
        return t

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "keyword" and self.tok.text == word

    def parse(self) -> Proposition:
        if self.tok.kind == "end":
            raise PropositionSyntaxError("empty proposition", self.text, 0)
        p = self.disjunction()
        if self.tok.kind != "end":
            raise self.error("AND, OR or end of input")
        return p

    def disjunction(self) -> Proposition:
        p = self.conjunction()
        while self.at_keyword("OR"):
            self.i += 1
            p = Or(p, self.conjunction())
        return p

    def conjunction(self) -> Proposition:
        p = self.unary()
        while self.at_keyword("AND"):
            self.i += 1
            p = And(p, self.unary())
        return p

    def unary(self) -> Proposition:
        t = self.tok
        if self.at_keyword("NOT"):
            self.i += 1
            return Not(self.unary())
        if t.kind == "(":
            self.i += 1
            p = self.disjunction()
            self.expect(")", "')'")
            return p
        if t.kind == "ident" and t.text == "X":
            return self.atom()
        raise self.error("NOT, '(' or an atom X(label, time)")

    def atom(self) -> Atom:
        self.i += 1
        self.expect("(", "'(' after X")
        t = self.tok
        if t.kind == "ident":
            label = t.text
        elif t.kind == "string":
            label = _unescape(t.text)
            if not label:
                raise PropositionSyntaxError("empty label", self.text, t.pos)
        else:
            raise self.error("a label")
        self.i += 1
        self.expect(",", "','")
        t = self.expect("number", "a decimal time")
        time = float(t.text)
        if not math.isfinite(time):
            raise PropositionSyntaxError("time must be finite", self.text, t.pos)
        self.expect(")", "')'")
        return Atom(label, time)


def parse(text: str) -> Proposition:
    """Parse proposition text; raises PropositionSyntaxError with a character position."""
    return _Parser(text).parse()


# --- printer ----------------------------------------------------------------

def _label_text(label: str) -> str:
    if _IDENT_RE.match(label) and label not in KEYWORDS:
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


_LEVEL = {Or: 0, And: 1, Not: 2, Atom: 3}


def to_text(p: Proposition) -> str:
    """Canonical text with the fewest parentheses that re-parse to the same tree."""
    if isinstance(p, Atom):
        return f"X({_label_text(p.label)}, {p.time!r})"
    if isinstance(p, Not):
        inner = to_text(p.operand)
        return "NOT " + (f"({inner})" if _LEVEL[type(p.operand)] < _LEVEL[Not] else inner)
    op = "OR" if isinstance(p, Or) else "AND"
    level = _LEVEL[type(p)]
    left, right = to_text(p.left), to_text(p.right)
    if _LEVEL[type(p.left)] < level:
        left = f"({left})"
    # left-associative: an equal-precedence right operand needs parentheses
    if _LEVEL[type(p.right)] <= level:
        right = f"({right})"
    return f"{left} {op} {right}"
