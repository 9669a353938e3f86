"""CTL abstract syntax and a parser for the property language.

Grammar (whitespace-insensitive, precedence ``! > & > | > ->``, with ``->``
right-associative and the temporal operators binding like ``!``)::

    formula := "AF" f | "AG" f | "EF" f | "EG" f | "AX" f | "EX" f
             | "E[" f "U" f "]" | "A[" f "U" f "]"
             | f ("&" | "|" | "/" | "->") f | "!" f | "(" f ")" | atom
    atom    := "leader(" idx ")" | "vid(" idx ")=" int
             | "mode(" idx ")=" ("active" | "relay") | "quiescent"
             | "true" | "false"

``/`` is accepted as an alias of ``|``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Optional

from ..errors import FormulaSyntaxError, IndexOutOfRange
from ..graph import Prop
from ..protocol import IsLeader, Mode, ModeIs, Quiescent, VidEquals


class Formula:
    pass


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Atomic(Formula):
    atom: object

    def __str__(self):
        return str(self.atom)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula
    symbol = "?"

    def __str__(self):
        return f"{_wrap(self.left)} {self.symbol} {_wrap(self.right)}"


class And(_Binary):
    symbol = "&"


class Or(_Binary):
    symbol = "|"


class Implies(_Binary):
    symbol = "->"


@dataclass(frozen=True)
class _Unary(Formula):
    arg: Formula
    op = "?"

    def __str__(self):
        return f"{self.op} {_wrap(self.arg)}"


class EX(_Unary):
    op = "EX"


class AX(_Unary):
    op = "AX"


class EF(_Unary):
    op = "EF"


class AF(_Unary):
    op = "AF"


class EG(_Unary):
    op = "EG"


class AG(_Unary):
    op = "AG"


@dataclass(frozen=True)
class EU(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"E[{self.left} U {self.right}]"


@dataclass(frozen=True)
class AU(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"A[{self.left} U {self.right}]"


def _wrap(f: Formula) -> str:
    if isinstance(f, (Const, Atomic, EU, AU)):
        return str(f)
    return f"({f})"


TRUE = Const(True)
FALSE = Const(False)


def atom(a) -> Atomic:
    return Atomic(a)


def disjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(Or, parts) if parts else FALSE


def conjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(And, parts) if parts else TRUE


def flatten(f: Formula, kind: type) -> List[Formula]:
    """Operands of a left- or right-nested chain of ``kind``."""
    if isinstance(f, kind):
        return flatten(f.left, kind) + flatten(f.right, kind)
    return [f]


# Parser.

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>->|[()\[\]&|/!=]))"
)
_UNARY = {"AF": AF, "AG": AG, "EF": EF, "EG": EG, "AX": AX, "EX": EX}


class _Parser:
    def __init__(self, text: str, n: Optional[int], props: bool):
        self.text = text
        self.n = n
        self.props = props
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                rest = len(text) - len(text[pos:].lstrip())
                if rest < len(text):
                    raise FormulaSyntaxError("unexpected character", text, rest)
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def advance(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message, pos=None):
        raise FormulaSyntaxError(message, self.text, self.peek()[2] if pos is None else pos)

    def expect(self, value):
        kind, val, pos = self.advance()
        if val != value:
            raise FormulaSyntaxError(f"expected {value!r}", self.text, pos)

    def parse(self) -> Formula:
        f = self.implies()
        if self.peek()[0] is not None:
            self.fail("unexpected token")
        return f

    def implies(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.advance()
            return Implies(left, self.implies())
        return left

    def disj(self):
        f = self.conj()
        while self.peek()[1] in ("|", "/"):
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek()[1] == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.advance()
            return Not(self.unary())
        if kind == "word" and val in _UNARY:
            self.advance()
            return _UNARY[val](self.unary())
        if kind == "word" and val in ("E", "A") and self._next_is("["):
            self.advance()
            self.advance()
            left = self.implies()
            self.expect("U")
            right = self.implies()
            self.expect("]")
            return EU(left, right) if val == "E" else AU(left, right)
        return self.primary()

    def _next_is(self, value):
        return self.i + 1 < len(self.tokens) and self.tokens[self.i + 1][1] == value

    def primary(self):
        kind, val, pos = self.advance()
        if val == "(":
            f = self.implies()
            self.expect(")")
            return f
        if kind != "word":
            raise FormulaSyntaxError("expected a formula", self.text, pos)
        if val == "true":
            return TRUE
        if val == "false":
            return FALSE
        if val == "quiescent":
            return Atomic(Quiescent())
        if val == "leader":
            return Atomic(IsLeader(self.index()))
        if val == "vid":
            node = self.index()
            self.expect("=")
            return Atomic(VidEquals(node, self.integer()))
        if val == "mode":
            node = self.index()
            self.expect("=")
            k, word, p = self.advance()
            if word not in ("active", "relay"):
                raise FormulaSyntaxError("expected 'active' or 'relay'", self.text, p)
            return Atomic(ModeIs(node, Mode.ACTIVE if word == "active" else Mode.RELAY))
        if self.props:
            return Atomic(Prop(val))
        raise FormulaSyntaxError(f"unknown atom {val!r}", self.text, pos)

    def integer(self):
        kind, val, pos = self.advance()
        if kind != "num":
            raise FormulaSyntaxError("expected an integer", self.text, pos)
        return int(val)

    def index(self):
        self.expect("(")
        pos = self.peek()[2]
        idx = self.integer()
        self.expect(")")
        if self.n is not None and not 0 <= idx < self.n:
            raise IndexOutOfRange(f"node index {idx} at position {pos} outside [0, {self.n - 1}]")
        return idx


def parse_formula(text: str, n: Optional[int] = None, props: bool = False) -> Formula:
    """Parse ``text``; node indices are checked against ring size ``n``.

    With ``props=True`` unknown bare identifiers become :class:`Prop` atoms,
    which is how formulas over hand-built graphs are written.
    """
    return _Parser(text, n, props).parse()
