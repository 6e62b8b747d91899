"""Recursive-descent parser for the concrete formula syntax.

Grammar (``~`` binds tightest, then ``&``, ``|``, ``->``, ``<->``)::

    f ::= true | false | name(t,...) | t = t | t < t | Upper(t) | C[m,r](Upper)
        | ~f | f & f | f | f | f -> f | f <-> f | (f)
        | ex v . f | all v . f | EX V . f | ALL V . f | ex[m] v . f | ex[m,r] v . f

Quantifier bodies extend as far right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    And, Card, CountExists, Eq, Exists, Forall, Formula, Iff, Implies, Less, Member,
    Not, Or, Rel, SetExists, SetForall, Top,
)

__all__ = ["FormulaSyntaxError", "Vocabulary", "parse_formula"]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Vocabulary:
    """Relation arities known to the parser; ``None`` accepts any relation."""

    relations: dict | None = None

    @classmethod
    def of(cls, structure=None, **extra_relations) -> "Vocabulary":
        rels = dict(structure.vocabulary["relations"]) if structure is not None else {}
        rels.update(extra_relations)
        return cls(rels)


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[~&|=<().,\[\]])
""", re.VERBOSE)

_KEYWORDS = {"true", "false", "ex", "all", "EX", "ALL"}


class _Parser:
    def __init__(self, text: str, vocabulary: Vocabulary | None):
        self.text = text
        self.vocab = vocabulary or Vocabulary()
        self.arities: dict[str, int] = {}
        self.tokens = list(self._lex(text))
        self.i = 0

    def _lex(self, text):
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", *self._lc(pos))
            kind = m.lastgroup
            if kind != "ws":
                yield kind, m.group(), pos
            pos = m.end()
        yield "eof", "", len(text)

    def _lc(self, offset):
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    # token helpers
    def peek(self, k=0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(message, *self._lc(tok[2]))

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        return self.advance()

    def accept(self, value):
        if self.peek()[1] == value:
            return self.advance()
        return None

    # grammar
    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self):
        left = self.imp()
        while (tok := self.accept("<->")):
            left = Iff(left, self.imp(), pos=self._lc(tok[2]))
        return left

    def imp(self):
        left = self.disj()
        if (tok := self.accept("->")):
            return Implies(left, self.imp(), pos=self._lc(tok[2]))
        return left

    def disj(self):
        left = self.conj()
        while (tok := self.accept("|")):
            left = Or(left, self.conj(), pos=self._lc(tok[2]))
        return left

    def conj(self):
        left = self.unary()
        while (tok := self.accept("&")):
            left = And(left, self.unary(), pos=self._lc(tok[2]))
        return left

    def unary(self):
        tok = self.peek()
        pos = self._lc(tok[2])
        if tok[1] == "~":
            self.advance()
            return Not(self.unary(), pos=pos)
        if tok[0] == "name" and tok[1] in ("ex", "all", "EX", "ALL"):
            return self.quantifier()
        return self.atom()

    def quantifier(self):
        tok = self.advance()
        pos = self._lc(tok[2])
        kw = tok[1]
        if kw == "ex" and self.peek()[1] == "[":
            self.advance()
            m = self.number()
            r = 0
            if self.accept(","):
                r = self.number()
            self.expect("]")
            self._check_bounds(m, r, tok)
            var = self.variable(upper=False)
            self.expect(".")
            return CountExists(m, r, var, self.iff(), pos=pos)
        upper = kw in ("EX", "ALL")
        var = self.variable(upper=upper)
        self.expect(".")
        body = self.iff()
        cls = {"ex": Exists, "all": Forall, "EX": SetExists, "ALL": SetForall}[kw]
        return cls(var, body, pos=pos)

    def _check_bounds(self, m, r, tok):
        if m < 1 or not 0 <= r < m:
            raise self.error(f"counting bounds need 1 <= m and 0 <= r < m, got m={m}, r={r}", tok)

    def number(self):
        tok = self.peek()
        if tok[0] != "num":
            raise self.error("expected a number")
        self.advance()
        return int(tok[1])

    def variable(self, upper: bool):
        tok = self.peek()
        if tok[0] != "name" or tok[1] in _KEYWORDS:
            raise self.error("expected a variable")
        if tok[1][0].isupper() != upper:
            kind = "set" if upper else "element"
            raise self.error(f"{tok[1]!r} is not a valid {kind} variable name")
        self.advance()
        return tok[1]

    def term(self):
        return self.variable(upper=False)

    def atom(self):
        tok = self.peek()
        pos = self._lc(tok[2])
        if tok[1] == "(":
            self.advance()
            f = self.iff()
            self.expect(")")
            return f
        if tok[0] != "name":
            raise self.error(f"unexpected {tok[1] or 'end of input'!r}")
        name = tok[1]
        if name == "true":
            self.advance()
            return Top(True, pos=pos)
        if name == "false":
            self.advance()
            return Top(False, pos=pos)
        if name == "C" and self.peek(1)[1] == "[":
            self.advance()
            self.advance()
            m = self.number()
            self.expect(",")
            r = self.number()
            self.expect("]")
            self._check_bounds(m, r, tok)
            self.expect("(")
            x = self.variable(upper=True)
            self.expect(")")
            return Card(m, r, x, pos=pos)
        if self.peek(1)[1] == "(":
            self.advance()
            self.advance()
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
            rels = self.vocab.relations
            if name[0].isupper() and len(args) == 1 and (rels is None or name not in rels):
                return Member(name, args[0], pos=pos)
            if rels is not None:
                if name not in rels:
                    raise FormulaSyntaxError(f"unknown relation {name!r}", *pos)
                if rels[name] != len(args):
                    raise FormulaSyntaxError(
                        f"relation {name!r} has arity {rels[name]}, got {len(args)} arguments", *pos)
            seen = self.arities.setdefault(name, len(args))
            if seen != len(args):
                raise FormulaSyntaxError(
                    f"relation {name!r} used with {seen} and {len(args)} arguments", *pos)
            return Rel(name, tuple(args), pos=pos)
        left = self.term()
        op = self.peek()
        if op[1] == "=":
            self.advance()
            return Eq(left, self.term(), pos=pos)
        if op[1] == "<":
            self.advance()
            return Less(left, self.term(), pos=pos)
        raise self.error(f"expected '=' or '<' after {left!r}", op)


def parse_formula(text: str, vocabulary: Vocabulary | dict | None = None) -> Formula:
    """Parse ``text``; ``vocabulary`` (relation name -> arity) enables arity checks."""
    if isinstance(vocabulary, dict):
        vocabulary = Vocabulary(vocabulary)
    return _Parser(text, vocabulary).parse()
