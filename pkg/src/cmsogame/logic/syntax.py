"""Formula AST for MSO with cardinality predicates and modulo-counting quantifiers.

Nodes are frozen dataclasses; the optional ``pos`` field records the
``(line, column)`` a node was parsed from and is ignored by equality.
Lowercase names are element variables, capitalised names are set variables
(or set predicates of the structure).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Callable, Iterable, Iterator

from ..structures import lcm_of

Pos = tuple[int, int] | None


class Formula:
    """Base class of all formula nodes."""

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return render(self)

    def children(self) -> tuple["Formula", ...]:
        return ()


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True, eq=True)
class Top(Formula):
    value: bool
    pos: Pos = _pos()


@dataclass(frozen=True)
class Rel(Formula):
    """Relation atom ``name(args)``."""

    name: str
    args: tuple[str, ...]
    pos: Pos = _pos()


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Less(Formula):
    """``left < right`` under the linear order of the structure."""

    left: str
    right: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Member(Formula):
    """``X(x)``: membership in a set variable or set predicate."""

    set_name: str
    term: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Card(Formula):
    """``C[m,r](X)``: ``|X| = r (mod m)``."""

    modulus: int
    remainder: int
    set_name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Not(Formula):
    body: Formula
    pos: Pos = _pos()

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula
    pos: Pos = _pos()

    def children(self):
        return (self.left, self.right)


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Iff(_Binary):
    pass


@dataclass(frozen=True)
class _Quant(Formula):
    var: str
    body: Formula
    pos: Pos = _pos()

    def children(self):
        return (self.body,)


class Exists(_Quant):
    pass


class Forall(_Quant):
    pass


class SetExists(_Quant):
    pass


class SetForall(_Quant):
    pass


@dataclass(frozen=True)
class CountExists(Formula):
    """``ex[m,r] x . body``: the number of witnesses is ``r`` modulo ``m``."""

    modulus: int
    remainder: int
    var: str
    body: Formula
    pos: Pos = _pos()

    def children(self):
        return (self.body,)


TRUE = Top(True)
FALSE = Top(False)

QUANTIFIERS = (Exists, Forall, SetExists, SetForall, CountExists)


# --- construction helpers ------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(And, parts) if parts else TRUE


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    return reduce(Or, parts) if parts else FALSE


def leq(x: str, y: str) -> Formula:
    return Or(Less(x, y), Eq(x, y))


def strip_positions(f: Formula) -> Formula:
    return map_children(replace(f, pos=None), strip_positions)


def map_children(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    if isinstance(f, Not):
        return replace(f, body=fn(f.body))
    if isinstance(f, _Binary):
        return replace(f, left=fn(f.left), right=fn(f.right))
    if isinstance(f, (_Quant, CountExists)):
        return replace(f, body=fn(f.body))
    return f


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    for c in f.children():
        yield from walk(c)


# --- syntactic measures ----------------------------------------------------------

def quantifier_rank(f: Formula) -> int:
    """Nesting depth of quantifiers; every quantifier kind counts one."""
    inner = max((quantifier_rank(c) for c in f.children()), default=0)
    return inner + 1 if isinstance(f, QUANTIFIERS) else inner


def moduli(f: Formula) -> frozenset[int]:
    return frozenset(g.modulus for g in walk(f) if isinstance(g, (Card, CountExists)))


def qr_and_moduli(f: Formula) -> tuple[int, frozenset[int]]:
    return quantifier_rank(f), moduli(f)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def uses_order(f: Formula) -> bool:
    return any(isinstance(g, Less) for g in walk(f))


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Top):
        return frozenset()
    if isinstance(f, Rel):
        return frozenset(f.args)
    if isinstance(f, (Eq, Less)):
        return frozenset((f.left, f.right))
    if isinstance(f, Member):
        return frozenset((f.set_name, f.term))
    if isinstance(f, Card):
        return frozenset((f.set_name,))
    if isinstance(f, (_Quant, CountExists)):
        return free_variables(f.body) - {f.var}
    out = frozenset()
    for c in f.children():
        out |= free_variables(c)
    return out


def all_names(f: Formula) -> set[str]:
    names = set()
    for g in walk(f):
        if isinstance(g, Rel):
            names.update(g.args)
            names.add(g.name)
        elif isinstance(g, (Eq, Less)):
            names.update((g.left, g.right))
        elif isinstance(g, Member):
            names.update((g.set_name, g.term))
        elif isinstance(g, Card):
            names.add(g.set_name)
        elif isinstance(g, (_Quant, CountExists)):
            names.add(g.var)
    return names


class FreshNames:
    """Generates names avoiding a fixed set of taken names."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)

    def __call__(self, stem: str) -> str:
        if stem not in self.taken:
            self.taken.add(stem)
            return stem
        for i in itertools.count(1):
            name = f"{stem}{i}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def substitute(f: Formula, mapping: dict[str, str]) -> Formula:
    """Capture-avoiding renaming of free variables."""
    if not mapping:
        return f
    if isinstance(f, Rel):
        return replace(f, args=tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, (Eq, Less)):
        return replace(f, left=mapping.get(f.left, f.left), right=mapping.get(f.right, f.right))
    if isinstance(f, Member):
        return replace(f, set_name=mapping.get(f.set_name, f.set_name),
                       term=mapping.get(f.term, f.term))
    if isinstance(f, Card):
        return replace(f, set_name=mapping.get(f.set_name, f.set_name))
    if isinstance(f, (_Quant, CountExists)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        if f.var in inner.values():
            fresh = FreshNames(all_names(f) | set(inner.values()) | set(inner))
            new = fresh(f.var)
            body = substitute(f.body, {f.var: new})
            return replace(f, var=new, body=substitute(body, inner))
        return replace(f, body=substitute(f.body, inner))
    return map_children(f, lambda c: substitute(c, mapping))


def is_set_name(name: str) -> bool:
    return name[:1].isupper()


# --- rendering -------------------------------------------------------------------

# binding strength; quantifiers bind weakest because their bodies extend right
_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _level(f: Formula) -> int:
    if isinstance(f, (_Quant, CountExists)):
        return 0
    return _LEVEL.get(type(f), 6)


def render(f: Formula) -> str:
    """Concrete syntax accepted by :func:`parse_formula`, with minimal parentheses."""
    if isinstance(f, Top):
        return "true" if f.value else "false"
    if isinstance(f, Rel):
        return f"{f.name}({','.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Less):
        return f"{f.left} < {f.right}"
    if isinstance(f, Member):
        return f"{f.set_name}({f.term})"
    if isinstance(f, Card):
        return f"C[{f.modulus},{f.remainder}]({f.set_name})"
    if isinstance(f, Not):
        body = render(f.body)
        return "~" + (body if _level(f.body) == 6 else f"({body})")
    if isinstance(f, _Binary):
        lvl = _LEVEL[type(f)]
        left, right = render(f.left), render(f.right)
        # -> associates to the right, the other connectives to the left
        right_assoc = isinstance(f, Implies)
        ll, rl = _level(f.left), _level(f.right)
        if ll == 0 or ll < lvl or (right_assoc and ll == lvl):
            left = f"({left})"
        if rl == 0 or rl < lvl or (not right_assoc and rl == lvl):
            right = f"({right})"
        return f"{left} {_OPS[type(f)]} {right}"
    if isinstance(f, CountExists):
        head = f"ex[{f.modulus}]" if f.remainder == 0 else f"ex[{f.modulus},{f.remainder}]"
        return f"{head} {f.var} . {render(f.body)}"
    if isinstance(f, _Quant):
        kw = {Exists: "ex", Forall: "all", SetExists: "EX", SetForall: "ALL"}[type(f)]
        return f"{kw} {f.var} . {render(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def ModSet(ms: Iterable[int] = ()) -> frozenset[int]:
    """A validated finite set of positive moduli."""
    out = frozenset(int(m) for m in ms)
    if any(m < 1 for m in out):
        raise ValueError(f"moduli must be positive: {sorted(out)}")
    return out


def lcm(ms: Iterable[int]) -> int:
    return lcm_of(ms)
