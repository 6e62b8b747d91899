"""Seeded random generation of formulas and small structures for property tests."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from ..structures import FiniteStructure
from .syntax import (
    And, Card, CountExists, Eq, Exists, Forall, Formula, Iff, Implies, Member, Not, Or,
    Rel, SetExists, SetForall, Top, quantifier_rank,
)

__all__ = ["FormulaGenerator", "random_structure", "sentence_corpus"]


class FormulaGenerator:
    """Random formulas of bounded quantifier rank over a fixed vocabulary.

    ``relations`` maps relation names to arities and ``predicates`` lists set
    predicate names. Counting constructs use moduli from ``moduli``; with an
    empty ``moduli`` the output is plain MSO. With ``counting_quantifiers``
    off, counting appears only in cardinality atoms, the logic the mod M game
    captures rank for rank (a counting quantifier costs two ranks there).
    """

    def __init__(self, relations: dict[str, int] | None = None,
                 predicates: Sequence[str] = (), moduli: Sequence[int] = (),
                 seed: int = 0, allow_remainders: bool = True,
                 counting_quantifiers: bool = True):
        self.relations = dict(relations or {})
        self.predicates = list(predicates)
        self.moduli = sorted(moduli)
        self.rng = random.Random(seed)
        self.allow_remainders = allow_remainders
        self.counting_quantifiers = counting_quantifiers
        self._counter = 0

    def _fresh(self, upper: bool) -> str:
        self._counter += 1
        return ("X" if upper else "x") + str(self._counter)

    def atom(self, elems: list[str], sets: list[str]) -> Formula:
        rng = self.rng
        choices = ["top"]
        if elems:
            choices += ["eq"] * 2
            if self.relations:
                choices += ["rel"] * 3
            if sets or self.predicates:
                choices += ["mem"] * 3
        if sets and self.moduli:
            choices += ["card"] * 2
        kind = rng.choice(choices)
        if kind == "top":
            return Top(rng.random() < 0.5)
        if kind == "eq":
            return Eq(rng.choice(elems), rng.choice(elems))
        if kind == "rel":
            name = rng.choice(sorted(self.relations))
            return Rel(name, tuple(rng.choice(elems) for _ in range(self.relations[name])))
        if kind == "mem":
            return Member(rng.choice(sets + self.predicates), rng.choice(elems))
        m = rng.choice(self.moduli)
        r = rng.randrange(m) if self.allow_remainders else 0
        return Card(m, r, rng.choice(sets))

    def formula(self, rank: int, elems: list[str] | None = None,
                sets: list[str] | None = None, depth: int = 0) -> Formula:
        """A formula with quantifier rank at most ``rank`` whose free variables come from the scope."""
        rng = self.rng
        elems = list(elems or [])
        sets = list(sets or [])
        roll = rng.random()
        if rank > 0 and roll < 0.55:
            kinds = ["ex", "all", "EX", "ALL"]
            if self.moduli and self.counting_quantifiers:
                kinds += ["count", "count"]
            kind = rng.choice(kinds)
            if kind in ("EX", "ALL"):
                v = self._fresh(True)
                body = self.formula(rank - 1, elems, sets + [v], depth + 1)
                return (SetExists if kind == "EX" else SetForall)(v, body)
            v = self._fresh(False)
            body = self.formula(rank - 1, elems + [v], sets, depth + 1)
            if kind == "count":
                m = rng.choice(self.moduli)
                r = rng.randrange(m) if self.allow_remainders else 0
                return CountExists(m, r, v, body)
            return (Exists if kind == "ex" else Forall)(v, body)
        if depth < 4 and roll < 0.85:
            op = rng.choice([And, Or, And, Or, Implies, Iff, Not])
            if op is Not:
                return Not(self.formula(rank, elems, sets, depth + 1))
            return op(self.formula(rank, elems, sets, depth + 1),
                      self.formula(rank, elems, sets, depth + 1))
        return self.atom(elems, sets)

    def sentence(self, rank: int, exact: bool = False) -> Formula:
        """A sentence of rank at most ``rank`` (exactly ``rank`` if ``exact``)."""
        while True:
            f = self.formula(rank)
            if not exact or quantifier_rank(f) == rank:
                return f


def sentence_corpus(count: int, rank: int, relations=None, predicates=(), moduli=(),
                    seed: int = 0, counting_quantifiers: bool = True) -> list[Formula]:
    """``count`` seeded sentences stratified over ranks ``0..rank``."""
    gen = FormulaGenerator(relations, predicates, moduli, seed,
                           counting_quantifiers=counting_quantifiers)
    out = []
    for i in range(count):
        out.append(gen.sentence(i % (rank + 1), exact=True))
    return out


def random_structure(n: int, rng: random.Random, relations: dict[str, int] | None = None,
                     predicates: Sequence[str] = (), density: float = 0.35) -> FiniteStructure:
    """A random structure with universe ``n`` over the given vocabulary."""
    rels = {}
    for name, arity in sorted((relations or {}).items()):
        rels[name] = (arity, {t for t in itertools.product(range(n), repeat=arity)
                              if rng.random() < density})
    preds = {name: rng.getrandbits(n) for name in predicates}
    return FiniteStructure(n, rels, preds)
