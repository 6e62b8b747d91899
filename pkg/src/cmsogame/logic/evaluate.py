"""Brute-force model checking of formulas on finite structures.

Set quantifiers range over all ``2**n`` subsets. Quantified subformulas are
memoised on the values of their free variables, which keeps formulas like the
grid divisibility sentence tractable without changing any result.

A chain of like set quantifiers over many bits is searched one element at a
time instead: each partial assignment is checked in three-valued logic and
abandoned once the body's value is already settled against the search. The
result is the same as plain enumeration (``prune=False``).
"""

from __future__ import annotations

from typing import Mapping

from ..structures import ElementSet, FiniteStructure, LinearOrder
from .syntax import (
    And, Card, CountExists, Eq, Exists, Forall, Formula, Iff, Implies, Less, Member,
    Not, Or, Rel, SetExists, SetForall, Top, free_variables,
)

__all__ = ["EvaluationError", "Evaluator", "evaluate"]


class EvaluationError(ValueError):
    pass


def _normalise(valuation: Mapping | None) -> dict:
    env = {}
    for name, value in (valuation or {}).items():
        if isinstance(value, ElementSet):
            value = value.mask
        elif isinstance(value, (set, frozenset, list, tuple)):
            mask = 0
            for e in value:
                mask |= 1 << e
            value = mask
        env[name] = value
    return env


class Evaluator:
    """Evaluates formulas on one structure (optionally with a linear order)."""

    def __init__(self, structure: FiniteStructure, order: LinearOrder | None = None,
                 memoize: bool = True, prune: bool = True):
        self.a = structure
        self.order = order if order is not None else structure.order
        self.rank = self.order.rank if self.order is not None else None
        self.memoize = memoize
        self.prune = prune
        self._free: dict[int, tuple[str, ...]] = {}
        self._memo: dict = {}
        self._keep: list[Formula] = []

    def __call__(self, f: Formula, valuation: Mapping | None = None) -> bool:
        env = _normalise(valuation)
        n = self.a.n
        for name, value in env.items():
            if not isinstance(value, int) or value < 0 or (
                    value >> n if name[:1].isupper() else value >= n):
                raise EvaluationError(f"valuation of {name!r} lies outside the universe")
        return self.eval(f, env)

    # name resolution
    def element(self, name: str, env: dict) -> int:
        if name in env:
            return env[name]
        if name in self.a.constants:
            return self.a.constants[name]
        raise EvaluationError(f"unassigned element variable {name!r}")

    def set_mask(self, name: str, env: dict) -> int:
        if name in env:
            return env[name]
        if name in self.a.set_predicates:
            return self.a.set_predicates[name]
        raise EvaluationError(f"unassigned set variable {name!r}")

    def eval(self, f: Formula, env: dict) -> bool:
        t = type(f)
        if t is Member:
            return bool(self.set_mask(f.set_name, env) >> self.element(f.term, env) & 1)
        if t is Rel:
            rel = self.a.relations.get(f.name)
            if rel is None:
                raise EvaluationError(f"structure has no relation {f.name!r}")
            if rel[0] != len(f.args):
                raise EvaluationError(f"relation {f.name!r} has arity {rel[0]}")
            return tuple(self.element(x, env) for x in f.args) in rel[1]
        if t is Eq:
            return self.element(f.left, env) == self.element(f.right, env)
        if t is And:
            return self.eval(f.left, env) and self.eval(f.right, env)
        if t is Or:
            return self.eval(f.left, env) or self.eval(f.right, env)
        if t is Not:
            return not self.eval(f.body, env)
        if t is Implies:
            return (not self.eval(f.left, env)) or self.eval(f.right, env)
        if t is Iff:
            return self.eval(f.left, env) == self.eval(f.right, env)
        if t is Less:
            if self.rank is None:
                raise EvaluationError("formula uses '<' but no order is given")
            return self.rank[self.element(f.left, env)] < self.rank[self.element(f.right, env)]
        if t is Top:
            return f.value
        if t is Card:
            return self.set_mask(f.set_name, env).bit_count() % f.modulus == f.remainder
        return self.quantified(f, env)

    def quantified(self, f: Formula, env: dict) -> bool:
        key = None
        if self.memoize:
            fid = id(f)
            names = self._free.get(fid)
            if names is None:
                names = tuple(sorted(free_variables(f)))
                self._free[fid] = names
                self._keep.append(f)
            key = (fid,) + tuple(env.get(x) for x in names)
            hit = self._memo.get(key)
            if hit is not None:
                return hit
        result = self._quantified(f, env)
        if key is not None:
            self._memo[key] = result
        return result

    def _quantified(self, f, env) -> bool:
        var = f.var
        saved = env.get(var, _MISSING)
        n = self.a.n
        t = type(f)
        try:
            if t is Exists or t is Forall:
                want = t is Exists
                for e in range(n):
                    env[var] = e
                    if self.eval(f.body, env) == want:
                        return want
                return not want
            if t is SetExists or t is SetForall:
                want = t is SetExists
                if self.prune:
                    names, body = [var], f.body
                    while type(body) is t:
                        names.append(body.var)
                        body = body.body
                    if len(names) * n > PRUNE_BITS:
                        return self._chain(want, names, body, env)
                for mask in range(1 << n):
                    env[var] = mask
                    if self.eval(f.body, env) == want:
                        return want
                return not want
            if t is CountExists:
                count = 0
                for e in range(n):
                    env[var] = e
                    if self.eval(f.body, env):
                        count += 1
                return count % f.modulus == f.remainder
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved
        raise TypeError(f"not a formula: {f!r}")

    # --- pruned search over a chain of set quantifiers ---------------------------------

    def _free_of(self, f: Formula) -> tuple[str, ...]:
        names = self._free.get(id(f))
        if names is None:
            names = tuple(sorted(free_variables(f)))
            self._free[id(f)] = names
            self._keep.append(f)
        return names

    def _chain(self, want: bool, names: list[str], body: Formula, env: dict) -> bool:
        """Is there an assignment of ``names`` making ``body`` equal ``want``?"""
        n = self.a.n
        seq = self.order.sequence if self.order is not None else tuple(range(n))
        saved = {x: env.pop(x) for x in names if x in env}
        partial = {x: [0, 0] for x in names}
        k = len(names)

        def search(i: int) -> bool:
            if i == n:
                for x in names:
                    env[x] = partial[x][1]
                try:
                    return self.eval(body, env) == want
                finally:
                    for x in names:
                        del env[x]
            bit = 1 << seq[i]
            for combo in range(1 << k):
                for j, x in enumerate(names):
                    cell = partial[x]
                    cell[0] |= bit
                    cell[1] = cell[1] | bit if combo >> j & 1 else cell[1] & ~bit
                value = self._eval3(body, env, partial)
                if (value is None or value == want) and search(i + 1):
                    return True
            for x in names:
                partial[x][0] &= ~bit
                partial[x][1] &= ~bit
            return False

        try:
            found = search(0)
        finally:
            env.update(saved)
        return want if found else not want

    def _eval3(self, f: Formula, env: dict, partial: dict):
        """Kleene three-valued evaluation; ``None`` when the partial sets leave it open."""
        t = type(f)
        if t is Member and f.set_name in partial:
            known, value = partial[f.set_name]
            e = self.element(f.term, env)
            return bool(value >> e & 1) if known >> e & 1 else None
        if t is Card and f.set_name in partial:
            known, value = partial[f.set_name]
            if known != (1 << self.a.n) - 1:
                return None
            return value.bit_count() % f.modulus == f.remainder
        if t is Not:
            v = self._eval3(f.body, env, partial)
            return None if v is None else not v
        if t is And or t is Or or t is Implies:
            left = self._eval3(f.left, env, partial)
            if t is Implies:
                left = None if left is None else not left
            stop = t is not And  # the value that decides the connective
            if left == stop:
                return stop
            right = self._eval3(f.right, env, partial)
            if right == stop:
                return stop
            return None if left is None or right is None else not stop
        if t is Iff:
            left = self._eval3(f.left, env, partial)
            if left is None:
                return None
            right = self._eval3(f.right, env, partial)
            return None if right is None else left == right
        if t in (Exists, Forall, CountExists, SetExists, SetForall):
            if not any(x in partial for x in self._free_of(f)):
                return self.eval(f, env)
            if t is SetExists or t is SetForall:
                return None
            return self._quantified3(f, env, partial)
        return self.eval(f, env)

    def _quantified3(self, f, env, partial):
        var = f.var
        saved = env.get(var, _MISSING)
        t = type(f)
        values = []
        try:
            for e in range(self.a.n):
                env[var] = e
                v = self._eval3(f.body, env, partial)
                if t is Exists and v is True:
                    return True
                if t is Forall and v is False:
                    return False
                values.append(v)
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved
        if None in values:
            return None
        if t is CountExists:
            return sum(values) % f.modulus == f.remainder
        return t is Forall


PRUNE_BITS = 12
_MISSING = object()


def evaluate(a: FiniteStructure, f: Formula, valuation: Mapping | None = None,
             order: LinearOrder | None = None) -> bool:
    """Truth value of ``f`` in ``a`` (expanded by ``order`` if given) under ``valuation``.

    Valuations map element variables to ids and set variables to
    :class:`ElementSet`, bitmasks or iterables of ids.
    """
    return Evaluator(a, order)(f, valuation)
