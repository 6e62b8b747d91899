"""Equivalence-preserving rewrites between the counting formalisms.

* :func:`rewrite_counting_to_predicates` trades ``ex[m,r] x . phi`` for a set
  quantifier with a cardinality predicate, or back (``C[m,0]`` only).
* :func:`eliminate_remainders` removes ``C[m,r]`` with ``r > 0``.
* :func:`counting_to_order_invariant` removes counting altogether at the price
  of a linear order ``<``.
"""

from __future__ import annotations

from .syntax import (
    And, Card, CountExists, Eq, Exists, Forall, FreshNames, Formula, Iff, Implies,
    Less, Member, Not, Or, SetExists, all_names, conj, disj, leq, map_children,
)

__all__ = [
    "TranslationError",
    "rewrite_counting_to_predicates",
    "eliminate_remainders",
    "counting_to_order_invariant",
    "exactly_r_members",
]


class TranslationError(ValueError):
    pass


def _rewrite(f: Formula, fn) -> Formula:
    """Bottom-up rewrite applying ``fn`` to every node after its children."""
    return fn(map_children(f, lambda c: _rewrite(c, fn)))


def rewrite_counting_to_predicates(f: Formula, direction: str = "to_predicates") -> Formula:
    """Rewrite every counting quantifier into a cardinality predicate or vice versa.

    ``to_predicates``:  ``ex[m,r] x . phi``  becomes  ``EX X . (C[m,r](X) & all x . (X(x) <-> phi))``.
    ``to_quantifiers``: ``C[m,0](X)``  becomes  ``ex[m] x . X(x)``.
    Each rewritten node raises the quantifier rank by at most one.
    """
    fresh = FreshNames(all_names(f))
    if direction == "to_predicates":
        def step(g):
            if isinstance(g, CountExists):
                big = fresh("X")
                return SetExists(big, And(Card(g.modulus, g.remainder, big),
                                          Forall(g.var, Iff(Member(big, g.var), g.body))))
            return g
    elif direction == "to_quantifiers":
        def step(g):
            if isinstance(g, Card):
                if g.remainder != 0:
                    raise TranslationError(
                        f"C[{g.modulus},{g.remainder}] has a nonzero remainder; "
                        "apply eliminate_remainders first")
                x = fresh("x")
                return CountExists(g.modulus, 0, x, Member(g.set_name, x))
            return g
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return _rewrite(f, step)


def exactly_r_members(set_name: str, r: int, fresh: FreshNames) -> Formula:
    """Plain MSO for ``|set_name| = r``."""
    if r == 0:
        x = fresh("x")
        return Forall(x, Not(Member(set_name, x)))
    xs = [fresh("x") for _ in range(r)]
    z = fresh("z")
    body = conj(
        [Not(Eq(xs[i], xs[j])) for i in range(r) for j in range(i + 1, r)]
        + [Member(set_name, x) for x in xs]
        + [Forall(z, Implies(Member(set_name, z), disj(Eq(z, x) for x in xs)))]
    )
    for x in reversed(xs):
        body = Exists(x, body)
    return body


def eliminate_remainders(f: Formula) -> Formula:
    """Replace each ``C[m,r](X)`` with ``r > 0`` by plain MSO plus ``C[m,0]``.

    ``|X| = r (mod m)`` iff some ``X0`` inside ``X`` has exactly ``r`` members and
    ``X \\ X0`` (the auxiliary set ``Y``) has a size divisible by ``m``.
    Counting quantifiers with nonzero remainder go through the predicate form first.
    """
    if any(isinstance(g, CountExists) and g.remainder for g in _nodes(f)):
        f = _rewrite(f, _count_remainder_to_predicate(FreshNames(all_names(f))))
    fresh = FreshNames(all_names(f))

    def step(g):
        if isinstance(g, Card) and g.remainder:
            x0, y, w = fresh("X0"), fresh("Y"), fresh("w")
            subset = Forall(w, Implies(Member(x0, w), Member(g.set_name, w)))
            v = fresh("v")
            diff = Forall(v, Iff(Member(y, v), And(Member(g.set_name, v), Not(Member(x0, v)))))
            rest = SetExists(y, And(diff, Card(g.modulus, 0, y)))
            return SetExists(x0, conj([subset, exactly_r_members(x0, g.remainder, fresh), rest]))
        return g
    return _rewrite(f, step)


def _nodes(f):
    yield f
    for c in f.children():
        yield from _nodes(c)


def _count_remainder_to_predicate(fresh):
    def step(g):
        if isinstance(g, CountExists) and g.remainder:
            big = fresh("X")
            return SetExists(big, And(Card(g.modulus, g.remainder, big),
                                      Forall(g.var, Iff(Member(big, g.var), g.body))))
        return g
    return step


def counting_to_order_invariant(f: Formula) -> Formula:
    """Translate counting quantifiers into MSO over the vocabulary plus ``<``.

    ``ex[q] x . phi`` becomes "no x satisfies phi, or the witnesses listed in
    ``<``-order can be coloured ``X_0, X_1, ..., X_{q-1}, X_0, ...`` so that the
    least is coloured ``X_0`` and the greatest ``X_{q-1}``". The first disjunct
    covers the empty witness set, where the colouring clause alone is false.
    ``C[m,0]`` predicates are first turned into counting quantifiers.
    """
    if any(isinstance(g, (Card, CountExists)) and g.remainder for g in _nodes(f)):
        raise TranslationError("nonzero remainders: apply eliminate_remainders first")
    f = rewrite_counting_to_predicates(f, "to_quantifiers")
    fresh = FreshNames(all_names(f))

    def step(g):
        if not isinstance(g, CountExists):
            return g
        q, x, phi = g.modulus, g.var, g.body
        big = fresh("X")
        parts = [fresh(f"X{i}_") for i in range(q)]
        u, y, z = fresh("u"), fresh("y"), fresh("z")

        collect = Forall(x, Iff(Member(big, x), phi))
        cover = Forall(u, Iff(Member(big, u), disj(Member(p, u) for p in parts)))
        disjoint = conj(Forall(u, Not(And(Member(parts[i], u), Member(parts[j], u))))
                        for i in range(q) for j in range(i + 1, q))
        first = Exists(u, And(Member(parts[0], u),
                              Forall(y, Implies(Member(big, y), leq(u, y)))))
        last = Exists(u, And(Member(parts[-1], u),
                             Forall(y, Implies(Member(big, y), leq(y, u)))))
        succ = successor_within(big, u, y, z)
        cycle = Forall(u, Forall(y, Implies(succ, conj(
            Iff(Member(parts[i], u), Member(parts[(i + 1) % q], y)) for i in range(q)))))
        body = conj([collect, cover] + ([disjoint] if q > 1 else []) + [first, last, cycle])
        for p in reversed(parts):
            body = SetExists(p, body)
        witness = SetExists(big, body)
        empty = Not(Exists(x, phi))
        return Or(empty, witness)
    return _rewrite(f, step)


def successor_within(big: str, x: str, y: str, z: str) -> Formula:
    """``y`` is the ``<``-least member of ``big`` strictly above ``x``."""
    return conj([
        Member(big, x), Member(big, y), Less(x, y),
        Forall(z, Implies(And(Member(big, z), Less(x, z)), leq(y, z))),
    ])
