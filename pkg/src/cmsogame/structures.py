"""Finite relational structures and the partial-isomorphism checks used by the games.

Elements of a structure with universe size ``n`` are the integers ``0..n-1``.
Sets of elements are stored as integer bitmasks (bit ``i`` set iff ``i`` is a
member); :class:`ElementSet` wraps such a mask together with its universe size.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "StructureError",
    "ElementSet",
    "LinearOrder",
    "FiniteStructure",
    "TwofoldMapping",
    "disjoint_union",
    "expand_with_sets",
    "induced_substructure",
    "is_twofold_partial_isomorphism",
    "twofold_violation",
    "linear_orders",
    "parse_structure",
    "render_structure",
    "lcm_of",
    "DEFAULT_ORDER_CAP",
]

DEFAULT_ORDER_CAP = 8


class StructureError(ValueError):
    """Raised for malformed structures or invalid structure operations."""


def lcm_of(moduli: Iterable[int]) -> int:
    """Least common multiple of ``moduli``; ``1`` for the empty collection."""
    return math.lcm(1, *moduli)


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def members_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class ElementSet:
    """A subset of the universe ``0..n-1`` of some ambient structure."""

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise StructureError(f"set {self.mask:#x} exceeds universe of size {self.n}")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "ElementSet":
        elements = list(elements)
        for e in elements:
            if not 0 <= e < n:
                raise StructureError(f"element {e} outside universe of size {n}")
        return cls(n, mask_of(elements))

    @classmethod
    def full(cls, n: int) -> "ElementSet":
        return cls(n, (1 << n) - 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, e: int) -> bool:
        return 0 <= e < self.n and bool(self.mask >> e & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(members_of(self.mask))

    def complement(self) -> "ElementSet":
        return ElementSet(self.n, ((1 << self.n) - 1) & ~self.mask)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


@dataclass(frozen=True)
class LinearOrder:
    """A linear order on ``0..n-1``, given as the elements listed from least to greatest."""

    sequence: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.sequence) != list(range(len(self.sequence))):
            raise StructureError(f"not a permutation of the universe: {self.sequence}")

    @property
    def n(self) -> int:
        return len(self.sequence)

    @cached_property
    def rank(self) -> tuple[int, ...]:
        r = [0] * len(self.sequence)
        for pos, e in enumerate(self.sequence):
            r[e] = pos
        return tuple(r)

    def less(self, x: int, y: int) -> bool:
        rank = self.rank
        return rank[x] < rank[y]

    @classmethod
    def identity(cls, n: int) -> "LinearOrder":
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class FiniteStructure:
    """A finite relational structure with a nonempty universe.

    ``relations`` maps a name to ``(arity, tuples)``; ``set_predicates`` maps a
    (capitalised) name to a bitmask; ``constants`` maps a name to an element.
    ``order`` is an optional baked-in linear order interpreting ``<``.
    ``split`` records the size of the left part when the structure was built by
    :func:`disjoint_union`.
    """

    universe_size: int
    relations: Mapping[str, tuple[int, frozenset]] = field(default_factory=dict)
    set_predicates: Mapping[str, int] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    order: LinearOrder | None = None
    split: int | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.universe_size
        if n < 1:
            raise StructureError("universe must be nonempty")
        rels = {}
        for name, (arity, tuples) in self.relations.items():
            tuples = frozenset(tuple(t) for t in tuples)
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} of {name} does not have arity {arity}")
                if any(not 0 <= e < n for e in t):
                    raise StructureError(f"tuple {t} of {name} leaves the universe")
            rels[name] = (arity, tuples)
        object.__setattr__(self, "relations", rels)
        preds = {}
        for name, s in self.set_predicates.items():
            mask = s.mask if isinstance(s, ElementSet) else s if isinstance(s, int) else mask_of(s)
            if mask < 0 or mask >> n:
                raise StructureError(f"set predicate {name} leaves the universe")
            preds[name] = mask
        object.__setattr__(self, "set_predicates", preds)
        for name, e in self.constants.items():
            if not 0 <= e < n:
                raise StructureError(f"constant {name} = {e} leaves the universe")
        object.__setattr__(self, "constants", dict(self.constants))
        if self.order is not None and self.order.n != n:
            raise StructureError("order does not cover the universe")

    def __hash__(self):
        return hash((self.universe_size, tuple(sorted(self.relations.items())),
                     tuple(sorted(self.set_predicates.items())),
                     tuple(sorted(self.constants.items())), self.order))

    @property
    def n(self) -> int:
        return self.universe_size

    @property
    def vocabulary(self) -> dict:
        """Relation arities, set predicate names and constant names."""
        return {
            "relations": {name: arity for name, (arity, _) in self.relations.items()},
            "sets": frozenset(self.set_predicates),
            "constants": frozenset(self.constants),
        }

    def same_vocabulary(self, other: "FiniteStructure") -> bool:
        a, b = self.vocabulary, other.vocabulary
        return a["relations"] == b["relations"] and a["sets"] == b["sets"]

    def holds(self, name: str, args: Sequence[int]) -> bool:
        return tuple(args) in self.relations[name][1]

    def predicate(self, name: str) -> ElementSet:
        return ElementSet(self.n, self.set_predicates[name])

    def with_order(self, order: LinearOrder | None) -> "FiniteStructure":
        return FiniteStructure(self.n, self.relations, self.set_predicates,
                               self.constants, order, self.split)

    def is_pure(self) -> bool:
        """True when the structure has no relations and no constants."""
        return not self.relations and not self.constants


@dataclass(frozen=True)
class TwofoldMapping:
    """Chosen sets ``(A_1..A_s) -> (B_1..B_s)`` and points ``(a_1..a_t) -> (b_1..b_t)``.

    Sets are bitmasks over the respective universes.
    """

    set_pairs: tuple[tuple[int, int], ...] = ()
    point_pairs: tuple[tuple[int, int], ...] = ()

    def with_sets(self, left: int, right: int) -> "TwofoldMapping":
        return TwofoldMapping(self.set_pairs + ((left, right),), self.point_pairs)

    def with_points(self, left: int, right: int) -> "TwofoldMapping":
        return TwofoldMapping(self.set_pairs, self.point_pairs + ((left, right),))

    def side(self, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """The sets and points chosen in the left (0) or right (1) structure."""
        return (tuple(p[index] for p in self.set_pairs),
                tuple(p[index] for p in self.point_pairs))


# --- combinators ------------------------------------------------------------

def disjoint_union(a: FiniteStructure, b: FiniteStructure) -> FiniteStructure:
    """Disjoint union with ``b``'s elements shifted by ``a.n``.

    The result records ``split = a.n``.
    """
    if not a.same_vocabulary(b):
        raise StructureError("disjoint union needs a common vocabulary")
    if a.constants or b.constants:
        raise StructureError("disjoint union of structures with constants is undefined")
    shift = a.n
    rels = {}
    for name, (arity, ta) in a.relations.items():
        tb = b.relations[name][1]
        rels[name] = (arity, ta | {tuple(e + shift for e in t) for t in tb})
    preds = {name: m | (b.set_predicates[name] << shift) for name, m in a.set_predicates.items()}
    return FiniteStructure(a.n + b.n, rels, preds, {}, None, shift)


def expand_with_sets(a: FiniteStructure, names_and_sets) -> FiniteStructure:
    preds = dict(a.set_predicates)
    for name, s in names_and_sets:
        if name in preds or name in a.relations or name in a.constants:
            raise StructureError(f"name {name!r} already used")
        mask = s.mask if isinstance(s, ElementSet) else mask_of(s)
        if mask >> a.n:
            raise StructureError(f"set for {name!r} leaves the universe")
        preds[name] = mask
    return FiniteStructure(a.n, a.relations, preds, a.constants, a.order, a.split)


def induced_substructure(a: FiniteStructure, s) -> tuple[FiniteStructure, dict[int, int]]:
    """Restrict ``a`` to ``s``; returns the substructure and the old-id -> new-id map."""
    elements = list(s) if not isinstance(s, int) else members_of(s)
    elements = sorted(set(elements))
    if not elements:
        raise StructureError("induced substructure on the empty set")
    if elements[-1] >= a.n or elements[0] < 0:
        raise StructureError("restriction set leaves the universe")
    index = {e: i for i, e in enumerate(elements)}
    rels = {name: (arity, {tuple(index[e] for e in t) for t in ts if all(e in index for e in t)})
            for name, (arity, ts) in a.relations.items()}
    preds = {name: mask_of(index[e] for e in members_of(m) if e in index)
             for name, m in a.set_predicates.items()}
    consts = {name: index[e] for name, e in a.constants.items() if e in index}
    if len(consts) != len(a.constants):
        raise StructureError("restriction drops a constant")
    order = None
    if a.order is not None:
        order = LinearOrder(tuple(index[e] for e in a.order.sequence if e in index))
    return FiniteStructure(len(elements), rels, preds, consts, order), index


# --- twofold partial isomorphisms --------------------------------------------

def _points_with_constants(a: FiniteStructure, points: Sequence[int]) -> list[int]:
    return [a.constants[c] for c in sorted(a.constants)] + list(points)


def twofold_violation(a: FiniteStructure, b: FiniteStructure, m: TwofoldMapping,
                      moduli: Iterable[int] = ()) -> str | None:
    """Describe the first violated clause of a twofold partial isomorphism, or ``None``."""
    moduli = tuple(sorted(moduli))
    pts_a, pts_b = m.side(0)[1], m.side(1)[1]
    # (ii) the set map, as a partial map between power-set structures
    for i, (x, y) in enumerate(m.set_pairs, 1):
        if x < 0 or y < 0 or x >> a.n or y >> b.n:
            return f"set pair {i} leaves the universe"
        cx, cy = x.bit_count(), y.bit_count()
        for q in moduli:
            if (cx - cy) % q:
                return f"cardinality: |A{i}| = {cx} and |B{i}| = {cy} differ mod {q}"
        for j, (x2, y2) in enumerate(m.set_pairs[:i - 1], 1):
            if (x == x2) != (y == y2):
                return f"set equality: A{j} = A{i} is {x == x2} but B{j} = B{i} is {y == y2}"
    if sorted(a.constants) != sorted(b.constants):
        return "constants differ"
    pa = _points_with_constants(a, pts_a)
    pb = _points_with_constants(b, pts_b)
    if any(not 0 <= e < a.n for e in pa) or any(not 0 <= e < b.n for e in pb):
        return "point leaves the universe"
    names = [f"c:{c}" for c in sorted(a.constants)] + [f"point {i}" for i in range(1, len(pts_a) + 1)]
    # (i) the point map, on structures expanded by the chosen sets
    for i in range(len(pa)):
        for j in range(i):
            if (pa[i] == pa[j]) != (pb[i] == pb[j]):
                return f"equality of {names[j]} and {names[i]} not preserved"
        for k, (x, y) in enumerate(m.set_pairs, 1):
            if bool(x >> pa[i] & 1) != bool(y >> pb[i] & 1):
                return f"membership of {names[i]} in set {k} not preserved"
        for name, ma in sorted(a.set_predicates.items()):
            if bool(ma >> pa[i] & 1) != bool(b.set_predicates[name] >> pb[i] & 1):
                return f"predicate {name} on {names[i]} not preserved"
    for name, (arity, ta) in sorted(a.relations.items()):
        tb = b.relations[name][1]
        for idx in itertools.product(range(len(pa)), repeat=arity):
            if (tuple(pa[i] for i in idx) in ta) != (tuple(pb[i] for i in idx) in tb):
                return f"relation {name} on ({', '.join(names[i] for i in idx)}) not preserved"
    return None


def is_twofold_partial_isomorphism(a: FiniteStructure, b: FiniteStructure,
                                   m: TwofoldMapping, moduli: Iterable[int] = ()) -> bool:
    """Check both clauses of a twofold partial isomorphism w.r.t. ``moduli``.

    Constants act as pre-placed point pairs (matched by name).
    """
    return twofold_violation(a, b, m, moduli) is None


# --- linear orders ------------------------------------------------------------

def linear_orders(a: FiniteStructure | int, mode: str = "all", count: int = 0,
                  seed: int = 0, cap: int = DEFAULT_ORDER_CAP) -> Iterator[LinearOrder]:
    """Enumerate all orders of the universe (``mode="all"``) or sample ``count`` of them.

    Sampling draws independent uniform permutations from ``random.Random(seed)``.
    """
    n = a if isinstance(a, int) else a.n
    if mode == "all":
        if n > cap:
            raise StructureError(f"universe of size {n} exceeds order enumeration cap {cap}")
        for perm in itertools.permutations(range(n)):
            yield LinearOrder(perm)
    elif mode == "sample":
        rng = random.Random(seed)
        for _ in range(count):
            perm = list(range(n))
            rng.shuffle(perm)
            yield LinearOrder(tuple(perm))
    else:
        raise ValueError(f"unknown order mode {mode!r}")


# --- text format -------------------------------------------------------------

_REL_LINE = re.compile(r"rel\s+([A-Za-z_][\w]*)\s*/\s*(\d+)\s*:(.*)$")
_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_structure(text: str) -> FiniteStructure:
    """Parse the line-based structure format (``universe``, ``rel``, ``set``, ``const``, ``order``)."""
    n = None
    rels: dict[str, tuple[int, set]] = {}
    preds: dict[str, int] = {}
    consts: dict[str, int] = {}
    order = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if n is None:
                head = line.split()
                if len(head) != 2 or head[0] != "universe":
                    raise StructureError("first line must be 'universe <n>'")
                n = int(head[1])
                continue
            if line.startswith("rel"):
                mt = _REL_LINE.match(line)
                if not mt:
                    raise StructureError("malformed rel line")
                name, arity, body = mt.group(1), int(mt.group(2)), mt.group(3)
                tuples = set()
                for tm in _TUPLE.finditer(body):
                    parts = [p for p in re.split(r"[,\s]+", tm.group(1)) if p]
                    tuples.add(tuple(int(p) for p in parts))
                if _TUPLE.sub("", body).strip():
                    raise StructureError("stray text in rel line")
                if name in rels:
                    raise StructureError(f"relation {name} declared twice")
                rels[name] = (arity, tuples)
            elif line.startswith("set"):
                name, _, body = line[3:].partition(":")
                name = name.strip()
                if not name or not name[0].isupper():
                    raise StructureError("set predicate names must be capitalised")
                preds[name] = mask_of(int(e) for e in body.split())
            elif line.startswith("const"):
                name, _, value = line[5:].partition("=")
                consts[name.strip()] = int(value)
            elif line.startswith("order"):
                _, _, body = line.partition(":")
                order = LinearOrder(tuple(int(e) for e in body.split()))
            else:
                raise StructureError("unknown line kind")
        except (ValueError, StructureError) as exc:
            raise StructureError(f"line {lineno}: {exc}") from None
    if n is None:
        raise StructureError("missing 'universe' line")
    return FiniteStructure(n, rels, preds, consts, order)


def render_structure(a: FiniteStructure) -> str:
    lines = [f"universe {a.n}"]
    for name in sorted(a.relations):
        arity, ts = a.relations[name]
        body = " ".join("(" + ",".join(map(str, t)) + ")" for t in sorted(ts))
        lines.append(f"rel {name}/{arity}: {body}".rstrip())
    for name in sorted(a.set_predicates):
        lines.append(f"set {name}: " + " ".join(map(str, members_of(a.set_predicates[name]))))
    for name in sorted(a.constants):
        lines.append(f"const {name} = {a.constants[name]}")
    if a.order is not None:
        lines.append("order: " + " ".join(map(str, a.order.sequence)))
    return "\n".join(line.rstrip() for line in lines) + "\n"
