"""Cliquey grids and horizontally coloured grids.

Element ``(row i, column j)`` has id ``j * k + i``, so a column is a
contiguous block of ``k`` ids.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..structures import FiniteStructure, StructureError, mask_of

__all__ = ["GridSpec", "GridError", "make_grid", "colour_interpretation", "recolour",
           "grid_shape", "colour_names", "DEFAULT_GRID_BUDGET"]

DEFAULT_GRID_BUDGET = 1 << 16


class GridError(StructureError):
    pass


@dataclass(frozen=True)
class GridSpec:
    k: int
    l: int
    coloured: bool = False

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise GridError("grid dimensions must be positive")

    @property
    def size(self) -> int:
        return self.k * self.l


def colour_names(k: int) -> list[str]:
    return [f"P{i}" for i in range(1, k + 1)]


def _classes_relation(labels: list[int]) -> frozenset:
    by: dict[int, list[int]] = {}
    for e, c in enumerate(labels):
        by.setdefault(c, []).append(e)
    return frozenset((x, y) for members in by.values() for x in members for y in members)


def make_grid(spec: GridSpec, budget: int = DEFAULT_GRID_BUDGET) -> FiniteStructure:
    """The plain grid (``sim_h``, ``sim_v``) or coloured grid (``sim_v``, ``P1``..``Pk``)."""
    k, l = spec.k, spec.l
    if spec.size > budget:
        raise GridError(f"grid with {spec.size} elements exceeds the budget of {budget}")
    n = k * l
    sim_v = _classes_relation([e // k for e in range(n)])
    if spec.coloured:
        preds = {name: mask_of(j * k + i for j in range(l)) for i, name in enumerate(colour_names(k))}
        return FiniteStructure(n, {"sim_v": (2, sim_v)}, preds)
    sim_h = _classes_relation([e % k for e in range(n)])
    return FiniteStructure(n, {"sim_h": (2, sim_h), "sim_v": (2, sim_v)})


def _classes_of(n: int, pairs: frozenset, name: str) -> list[frozenset]:
    """Classes of an equivalence relation given as a tuple set; raises if it is not one."""
    classes: dict[int, frozenset] = {}
    for x in range(n):
        cls = frozenset(y for y in range(n) if (x, y) in pairs)
        if x not in cls:
            raise GridError(f"{name} is not reflexive at {x}")
        classes[x] = cls
    for x in range(n):
        for y in classes[x]:
            if classes[y] != classes[x]:
                raise GridError(f"{name} is not an equivalence relation")
    return sorted(set(classes.values()), key=min)


def grid_shape(a: FiniteStructure) -> tuple[int, int]:
    """``(k, l)`` of a plain grid, validating the grid axioms directly."""
    if set(a.relations) != {"sim_h", "sim_v"} or a.set_predicates or a.constants:
        raise GridError("a plain grid has exactly the relations sim_h and sim_v")
    rows = _classes_of(a.n, a.relations["sim_h"][1], "sim_h")
    cols = _classes_of(a.n, a.relations["sim_v"][1], "sim_v")
    for row in rows:
        for col in cols:
            if len(row & col) != 1:
                raise GridError("a row and a column must share exactly one element")
    return len(rows), len(cols)


def colour_interpretation(a: FiniteStructure) -> FiniteStructure:
    """Plain grid defined from a coloured one: same colour means same row."""
    names = sorted(a.set_predicates, key=lambda s: (len(s), s))
    if set(a.relations) != {"sim_v"} or a.constants or not names:
        raise GridError("a coloured grid has the relation sim_v and colour predicates")
    cols = _classes_of(a.n, a.relations["sim_v"][1], "sim_v")
    colour = [None] * a.n
    for name in names:
        for e in range(a.n):
            if a.set_predicates[name] >> e & 1:
                if colour[e] is not None:
                    raise GridError(f"element {e} carries two colours")
                colour[e] = name
    if None in colour:
        raise GridError(f"element {colour.index(None)} carries no colour")
    for col in cols:
        if sorted(colour[e] for e in col) != sorted(names):
            raise GridError("every column must carry each colour exactly once")
    sim_h = frozenset((x, y) for x in range(a.n) for y in range(a.n) if colour[x] == colour[y])
    return FiniteStructure(a.n, {"sim_h": (2, sim_h), "sim_v": a.relations["sim_v"]})


def recolour(a: FiniteStructure) -> FiniteStructure:
    """Coloured grid from a plain one; rows get ``P1``, ``P2``, .. by least element id."""
    grid_shape(a)
    rows = _classes_of(a.n, a.relations["sim_h"][1], "sim_h")
    preds = {name: mask_of(row) for name, row in zip(colour_names(len(rows)), rows)}
    return FiniteStructure(a.n, {"sim_v": a.relations["sim_v"]}, preds)
