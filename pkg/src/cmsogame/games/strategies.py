"""Duplicator strategies for pure sets, disjoint unions and coloured grids.

All three are stateless: the block decomposition they maintain is recomputed
from the game state, where a block is the set of elements (or grid columns)
sharing one membership pattern with respect to the chosen sets and points.
Blocks on the two sides are matched by pattern.
"""

from __future__ import annotations

import itertools

from ..structures import FiniteStructure, TwofoldMapping, induced_substructure
from .core import LEFT, GameConfig, GameState, Move, Strategy, StrategyError, other
from .thresholds import (
    PartitionTransferError, partition_transfer, set_lemma_threshold, strategy_threshold,
    threshold_equal,
)

__all__ = ["SetLemmaStrategy", "set_lemma_strategy", "UnionStrategy", "union_strategy",
           "GridStrategy", "grid_strategy"]

FINAL_SEARCH_CAP = 20_000


def _blocks(state: GameState, side: str) -> dict[tuple, list[int]]:
    sets, points = state.chosen(side)
    where: dict[int, list[int]] = {}
    for i, p in enumerate(points):
        where.setdefault(p, []).append(i)
    blocks: dict[tuple, list[int]] = {}
    for e in range(state.structure(side).n):
        sig = (tuple(s >> e & 1 for s in sets), tuple(where.get(e, ())))
        blocks.setdefault(sig, []).append(e)
    return blocks


def _check_pure(a: FiniteStructure, b: FiniteStructure):
    if a.relations or b.relations or a.constants or b.constants:
        raise StrategyError("set strategy needs structures without relations or constants")
    for name, ma in a.set_predicates.items():
        mb = b.set_predicates.get(name, 0)
        full_a, full_b = ma == (1 << a.n) - 1, mb == (1 << b.n) - 1
        if not ((ma == 0 and mb == 0) or (full_a and full_b)):
            raise StrategyError(f"predicate {name} must be empty on both sides or full on both")


class SetLemmaStrategy(Strategy):
    """Duplicator for two pure sets of sizes at or above the set-lemma bound.

    A set move is answered block by block. With ``q`` rounds left and
    ``small = max((2**q - 4) * lcm(M), 1)``: equal blocks are copied; if the
    chosen part or its complement is below ``small`` it is copied; otherwise
    the reply takes ``floor(|b| / 2) + l`` elements, ``l`` the least offset
    restoring the residue. The last set move is found by a bounded search
    checked against the winning condition. Point moves take the lowest id in
    the matching block.
    """

    name = "set-lemma"

    def __init__(self, size_a: int, size_b: int, cfg: GameConfig, check: bool = True):
        self.size_a, self.size_b, self.cfg = size_a, size_b, cfg
        if check:
            problem = set_lemma_problem(size_a, size_b, cfg)
            if problem:
                raise StrategyError(problem)

    def start(self, left, right, cfg):
        if (left.n, right.n) != (self.size_a, self.size_b):
            raise StrategyError(f"strategy built for sizes ({self.size_a}, {self.size_b}), "
                                f"got ({left.n}, {right.n})")
        _check_pure(left, right)

    def respond(self, state, move):
        mine, theirs = _blocks(state, move.side), _blocks(state, other(move.side))
        reply_side = other(move.side)
        if move.kind == "point":
            sig = next(s for s, es in mine.items() if move.value in es)
            target = theirs.get(sig)
            if not target:
                raise StrategyError("no element with a matching membership pattern")
            return Move.point(reply_side, target[0])
        lcm = state.cfg.lcm
        q = state.remaining
        sigs = sorted(set(mine) | set(theirs))
        counts = {s: sum(1 for e in mine.get(s, ()) if move.value >> e & 1) for s in sigs}
        if q <= 1:
            return self._final(state, move, mine, theirs, sigs, counts)
        small = max((2 ** q - 4) * lcm, 1)
        chosen = []
        for s in sigs:
            a, b, x = len(mine.get(s, ())), len(theirs.get(s, ())), counts[s]
            if a == b or x < small:
                y = x
            elif a - x < small:
                y = b - (a - x)
            else:
                y = b // 2
                y += (x - y) % lcm
                while y > b - small and y - lcm >= small:
                    y -= lcm
            if not 0 <= y <= b:
                raise StrategyError(f"block of size {b} cannot answer {x} of {a}")
            chosen.extend(theirs.get(s, [])[:y])
        return Move.set(reply_side, chosen)

    def _final(self, state, move, mine, theirs, sigs, counts):
        lcm = state.cfg.lcm
        reply_side = other(move.side)
        options = []
        for s in sigs:
            a, b, x = len(mine.get(s, ())), len(theirs.get(s, ())), counts[s]

            def shape(v, size):
                return 0 if v == 0 else 2 if v == size else 1

            def rank(y):
                return ((y - x) % lcm != 0, shape(y, b) != shape(x, a), abs(y - x))

            options.append(sorted(range(b + 1), key=rank)[: 2 * lcm + 4])
        for tried, ys in enumerate(itertools.product(*options)):
            if tried >= FINAL_SEARCH_CAP:
                break
            chosen = []
            for s, y in zip(sigs, ys):
                chosen.extend(theirs.get(s, [])[:y])
            reply = Move.set(reply_side, chosen)
            if state.after(move, reply).violation() is None:
                return reply
        raise StrategyError("no last-round reply satisfies the winning condition")


def set_lemma_problem(size_a: int, size_b: int, cfg: GameConfig) -> str | None:
    """Why the set lemma does not apply to these sizes, or ``None``."""
    lcm = cfg.lcm
    if size_a == size_b:
        return None
    bound = set_lemma_threshold(cfg.rounds, cfg.moduli)
    if not threshold_equal(size_a, size_b, bound, cfg.moduli):
        return (f"sizes ({size_a}, {size_b}) must be equal, or congruent mod "
                f"{sorted(cfg.moduli)} and both at least (2^(r+1)-4)*lcm(M) = {bound}")
    if cfg.rounds == 1 and min(size_a, size_b) < lcm - 1:
        # the bound is 0 for one round, but every residue below lcm(M) must be reachable
        return f"one-round game needs both sizes at least lcm(M) - 1 = {lcm - 1}"
    return None


def set_lemma_strategy(size_a: int, size_b: int, cfg: GameConfig,
                       check: bool = True) -> SetLemmaStrategy:
    return SetLemmaStrategy(size_a, size_b, cfg, check)


class UnionStrategy(Strategy):
    """Combines strategies for ``(A1, B1)`` and ``(A2, B2)`` on the disjoint unions.

    Point moves go to the component owning the element; set moves are cut at
    the split points, answered in each component and joined.
    """

    name = "union"

    def __init__(self, first: Strategy, second: Strategy):
        self.parts = (first, second)
        self.components = None

    def start(self, left, right, cfg):
        if left.split is None or right.split is None:
            raise StrategyError("union strategy needs structures built by disjoint_union")
        comps = []
        for index in (0, 1):
            pair = []
            for a in (left, right):
                lo, hi = (0, a.split) if index == 0 else (a.split, a.n)
                if lo == hi:
                    raise StrategyError("empty union component")
                sub, _ = induced_substructure(a, range(lo, hi))
                pair.append((sub, lo, hi))
            comps.append(pair)
        self.components = comps
        for part, ((a, _, _), (b, _, _)) in zip(self.parts, comps):
            part.start(a, b, cfg)

    def _component_of(self, side: str, e: int) -> int:
        split = self.components[0][0 if side == LEFT else 1][2]
        return 0 if e < split else 1

    def _substate(self, state: GameState, index: int) -> GameState:
        (a, alo, ahi), (b, blo, bhi) = self.components[index]
        amask, bmask = (1 << ahi) - (1 << alo), (1 << bhi) - (1 << blo)
        sets = tuple(((x & amask) >> alo, (y & bmask) >> blo) for x, y in state.mapping.set_pairs)
        points = []
        for x, y in state.mapping.point_pairs:
            inside = (alo <= x < ahi, blo <= y < bhi)
            if inside == (True, True):
                points.append((x - alo, y - blo))
            elif inside != (False, False):
                raise StrategyError("a point pair straddles the union components")
        return GameState(a, b, state.cfg, TwofoldMapping(sets, tuple(points)))

    def _bounds(self, index: int, side: str):
        _, lo, hi = self.components[index][0 if side == LEFT else 1]
        return lo, hi

    def _answer(self, state, index, move):
        sub = self._substate(state, index)
        reply = self.parts[index].respond(sub, move)
        n = sub.structure(reply.side).n
        if (not isinstance(reply, Move) or reply.side != other(move.side) or reply.kind != move.kind
                or reply.value < 0 or (reply.kind == "point" and reply.value >= n)
                or (reply.kind == "set" and reply.value >> n)):
            raise StrategyError(f"component strategy {index + 1} left its component: {reply}")
        return reply

    def respond(self, state, move):
        if self.components is None:
            self.start(state.left, state.right, state.cfg)
        if move.kind == "point":
            index = self._component_of(move.side, move.value)
            lo, _ = self._bounds(index, move.side)
            reply = self._answer(state, index, Move.point(move.side, move.value - lo))
            return Move.point(reply.side, reply.value + self._bounds(index, reply.side)[0])
        value = 0
        for index in (0, 1):
            lo, hi = self._bounds(index, move.side)
            part = (move.value & ((1 << hi) - (1 << lo))) >> lo
            reply = self._answer(state, index, Move.set(move.side, part))
            value |= reply.value << self._bounds(index, reply.side)[0]
        return Move.set(other(move.side), value)


def union_strategy(first: Strategy, second: Strategy) -> UnionStrategy:
    return UnionStrategy(first, second)


class GridStrategy(Strategy):
    """Duplicator for coloured (or plain) grids with ``k`` rows and ``l1`` / ``l2`` columns.

    Columns are grouped by their history: the colour-type of the column in
    every chosen set and the points placed in it. On a set move each group is
    split by the colour-type of the new set, and :func:`partition_transfer`
    with ``p = 2**k`` and ``t = f(q-1)`` decides how many columns of the
    matching group receive each colour-type. Threshold ``t`` is raised to 1
    on the last move so that no colour-type class goes empty on one side
    only. A point move is answered in the same row of the lowest matching
    column.
    """

    name = "grid-lemma"

    def __init__(self, k: int, l1: int, l2: int, cfg: GameConfig, check: bool = True):
        if k < 1 or l1 < 1 or l2 < 1:
            raise StrategyError("grid dimensions must be positive")
        self.k, self.l1, self.l2, self.cfg = k, l1, l2, cfg
        bound = strategy_threshold(2 ** k, cfg.rounds, cfg.moduli)
        if check and not threshold_equal(l1, l2, bound, cfg.moduli):
            raise StrategyError(
                f"column counts ({l1}, {l2}) must be equal, or congruent mod "
                f"{sorted(cfg.moduli)} and both at least f(r) = {bound}")

    def start(self, left, right, cfg):
        if (left.n, right.n) != (self.k * self.l1, self.k * self.l2):
            raise StrategyError(f"strategy built for {self.k}x{self.l1} and {self.k}x{self.l2} grids")

    def _columns(self, state: GameState, side: str) -> dict[tuple, list[int]]:
        k = self.k
        sets, points = state.chosen(side)
        where: dict[int, list[tuple[int, int]]] = {}
        for i, p in enumerate(points):
            where.setdefault(p // k, []).append((i, p % k))
        groups: dict[tuple, list[int]] = {}
        for col in range(state.structure(side).n // k):
            sig = (tuple(s >> (col * k) & ((1 << k) - 1) for s in sets), tuple(where.get(col, ())))
            groups.setdefault(sig, []).append(col)
        return groups

    def respond(self, state, move):
        k = self.k
        mine, theirs = self._columns(state, move.side), self._columns(state, other(move.side))
        reply_side = other(move.side)
        if move.kind == "point":
            col, row = divmod(move.value, k)
            sig = next(s for s, cols in mine.items() if col in cols)
            target = theirs.get(sig)
            if not target:
                raise StrategyError("no column with a matching history")
            return Move.point(reply_side, target[0] * k + row)
        q = state.remaining
        t = max(strategy_threshold(2 ** k, q - 1, state.cfg.moduli), 1) if q >= 1 else 1
        full = (1 << k) - 1
        value = 0
        for sig, cols in mine.items():
            patterns: dict[int, int] = {}
            for col in cols:
                pat = move.value >> (col * k) & full
                patterns[pat] = patterns.get(pat, 0) + 1
            target = theirs.get(sig, [])
            try:
                sizes, _ = partition_transfer(list(patterns.values()), len(target), t,
                                              state.cfg.moduli, p=2 ** k)
            except PartitionTransferError as exc:
                raise StrategyError(f"column group cannot be matched: {exc}") from exc
            it = iter(target)
            for pat, size in zip(patterns, sizes):
                for _ in range(size):
                    value |= pat << (next(it) * k)
        if any(sig not in mine for sig in theirs):
            raise StrategyError("column groups out of step")
        return Move.set(reply_side, value)


def grid_strategy(k: int, l1: int, l2: int, cfg: GameConfig, check: bool = True) -> GridStrategy:
    return GridStrategy(k, l1, l2, cfg, check)
