"""Exact solution of the r-round (mod M) game by backward induction over position types.

The rank-q type of a position (structure plus chosen sets and points) is the
atomic description of the position together with the sets of rank-(q-1) types
reachable by one set move and by one point move. Types are interned to
integers in a table shared by both structures. Backward induction then reads:
Duplicator wins from a pair of positions with ``q`` rounds left iff the two
rank-q types are equal, because every Spoiler move on either side must be
answered by a move of the same kind reaching the same rank-(q-1) type.

Two position encoders exist: a general one enumerating all moves, and one for
structures without relations or constants, where a position is determined up
to automorphism by how many elements carry each membership pattern.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..structures import FiniteStructure
from .core import (
    DUPLICATOR, LEFT, RIGHT, SPOILER, GameConfig, GameState, Move, SpoilerAgent, Strategy,
    StrategyError, other,
)

__all__ = ["BudgetExceeded", "GameSolver", "GameResult", "solve_game", "DEFAULT_BUDGET",
           "SolverStrategy", "SolverSpoiler", "SolverDuplicator"]

DEFAULT_BUDGET = 3_000_000


class BudgetExceeded(RuntimeError):
    pass


class TypeTable:
    """Interns position types; ``info[t] = (atomic, set_successors, point_successors)``."""

    def __init__(self, budget: int):
        self.ids: dict = {}
        self.info: list = []
        self.budget = budget
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded the budget of {self.budget} nodes")

    def intern(self, key) -> int:
        t = self.ids.get(key)
        if t is None:
            t = len(self.info)
            self.ids[key] = t
            self.info.append(key)
        return t


def _canon(items) -> tuple[int, ...]:
    """Index of the first equal item, for each item."""
    first: dict = {}
    return tuple(first.setdefault(x, i) for i, x in enumerate(items))


class GeneralTypes:
    """Types of positions in an arbitrary structure, by exhaustive move enumeration."""

    def __init__(self, a: FiniteStructure, moduli, table: TypeTable):
        self.a = a
        self.moduli = tuple(sorted(moduli))
        self.table = table
        self.memo: dict = {}
        self.preds = [a.set_predicates[p] for p in sorted(a.set_predicates)]
        self.consts = [a.constants[c] for c in sorted(a.constants)]
        self.rels = [a.relations[r] for r in sorted(a.relations)]

    def atomic(self, sets, points):
        pts = self.consts + list(points)
        res = tuple(tuple(s.bit_count() % m for m in self.moduli) for s in sets)
        memb = tuple(sum(1 << i for i, s in enumerate(sets) if s >> p & 1) for p in pts)
        pmem = tuple(tuple(q >> p & 1 for q in self.preds) for p in pts)
        rels = []
        for arity, tuples in self.rels:
            rels.append(frozenset(idx for idx in itertools.product(range(len(pts)), repeat=arity)
                                  if tuple(pts[i] for i in idx) in tuples))
        return (_canon(sets), res, _canon(pts), memb, pmem, tuple(rels))

    def type_of(self, sets: tuple, points: tuple, q: int) -> int:
        key = (sets, points, q)
        t = self.memo.get(key)
        if t is not None:
            return t
        self.table.tick()
        atomic = self.atomic(sets, points)
        if q == 0:
            t = self.table.intern((atomic, None, None))
        else:
            n = self.a.n
            set_succ = frozenset(self.type_of(sets + (x,), points, q - 1) for x in range(1 << n))
            point_succ = frozenset(self.type_of(sets, points + (e,), q - 1) for e in range(n))
            t = self.table.intern((atomic, set_succ, point_succ))
        self.memo[key] = t
        return t


class PureTypes:
    """Types of positions in a structure without relations or constants.

    A position is summarised by the multiset of element colours, where a colour
    records the set-predicate memberships, the chosen-set memberships and which
    chosen points sit on the element.
    """

    def __init__(self, a: FiniteStructure, moduli, table: TypeTable):
        if not a.is_pure():
            raise ValueError("pure encoding needs a structure without relations or constants")
        self.a = a
        self.moduli = tuple(sorted(moduli))
        self.table = table
        self.memo: dict = {}
        self.preds = [a.set_predicates[p] for p in sorted(a.set_predicates)]

    def key(self, sets: tuple, points: tuple):
        counts: dict = {}
        where: dict[int, list[int]] = {}
        for i, p in enumerate(points):
            where.setdefault(p, []).append(i)
        for e in range(self.a.n):
            pb = tuple(q >> e & 1 for q in self.preds)
            sb = sum(1 << i for i, s in enumerate(sets) if s >> e & 1)
            colour = (pb, sb, tuple(where.get(e, ())))
            counts[colour] = counts.get(colour, 0) + 1
        return (len(sets), len(points), tuple(sorted(counts.items())))

    def atomic_of_key(self, key):
        s, t, classes = key
        live = [c for c, k in classes if k]
        set_sig = [tuple(c[1] >> i & 1 for c in live) for i in range(s)]
        res = tuple(tuple(sum(k for c, k in classes if c[1] >> i & 1) % m for m in self.moduli)
                    for i in range(s))
        owner = {}
        for c, _ in classes:
            for p in c[2]:
                owner[p] = c
        pcls = [owner[p] for p in range(t)]
        memb = tuple(c[1] for c in pcls)
        pmem = tuple(c[0] for c in pcls)
        return (_canon(set_sig), res, _canon(pcls), memb, pmem, ())

    def type_of(self, sets: tuple, points: tuple, q: int) -> int:
        return self.type_of_key(self.key(sets, points), q)

    def type_of_key(self, key, q: int) -> int:
        mk = (key, q)
        t = self.memo.get(mk)
        if t is not None:
            return t
        self.table.tick()
        atomic = self.atomic_of_key(key)
        if q == 0:
            t = self.table.intern((atomic, None, None))
        else:
            set_succ = frozenset(self.type_of_key(k, q - 1) for k in self._set_moves(key))
            point_succ = frozenset(self.type_of_key(k, q - 1) for k in self._point_moves(key))
            t = self.table.intern((atomic, set_succ, point_succ))
        self.memo[mk] = t
        return t

    @staticmethod
    def _set_moves(key):
        s, t, classes = key
        bit = 1 << s
        for picks in itertools.product(*(range(k + 1) for _, k in classes)):
            counts = {}
            for (c, k), j in zip(classes, picks):
                if j:
                    inside = (c[0], c[1] | bit, c[2])
                    counts[inside] = counts.get(inside, 0) + j
                if k - j:
                    counts[c] = counts.get(c, 0) + k - j
            yield (s + 1, t, tuple(sorted(counts.items())))

    @staticmethod
    def _point_moves(key):
        s, t, classes = key
        for idx, (c, k) in enumerate(classes):
            counts = dict(classes)
            del counts[c]
            if c[2]:
                moved = (c[0], c[1], c[2] + (t,))
                counts[moved] = 1
            else:
                moved = (c[0], c[1], (t,))
                counts[moved] = counts.get(moved, 0) + 1
                if k > 1:
                    counts[c] = k - 1
            yield (s, t + 1, tuple(sorted(counts.items())))


def estimate_nodes(n: int, rounds: int) -> int:
    moves = (1 << n) + n
    return sum(moves ** d for d in range(rounds + 1))


class GameSolver:
    """Solves ``G_r^M(left, right)`` and answers type queries for strategies.

    ``reduce`` selects the position encoding: ``"auto"`` uses the pure
    encoding when both structures lack relations and constants.
    """

    def __init__(self, left: FiniteStructure, right: FiniteStructure, cfg: GameConfig,
                 budget: int = DEFAULT_BUDGET, reduce: str | bool = "auto"):
        if not left.same_vocabulary(right) or sorted(left.constants) != sorted(right.constants):
            raise ValueError("structures must share a vocabulary")
        self.left, self.right, self.cfg = left, right, cfg
        self.table = TypeTable(budget)
        pure = left.is_pure() and right.is_pure()
        if reduce == "auto":
            reduce = pure
        if reduce and not pure:
            raise ValueError("pure encoding requested for structures with relations or constants")
        self.reduced = bool(reduce)
        if not self.reduced:
            worst = estimate_nodes(left.n, cfg.rounds) + estimate_nodes(right.n, cfg.rounds)
            if worst > budget:
                raise BudgetExceeded(
                    f"exhaustive search needs up to {worst} nodes, budget is {budget}")
        enc = PureTypes if self.reduced else GeneralTypes
        self.types = {LEFT: enc(left, cfg.moduli, self.table),
                      RIGHT: enc(right, cfg.moduli, self.table)}

    @property
    def nodes(self) -> int:
        return self.table.nodes

    def type_at(self, state: GameState, side: str) -> int:
        sets, points = state.chosen(side)
        return self.types[side].type_of(sets, points, state.remaining)

    def type_after(self, state: GameState, move: Move) -> int:
        sets, points = state.chosen(move.side)
        if move.kind == "set":
            sets = sets + (move.value,)
        else:
            points = points + (move.value,)
        return self.types[move.side].type_of(sets, points, state.remaining - 1)

    def duplicator_wins(self, state: GameState | None = None) -> bool:
        state = state or GameState(self.left, self.right, self.cfg)
        return self.type_at(state, LEFT) == self.type_at(state, RIGHT)

    def moves(self, state: GameState, side: str, kind: str):
        n = state.structure(side).n
        rng = range(1 << n) if kind == "set" else range(n)
        return (Move(side, kind, v) for v in rng)

    def best_reply(self, state: GameState, move: Move) -> Move | None:
        """Least reply (by element id or mask) reaching the same type as ``move``, if any."""
        want = self.type_after(state, move)
        for reply in self.moves(state, other(move.side), move.kind):
            if self.type_after(state, reply) == want:
                return reply
        return None

    def winning_spoiler_move(self, state: GameState) -> Move | None:
        """A Spoiler move after which no reply keeps the types equal (points first)."""
        if state.remaining <= 0:
            return None
        tl, tr = self.type_at(state, LEFT), self.type_at(state, RIGHT)
        if tl == tr:
            return None
        il, ir = self.table.info[tl], self.table.info[tr]
        for kind, slot in (("point", 2), ("set", 1)):
            for side, mine, theirs in ((LEFT, il, ir), (RIGHT, ir, il)):
                missing = mine[slot] - theirs[slot]
                if missing:
                    for move in self.moves(state, side, kind):
                        if self.type_after(state, move) in missing:
                            return move
        return None


@dataclass
class GameResult:
    winner: str
    certificate: object
    solver: GameSolver

    @property
    def nodes(self) -> int:
        return self.solver.nodes

    def __str__(self):
        return f"winner: {self.winner}"


class SolverDuplicator(Strategy):
    """Duplicator certificate: answer with the least move reaching the same type."""

    name = "solver"

    def __init__(self, solver: GameSolver):
        self.solver = solver

    def respond(self, state, move):
        reply = self.solver.best_reply(state, move)
        if reply is None:
            raise StrategyError("no reply preserves the position type")
        return reply


class SolverStrategy(Strategy):
    """Duplicator that solves the game it is started on; falls back to the least move when lost."""

    name = "solver"

    def __init__(self, budget: int = DEFAULT_BUDGET, strict: bool = True):
        self.budget, self.strict = budget, strict
        self.solver = None

    def start(self, left, right, cfg):
        self.solver = GameSolver(left, right, cfg, self.budget)

    def respond(self, state, move):
        reply = self.solver.best_reply(state, move)
        if reply is None:
            if self.strict:
                raise StrategyError("no reply preserves the position type")
            return Move(other(move.side), move.kind, 0)
        return reply


class SolverSpoiler(SpoilerAgent):
    """Spoiler certificate: always move to a type Duplicator cannot match."""

    name = "solver"

    def __init__(self, solver: GameSolver):
        self.solver = solver

    def choose(self, state):
        move = self.solver.winning_spoiler_move(state)
        if move is None:
            # position already lost for Duplicator or not winnable; any legal move
            return Move.point(LEFT, 0)
        return move


def solve_game(a: FiniteStructure, b: FiniteStructure, cfg: GameConfig,
               budget: int = DEFAULT_BUDGET, reduce: str | bool = "auto") -> GameResult:
    """Decide who wins ``G_r^M(a, b)``; the certificate is a replayable winning strategy."""
    solver = GameSolver(a, b, cfg, budget, reduce)
    if solver.duplicator_wins():
        return GameResult(DUPLICATOR, SolverDuplicator(solver), solver)
    return GameResult(SPOILER, SolverSpoiler(solver), solver)
