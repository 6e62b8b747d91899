"""Positions, moves and the play harness of the r-round (mod M) game.

Spoiler agents implement ``choose(state) -> Move``; Duplicator strategies
implement ``respond(state, move) -> Move``. Both get ``start(left, right, cfg)``
before a game. Strategy objects serve one game at a time.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..structures import (
    FiniteStructure, TwofoldMapping, lcm_of, mask_of, members_of, twofold_violation,
)

__all__ = [
    "LEFT", "RIGHT", "GameConfig", "Move", "GameState", "Outcome", "Strategy",
    "SpoilerAgent", "IdentityStrategy", "RandomSpoiler", "GreedySpoiler",
    "ScriptedSpoiler", "StrategyError", "play_game", "format_transcript",
    "parse_move", "parse_script",
]

LEFT, RIGHT = "left", "right"
SPOILER, DUPLICATOR = "Spoiler", "Duplicator"


def other(side: str) -> str:
    return RIGHT if side == LEFT else LEFT


class StrategyError(RuntimeError):
    """A strategy cannot be instantiated or produced an impossible move."""


@dataclass(frozen=True)
class GameConfig:
    rounds: int
    moduli: frozenset = frozenset()

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        ms = frozenset(int(m) for m in self.moduli)
        if any(m < 1 for m in ms):
            raise ValueError("moduli must be positive")
        object.__setattr__(self, "moduli", ms)

    @property
    def lcm(self) -> int:
        return lcm_of(self.moduli)

    def __str__(self):
        return f"r={self.rounds} M={{{','.join(map(str, sorted(self.moduli)))}}}"


@dataclass(frozen=True)
class Move:
    side: str
    kind: str  # "point" or "set"
    value: int  # element id, or bitmask for set moves

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"bad side {self.side!r}")
        if self.kind not in ("point", "set"):
            raise ValueError(f"bad move kind {self.kind!r}")

    @classmethod
    def point(cls, side: str, e: int) -> "Move":
        return cls(side, "point", e)

    @classmethod
    def set(cls, side: str, elements: Iterable[int] | int) -> "Move":
        value = elements if isinstance(elements, int) else mask_of(elements)
        return cls(side, "set", value)

    def text(self) -> str:
        if self.kind == "point":
            return f"point {self.value}"
        return "set {" + ",".join(map(str, members_of(self.value))) + "}"

    def __str__(self):
        return f"{self.side} {self.text()}"


@dataclass(frozen=True)
class GameState:
    left: FiniteStructure
    right: FiniteStructure
    cfg: GameConfig
    mapping: TwofoldMapping = TwofoldMapping()

    @property
    def played(self) -> int:
        return len(self.mapping.set_pairs) + len(self.mapping.point_pairs)

    @property
    def remaining(self) -> int:
        return self.cfg.rounds - self.played

    def structure(self, side: str) -> FiniteStructure:
        return self.left if side == LEFT else self.right

    def chosen(self, side: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.mapping.side(0 if side == LEFT else 1)

    def after(self, spoiler: Move, reply: Move) -> "GameState":
        lm, rm = (spoiler, reply) if spoiler.side == LEFT else (reply, spoiler)
        if spoiler.kind == "set":
            mapping = self.mapping.with_sets(lm.value, rm.value)
        else:
            mapping = self.mapping.with_points(lm.value, rm.value)
        return GameState(self.left, self.right, self.cfg, mapping)

    def violation(self) -> str | None:
        return twofold_violation(self.left, self.right, self.mapping, self.cfg.moduli)


def legal(state: GameState, move: Move) -> bool:
    n = state.structure(move.side).n
    if move.kind == "point":
        return 0 <= move.value < n
    return 0 <= move.value and not move.value >> n


class Strategy:
    """A Duplicator strategy."""

    name = "strategy"

    def start(self, left: FiniteStructure, right: FiniteStructure, cfg: GameConfig) -> None:
        pass

    def respond(self, state: GameState, move: Move) -> Move:
        raise NotImplementedError


class SpoilerAgent:
    name = "spoiler"

    def start(self, left: FiniteStructure, right: FiniteStructure, cfg: GameConfig) -> None:
        pass

    def choose(self, state: GameState) -> Move:
        raise NotImplementedError


class IdentityStrategy(Strategy):
    """Copies every move; wins whenever the two structures are equal."""

    name = "identity"

    def respond(self, state, move):
        return Move(other(move.side), move.kind, move.value)


@dataclass
class Round:
    index: int
    spoiler: Move
    duplicator: Move | None

    def line(self) -> str:
        d = self.duplicator.text() if self.duplicator is not None else "-"
        return f"round {self.index}: S {self.spoiler.side} {self.spoiler.text()} / D {d}"


@dataclass
class Outcome:
    winner: str
    transcript: list[Round] = field(default_factory=list)
    violation: str | None = None
    protocol_error: str | None = None

    @property
    def illegal(self) -> bool:
        return self.protocol_error is not None

    def __str__(self):
        return format_transcript(self)


def format_transcript(outcome: Outcome) -> str:
    lines = [r.line() for r in outcome.transcript]
    lines.append(f"winner: {outcome.winner}")
    if outcome.violation:
        lines.append(f"violated: {outcome.violation}")
    if outcome.protocol_error:
        lines.append(f"protocol error: {outcome.protocol_error}")
    return "\n".join(lines)


def play_game(left: FiniteStructure, right: FiniteStructure, cfg: GameConfig,
              spoiler: SpoilerAgent, duplicator: Strategy, stop_early: bool = True) -> Outcome:
    """Play one game; stops as soon as the position is lost for Duplicator.

    Stopping early never changes the winner, since a violated condition stays
    violated in every extension of the position.
    """
    spoiler.start(left, right, cfg)
    state = GameState(left, right, cfg)
    transcript: list[Round] = []
    try:
        duplicator.start(left, right, cfg)
    except StrategyError as exc:
        return Outcome(SPOILER, transcript, None, f"Duplicator failed: {exc}")
    for i in range(1, cfg.rounds + 1):
        try:
            move = spoiler.choose(state)
        except StrategyError as exc:
            return Outcome(DUPLICATOR, transcript, None, f"Spoiler failed: {exc}")
        if not isinstance(move, Move) or not legal(state, move):
            return Outcome(DUPLICATOR, transcript, None, f"Spoiler made an illegal move: {move}")
        try:
            reply = duplicator.respond(state, move)
        except StrategyError as exc:
            transcript.append(Round(i, move, None))
            return Outcome(SPOILER, transcript, None, f"Duplicator failed: {exc}")
        if (not isinstance(reply, Move) or reply.side != other(move.side)
                or reply.kind != move.kind or not legal(state, reply)):
            transcript.append(Round(i, move, None))
            return Outcome(SPOILER, transcript, None, f"Duplicator made an illegal move: {reply}")
        transcript.append(Round(i, move, reply))
        state = state.after(move, reply)
        if stop_early or i == cfg.rounds:
            v = state.violation()
            if v is not None:
                return Outcome(SPOILER, transcript, v)
    v = state.violation()
    return Outcome(DUPLICATOR if v is None else SPOILER, transcript, v)


# --- Spoiler agents ----------------------------------------------------------

class RandomSpoiler(SpoilerAgent):
    """Uniform side and move kind; set sizes drawn uniformly before the members."""

    name = "random"

    def __init__(self, seed: int = 0, set_bias: float = 0.5):
        self.rng = random.Random(seed)
        self.set_bias = set_bias

    def choose(self, state):
        rng = self.rng
        side = rng.choice((LEFT, RIGHT))
        n = state.structure(side).n
        if rng.random() < self.set_bias:
            k = rng.randint(0, n)
            return Move.set(side, rng.sample(range(n), k))
        return Move.point(side, rng.randrange(n))


def _signature(state: GameState, side: str, e: int) -> tuple:
    sets, points = state.chosen(side)
    return tuple(s >> e & 1 for s in sets) + (e in points,)


class GreedySpoiler(SpoilerAgent):
    """Test adversary preferring moves that tighten the constraints.

    Set moves: sizes whose residues (mod each modulus) are rare among the
    candidate sizes on the other side, small sets, co-small sets and copies or
    near-copies of earlier choices. Point moves: elements in the smallest
    membership region. Scoring is heuristic only.
    """

    name = "greedy"

    def __init__(self, seed: int = 0, candidates: int = 24):
        self.rng = random.Random(seed)
        self.candidates = candidates

    def choose(self, state):
        rng = self.rng
        best, best_score = None, None
        lcm = state.cfg.lcm
        for side in (LEFT, RIGHT):
            a = state.structure(side)
            n = a.n
            regions: dict[tuple, list[int]] = {}
            for e in range(n):
                regions.setdefault(_signature(state, side, e), []).append(e)
            # point candidates: one per region, smallest regions score highest
            for members in regions.values():
                e = rng.choice(members)
                score = 1.0 / len(members) + rng.random() * 0.1
                cand = Move.point(side, e)
                if best_score is None or score > best_score:
                    best, best_score = cand, score
            # set candidates
            sets, _ = state.chosen(side)
            masks = []
            for _ in range(self.candidates):
                k = rng.choice([1, 2, lcm - 1 if lcm > 1 else 1, n // 2, n - 1, n - 2,
                                rng.randint(0, n)])
                k = max(0, min(n, k))
                masks.append(mask_of(rng.sample(range(n), k)))
            for s in sets:
                masks.append(s)
                if n:
                    masks.append(s ^ (1 << rng.randrange(n)))
            for region in regions.values():
                masks.append(mask_of(region))
                masks.append(mask_of(region[: max(1, len(region) // 2)]))
            for mask in masks:
                c = mask.bit_count()
                tight = min(c, n - c)
                score = 1.0 / (1 + tight) + (0.3 if c % lcm else 0.0) + rng.random() * 0.2
                if mask in sets:
                    score += 0.25
                if best_score is None or score > best_score:
                    best, best_score = Move.set(side, mask), score
        return best


def parse_move(text: str) -> Move:
    """Parse ``<side> point <e>`` or ``<side> set <e1 e2 ...>`` (braces and commas optional)."""
    m = re.match(r"\s*(?:round\s+\d+:\s*S\s+)?(left|right)\s+(point|set)\s*(.*?)\s*(?:/.*)?$", text)
    if not m:
        raise ValueError(f"cannot parse move {text!r}")
    side, kind, rest = m.groups()
    ids = [int(x) for x in re.findall(r"\d+", rest)]
    if kind == "point":
        if len(ids) != 1:
            raise ValueError(f"point move needs exactly one element: {text!r}")
        return Move.point(side, ids[0])
    return Move.set(side, ids)


_ANNOTATIONS = ("winner", "violated", "protocol error", "witness:", "seed")


def parse_script(text: str) -> list[Move]:
    """Spoiler moves from a script or a transcript; outcome and witness lines are skipped."""
    moves = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line and not line.startswith(_ANNOTATIONS):
            moves.append(parse_move(line))
    return moves


class ScriptedSpoiler(SpoilerAgent):
    name = "scripted"

    def __init__(self, moves: Sequence[Move]):
        self.moves = list(moves)
        self.i = 0

    def start(self, left, right, cfg):
        self.i = 0

    def choose(self, state):
        if self.i >= len(self.moves):
            raise StrategyError("script exhausted")
        move = self.moves[self.i]
        self.i += 1
        return move
