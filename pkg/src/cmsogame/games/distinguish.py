"""Distinguishing sentences read off the interned types of a solved game."""

from __future__ import annotations

from ..logic.syntax import (
    Card, Eq, Exists, Forall, Formula, Iff, Member, Not, Rel, SetExists, SetForall,
    conj, disj, quantifier_rank, size,
)
from ..structures import FiniteStructure
from .core import LEFT, RIGHT, GameConfig, GameState
from .solver import DEFAULT_BUDGET, GameSolver

__all__ = ["FormulaTooLarge", "extract_distinguishing_formula", "DEFAULT_NODE_CAP"]

DEFAULT_NODE_CAP = 100_000


class FormulaTooLarge(RuntimeError):
    pass


class _Extractor:
    def __init__(self, solver: GameSolver, cap: int):
        self.info = solver.table.info
        a = solver.left
        self.moduli = sorted(solver.cfg.moduli)
        self.consts = sorted(a.constants)
        self.preds = sorted(a.set_predicates)
        self.rels = sorted(a.relations)
        self.cap = cap
        self.memo: dict[tuple[int, int], Formula] = {}

    def terms(self, npoints: int) -> list[str]:
        return self.consts + [f"x{i}" for i in range(1, npoints - len(self.consts) + 1)]

    def literal(self, atom_a, atom_b) -> Formula | None:
        canon_a, res_a, pcanon_a, memb_a, pmem_a, rels_a = atom_a
        canon_b, res_b, pcanon_b, memb_b, pmem_b, rels_b = atom_b
        sets = [f"X{i}" for i in range(1, len(canon_a) + 1)]
        terms = self.terms(len(pcanon_a))
        for i, (ra, rb) in enumerate(zip(res_a, res_b)):
            for m, x, y in zip(self.moduli, ra, rb):
                if x != y:
                    return Card(m, x, sets[i])
        for i, (ca, cb) in enumerate(zip(pcanon_a, pcanon_b)):
            if ca != cb:
                if ca < i:
                    return Eq(terms[i], terms[ca])
                return Not(Eq(terms[i], terms[cb]))
        for i, (ma, mb) in enumerate(zip(memb_a, memb_b)):
            diff = ma ^ mb
            if diff:
                k = (diff & -diff).bit_length() - 1
                lit = Member(sets[k], terms[i])
                return lit if ma >> k & 1 else Not(lit)
        for i, (pa, pb) in enumerate(zip(pmem_a, pmem_b)):
            for name, x, y in zip(self.preds, pa, pb):
                if x != y:
                    lit = Member(name, terms[i])
                    return lit if x else Not(lit)
        for name, ta, tb in zip(self.rels, rels_a, rels_b):
            diff = sorted(ta ^ tb)
            if diff:
                idx = diff[0]
                lit = Rel(name, tuple(terms[i] for i in idx))
                return lit if idx in ta else Not(lit)
        for i, (ca, cb) in enumerate(zip(canon_a, canon_b)):
            if ca != cb:
                # set equality is not atomic in MSO; spelling it out costs one quantifier
                j = ca if ca < i else cb
                same = Forall("z", Iff(Member(sets[i], "z"), Member(sets[j], "z")))
                return same if ca < i else Not(same)
        return None

    def distinguish(self, ta: int, tb: int) -> Formula:
        """A formula true at positions of type ``ta`` and false at type ``tb``."""
        key = (ta, tb)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        atom_a, sets_a, points_a = self.info[ta]
        atom_b, sets_b, points_b = self.info[tb]
        if atom_a != atom_b:
            result = self.literal(atom_a, atom_b)
        else:
            if sets_a is None:
                raise AssertionError("equal rank-0 types cannot be distinguished")
            nsets, npoints = len(atom_a[0]), len(atom_a[2])
            x = f"x{npoints - len(self.consts) + 1}"
            big = f"X{nsets + 1}"
            options = []
            for succ_a, succ_b, var, ex, al in ((points_a, points_b, x, Exists, Forall),
                                                (sets_a, sets_b, big, SetExists, SetForall)):
                for s in sorted(succ_a - succ_b):
                    options.append(ex(var, conj(_unique(self.distinguish(s, t) for t in sorted(succ_b)))))
                for s in sorted(succ_b - succ_a):
                    options.append(al(var, disj(_unique(self.distinguish(t, s) for t in sorted(succ_a)))))
            if not options:
                raise AssertionError("distinct types without a distinguishing move")
            result = min(options, key=lambda f: (quantifier_rank(f), size(f)))
        if size(result) > self.cap:
            raise FormulaTooLarge(f"distinguishing formula exceeds {self.cap} nodes")
        self.memo[key] = result
        return result


def _unique(formulas):
    seen = []
    for f in formulas:
        if f not in seen:
            seen.append(f)
    return seen


def extract_distinguishing_formula(a: FiniteStructure, b: FiniteStructure, cfg: GameConfig,
                                   budget: int = DEFAULT_BUDGET, cap: int = DEFAULT_NODE_CAP,
                                   solver: GameSolver | None = None) -> Formula:
    """A sentence with ``qr <= r`` and moduli in ``M``, true in ``a`` and false in ``b``.

    Replies reaching the same type share one conjunct. Raises ``ValueError``
    when Duplicator wins, i.e. no such sentence exists.
    """
    solver = solver or GameSolver(a, b, cfg, budget)
    state = GameState(a, b, cfg)
    if solver.duplicator_wins(state):
        raise ValueError("Duplicator wins: the structures agree on all such sentences")
    return _Extractor(solver, cap).distinguish(solver.type_at(state, LEFT),
                                               solver.type_at(state, RIGHT))
