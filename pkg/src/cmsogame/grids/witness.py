"""Procedural divisibility check on ordered grids, and separating grid sizes."""

from __future__ import annotations

from dataclasses import dataclass

from ..games.thresholds import grid_threshold
from ..structures import LinearOrder, lcm_of

__all__ = ["native_divides_oracle", "WitnessParams", "witness_parameters"]


def native_divides_oracle(k: int, l: int, order: LinearOrder) -> bool:
    """Walk the diagonal steps from the order minimum and report whether the corner is hit.

    Successors along rows and columns come from the order restricted to the
    row and the column of the minimum; the corner is the element with no
    successor of either kind.
    """
    n = k * l
    if k < 1 or l < 1 or order.n != n or sorted(order.sequence) != list(range(n)):
        raise ValueError(f"order must list the {n} elements of a {k}x{l} grid")
    least = order.sequence[0]
    row0, col0 = least % k, least // k
    rank = order.rank
    # columns in the order their row-of-min elements appear; rows likewise
    cols = sorted(range(l), key=lambda j: rank[j * k + row0])
    rows = sorted(range(k), key=lambda i: rank[col0 * k + i])
    next_col = {cols[t]: cols[t + 1] for t in range(l - 1)}
    next_row = {rows[t]: rows[t + 1] for t in range(k - 1)}
    corner = (rows[-1], cols[-1])

    def step(row, col):
        if col not in next_col:
            return None
        if row in next_row:
            return next_row[row], next_col[col]
        return row0, next_col[col]

    pos, seen = (row0, col0), set()
    reached = False
    while pos is not None and pos not in seen:
        if pos == corner:
            reached = True
            break
        seen.add(pos)
        pos = step(*pos)
    assert reached == (l % k == 0)
    return reached


@dataclass(frozen=True)
class WitnessParams:
    r: int
    moduli: frozenset
    s: int
    k: int
    l1: int
    l2: int

    def __post_init__(self):
        for problem in self.problems():
            raise ValueError(problem)

    @property
    def lcm(self) -> int:
        return lcm_of(self.moduli)

    def problems(self) -> list[str]:
        lcm, r = self.lcm, self.r
        bound = grid_threshold(self.k, r, self.moduli)
        checks = [
            (self.s >= r + 1, "s >= r + 1"),
            (lcm % (2 ** self.s) != 0, "2^s does not divide lcm(M)"),
            (self.k == 2 ** self.s, "k = 2^s"),
            (self.l1 == 2 ** (self.k * r + 1) * lcm, "l1 = 2^(kr+1) * lcm(M)"),
            (self.l2 == self.l1 + lcm, "l2 = l1 + lcm(M)"),
            (self.l1 % self.k == 0, "k divides l1"),
            (self.l2 % self.k != 0, "k does not divide l2"),
            (all((self.l1 - self.l2) % m == 0 for m in self.moduli), "l1 = l2 mod M"),
            (min(self.l1, self.l2) >= bound, f"l1, l2 >= f(r) = {bound}"),
        ]
        return [f"witness invariant fails: {text}" for ok, text in checks if not ok]


def witness_parameters(r: int, moduli=()) -> WitnessParams:
    """Least ``s >= r+1`` with ``2**s`` not dividing ``lcm(M)``, and the grid sizes it gives."""
    if r < 0:
        raise ValueError("r must be non-negative")
    moduli = frozenset(moduli)
    lcm = lcm_of(moduli)
    s = r + 1
    while lcm % (2 ** s) == 0:
        s += 1
    k = 2 ** s
    l1 = 2 ** (k * r + 1) * lcm
    return WitnessParams(r, moduli, s, k, l1, l1 + lcm)
