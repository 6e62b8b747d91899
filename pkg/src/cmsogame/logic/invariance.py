"""Order-invariance checking by enumerating or sampling linear orders."""

from __future__ import annotations

from dataclasses import dataclass

from ..structures import DEFAULT_ORDER_CAP, FiniteStructure, LinearOrder, linear_orders
from .evaluate import Evaluator
from .syntax import Formula

__all__ = ["Invariant", "Witness", "check_order_invariance"]


@dataclass(frozen=True)
class Invariant:
    value: bool
    orders_checked: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Witness:
    """Two orders under which the formula takes different truth values."""

    order1: LinearOrder
    order2: LinearOrder
    value1: bool

    def __bool__(self):
        return False


def check_order_invariance(a: FiniteStructure, f: Formula, mode: str = "all",
                           count: int = 20, seed: int = 0,
                           cap: int = DEFAULT_ORDER_CAP) -> Invariant | Witness:
    """Evaluate ``f`` on ``a`` under every order (or ``count`` sampled ones).

    In ``all`` mode orders come in lexicographic permutation order, so the
    reported witness is the first disagreement with the identity order.
    """
    if a.order is not None:
        raise ValueError("structure already carries an order")
    first = None
    checked = 0
    for order in linear_orders(a, mode, count=count, seed=seed, cap=cap):
        value = Evaluator(a, order)(f)
        checked += 1
        if first is None:
            first = (order, value)
        elif value != first[1]:
            return Witness(first[0], order, first[1])
    if first is None:
        raise ValueError("no orders were checked")
    return Invariant(first[1], checked)
