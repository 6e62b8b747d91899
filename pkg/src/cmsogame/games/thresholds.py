"""Threshold equality, the size bound for grid strategies, and class-size transfer."""

from __future__ import annotations

from typing import Iterable, Sequence

from ..structures import lcm_of

__all__ = [
    "threshold_equal", "strategy_threshold", "grid_threshold", "set_lemma_threshold",
    "partition_transfer", "PartitionTransferError",
]


def _congruent(x: int, y: int, moduli: Iterable[int]) -> bool:
    return all((x - y) % m == 0 for m in moduli)


def threshold_equal(x: int, y: int, t: int, moduli: Iterable[int] = ()) -> bool:
    """``x == y``, or both at least ``t`` and congruent modulo every modulus."""
    return x == y or (x >= t and y >= t and _congruent(x, y, moduli))


def strategy_threshold(p: int, r: int, moduli: Iterable[int] = ()) -> int:
    """``2 * (p**r - 1) * lcm(M)``.

    Satisfies ``f(r) >= p * (f(r-1) + lcm(M) - 1)`` for ``r >= 1`` and
    ``p >= 2``, the bound :func:`partition_transfer` needs to recurse one round
    down. For ``p = 1`` the value is always 0 and the bound fails once
    ``lcm(M) > 1``; grids never use ``p = 1``.
    """
    if p < 1 or r < 0:
        raise ValueError("need p >= 1 and r >= 0")
    lcm = lcm_of(moduli)
    value = 2 * (p ** r - 1) * lcm
    if r >= 1 and p >= 2:
        prev = 2 * (p ** (r - 1) - 1) * lcm
        assert value >= p * (prev + lcm - 1)
    return value


def grid_threshold(k: int, r: int, moduli: Iterable[int] = ()) -> int:
    """Column-count threshold for ``k``-row grids: ``(2**(k*r+1) - 2) * lcm(M)``."""
    value = strategy_threshold(2 ** k, r, moduli)
    assert value == (2 ** (k * r + 1) - 2) * lcm_of(moduli)
    return value


def set_lemma_threshold(r: int, moduli: Iterable[int] = ()) -> int:
    """Size bound for pure sets: ``(2**(r+1) - 4) * lcm(M)``."""
    return (2 ** (r + 1) - 4) * lcm_of(moduli)


class PartitionTransferError(ValueError):
    pass


def partition_transfer(class_sizes: Sequence[int], size_b: int, t: int,
                       moduli: Iterable[int] = (), p: int | None = None
                       ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split ``size_b`` into classes matching ``class_sizes`` up to threshold-``t`` equality.

    ``p`` bounds the number of classes (default: their number). Requires
    ``sum(class_sizes) == size_b``, or both totals at least ``p * (t + lcm - 1)``
    and congruent. Classes below ``t`` are copied; a class of size at least ``t``
    gets ``t + l`` elements with ``l`` the least offset restoring the residue, and
    the first such class absorbs what is left over. Returns the new sizes and
    the class bijection as an index map (the identity).
    """
    moduli = tuple(moduli)
    lcm = lcm_of(moduli)
    sizes = tuple(int(c) for c in class_sizes)
    if not sizes:
        raise PartitionTransferError("need at least one class")
    if any(c < 1 for c in sizes):
        raise PartitionTransferError("class sizes must be positive")
    if t < 0 or size_b < 0:
        raise PartitionTransferError("threshold and size must be non-negative")
    p = len(sizes) if p is None else p
    if len(sizes) > p:
        raise PartitionTransferError(f"{len(sizes)} classes exceed the index bound p = {p}")
    total = sum(sizes)
    identity = tuple(range(len(sizes)))
    if total == size_b:
        return sizes, identity
    bound = p * (t + lcm - 1)
    if total < bound or size_b < bound:
        raise PartitionTransferError(
            f"sizes {total} and {size_b} differ, so both must be at least "
            f"p*(t+lcm(M)-1) = {bound}")
    if not _congruent(total, size_b, moduli):
        raise PartitionTransferError(f"sizes {total} and {size_b} are not congruent mod {sorted(moduli)}")
    out = []
    absorber = None
    for i, c in enumerate(sizes):
        if c < t:
            out.append(c)
        else:
            ell = (c - t) % lcm
            out.append(t + ell)
            if absorber is None:
                absorber = i
    assert absorber is not None, "the size bound guarantees a large class"
    used = sum(out)
    assert used <= size_b
    out[absorber] += size_b - used
    result = tuple(out)
    assert all(threshold_equal(x, y, t, moduli) for x, y in zip(sizes, result))
    return result, identity
