import pytest
from hypothesis import given, settings, strategies as st

from cmsogame.games import (
    PartitionTransferError, grid_threshold, partition_transfer, set_lemma_threshold,
    strategy_threshold, threshold_equal,
)
from cmsogame.structures import lcm_of

moduli_sets = st.sets(st.sampled_from([2, 3, 4]), max_size=3).map(sorted)


@pytest.mark.parametrize("x,y,t,ms,expected", [
    (3, 3, 10, {2}, True),
    (12, 14, 12, {2}, True),
    (12, 13, 12, {2}, False),
    (4, 9, 4, set(), True),
    (3, 9, 4, set(), False),
])
def test_threshold_equal(x, y, t, ms, expected):
    assert threshold_equal(x, y, t, ms) is expected


def test_strategy_threshold_examples():
    assert strategy_threshold(4, 1, {2}) == 12 == grid_threshold(2, 1, {2})
    assert strategy_threshold(2 ** 8, 2, {2, 3}) == 786420
    assert all(strategy_threshold(p, 0, {2, 3}) == 0 for p in range(1, 9))
    assert strategy_threshold(4, 2, ()) == 30


def test_set_lemma_threshold():
    assert set_lemma_threshold(2, {2}) == 8
    assert set_lemma_threshold(1, {3}) == 0
    assert set_lemma_threshold(3, ()) == 12


@given(st.integers(2, 9), st.integers(1, 6), moduli_sets)
def test_strategy_threshold_recurrence(p, r, ms):
    lcm = lcm_of(ms)
    assert strategy_threshold(p, r, ms) >= p * (strategy_threshold(p, r - 1, ms) + lcm - 1)


def test_recurrence_fails_for_a_single_class():
    assert strategy_threshold(1, 3, {2}) == 0
    assert not strategy_threshold(1, 1, {2}) >= 1 * (strategy_threshold(1, 0, {2}) + 2 - 1)


def test_partition_transfer_examples():
    assert partition_transfer((8, 2), 8, 3, {2}) == ((6, 2), (0, 1))
    assert partition_transfer((5,), 9, 2, ()) == ((9,), (0,))
    assert partition_transfer((4, 1, 7), 12, 5, {3}) == ((4, 1, 7), (0, 1, 2))
    assert partition_transfer((5, 7), 14, 1, {2}, p=4)[0] == (13, 1)


def test_partition_transfer_reports_failed_inequality():
    with pytest.raises(PartitionTransferError, match=r"p\*\(t\+lcm\(M\)-1\) = 8"):
        partition_transfer((3, 2), 7, 3, {2})
    with pytest.raises(PartitionTransferError, match="not congruent"):
        partition_transfer((10, 10), 21, 3, {2})
    with pytest.raises(PartitionTransferError):
        partition_transfer((1, 2, 3), 6, 1, p=2)
    with pytest.raises(PartitionTransferError):
        partition_transfer((0, 3), 3, 1)
    with pytest.raises(PartitionTransferError):
        partition_transfer((), 0, 1)


@st.composite
def valid_instance(draw):
    ms = draw(moduli_sets)
    lcm = lcm_of(ms)
    p = draw(st.integers(1, 8))
    t = draw(st.integers(0, 6))
    sizes = draw(st.lists(st.integers(1, 30), min_size=1, max_size=p))
    total = sum(sizes)
    bound = p * (t + lcm - 1)
    if total < bound or draw(st.booleans()):
        return sizes, total, t, ms, p
    base = bound + (total - bound) % lcm
    size_b = base + lcm * draw(st.integers(0, 20))
    return sizes, size_b, t, ms, p


@settings(max_examples=500)
@given(valid_instance())
def test_partition_transfer_postconditions(inst):
    sizes, size_b, t, ms, p = inst
    out, g = partition_transfer(sizes, size_b, t, ms, p)
    assert sum(out) == size_b and len(out) == len(sizes)
    assert sorted(g) == list(range(len(sizes)))
    assert all(threshold_equal(sizes[i], out[g[i]], t, ms) for i in range(len(sizes)))
    assert partition_transfer(sizes, size_b, t, ms, p) == (out, g)


@settings(max_examples=300)
@given(moduli_sets, st.integers(1, 8), st.integers(0, 6),
       st.lists(st.integers(1, 30), min_size=1, max_size=8), st.integers(0, 300))
def test_partition_transfer_rejects_exactly_the_invalid(ms, p, t, sizes, size_b):
    lcm = lcm_of(ms)
    total = sum(sizes)
    bound = p * (t + lcm - 1)
    valid = len(sizes) <= p and (total == size_b or (
        total >= bound and size_b >= bound and all((total - size_b) % m == 0 for m in ms)))
    if valid:
        assert sum(partition_transfer(sizes, size_b, t, ms, p)[0]) == size_b
    else:
        with pytest.raises(PartitionTransferError):
            partition_transfer(sizes, size_b, t, ms, p)
