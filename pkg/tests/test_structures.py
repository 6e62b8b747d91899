import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cmsogame.grids import GridSpec, make_grid
from cmsogame.structures import (
    ElementSet, FiniteStructure, LinearOrder, StructureError, TwofoldMapping, disjoint_union,
    expand_with_sets, induced_substructure, is_twofold_partial_isomorphism, lcm_of,
    linear_orders, mask_of, parse_structure, render_structure, twofold_violation,
)
from oracles import isomorphic


def small_structure(draw_n=st.integers(1, 4)):
    @st.composite
    def build(draw):
        n = draw(draw_n)
        pairs = list(itertools.product(range(n), repeat=2))
        edges = draw(st.sets(st.sampled_from(pairs)))
        p = draw(st.integers(0, (1 << n) - 1))
        return FiniteStructure(n, {"E": (2, frozenset(edges))}, {"P": p})
    return build()


def test_nonempty_universe_required():
    with pytest.raises(StructureError):
        FiniteStructure(0)


def test_tuple_out_of_range_rejected():
    with pytest.raises(StructureError):
        FiniteStructure(2, {"E": (2, {(0, 2)})})


def test_inconsistent_arity_rejected():
    with pytest.raises(StructureError):
        FiniteStructure(3, {"E": (2, {(0, 1, 2)})})


def test_element_set_basics():
    s = ElementSet.of(5, [0, 3])
    assert len(s) == 2 and 3 in s and 1 not in s
    assert list(s.complement()) == [1, 2, 4]
    with pytest.raises(StructureError):
        ElementSet.of(3, [3])


def test_lcm_of_empty_is_one():
    assert lcm_of([]) == 1
    assert lcm_of([2, 3, 4]) == 12


def test_union_of_pure_sets():
    u = disjoint_union(FiniteStructure(2), FiniteStructure(3))
    assert u.n == 5 and u.split == 2 and u.is_pure()


def test_union_of_coloured_grids_is_a_grid():
    h1 = make_grid(GridSpec(2, 1, True))
    h3 = make_grid(GridSpec(2, 3, True))
    assert isomorphic(disjoint_union(h1, h3), make_grid(GridSpec(2, 4, True)))


def test_union_keeps_empty_relation_empty():
    a = FiniteStructure(2, {"E": (2, frozenset())})
    b = FiniteStructure(1, {"E": (2, frozenset())})
    assert disjoint_union(a, b).relations["E"][1] == frozenset()


def test_union_rejects_mismatch_and_constants():
    with pytest.raises(StructureError):
        disjoint_union(FiniteStructure(1, {"E": (2, set())}), FiniteStructure(1))
    with pytest.raises(StructureError):
        disjoint_union(FiniteStructure(1, constants={"c": 0}), FiniteStructure(1, constants={"c": 0}))


def test_expand_with_sets():
    a = expand_with_sets(FiniteStructure(3), [("P", [0, 1])])
    assert list(a.predicate("P")) == [0, 1]
    empty = expand_with_sets(FiniteStructure(3), [("P", [])])
    assert len(empty.predicate("P")) == 0
    with pytest.raises(StructureError):
        expand_with_sets(a, [("P", [2])])
    with pytest.raises(StructureError):
        expand_with_sets(FiniteStructure(3), [("Q", [3])])


def test_induced_substructure():
    h = make_grid(GridSpec(2, 3, True))
    column, index = induced_substructure(h, [2, 3])
    assert isomorphic(column, make_grid(GridSpec(2, 1, True)))
    assert index == {2: 0, 3: 1}
    sub, _ = induced_substructure(FiniteStructure(5), [1, 3])
    assert sub.n == 2 and sub.is_pure()
    with pytest.raises(StructureError):
        induced_substructure(FiniteStructure(5), [])


def test_twofold_examples():
    a, b = FiniteStructure(3), FiniteStructure(4)
    assert is_twofold_partial_isomorphism(a, b, TwofoldMapping(), {2, 3})
    m = TwofoldMapping(((mask_of([0, 1]), mask_of([0, 1, 2])),))
    assert not is_twofold_partial_isomorphism(a, b, m, {2})
    assert "differ mod 2" in twofold_violation(a, b, m, {2})
    m = TwofoldMapping(((mask_of([0]), mask_of([1])),), ((0, 0),))
    assert "membership" in twofold_violation(a, b, m)
    m = TwofoldMapping(((1, 1), (1, 2)))
    assert "set equality" in twofold_violation(a, b, m)


def test_constants_act_as_points():
    a = FiniteStructure(2, set_predicates={"P": 0b01}, constants={"c": 0})
    b = FiniteStructure(2, set_predicates={"P": 0b01}, constants={"c": 1})
    assert not is_twofold_partial_isomorphism(a, b, TwofoldMapping())


@settings(max_examples=60, deadline=None)
@given(small_structure(), small_structure(), st.data())
def test_violation_is_monotone(a, b, data):
    """Extending a violated mapping never repairs it."""
    sets = data.draw(st.lists(st.tuples(st.integers(0, (1 << a.n) - 1),
                                        st.integers(0, (1 << b.n) - 1)), max_size=2))
    points = data.draw(st.lists(st.tuples(st.integers(0, a.n - 1), st.integers(0, b.n - 1)),
                                max_size=2))
    m = TwofoldMapping(tuple(sets), tuple(points))
    moduli = data.draw(st.sets(st.sampled_from([2, 3]), max_size=2))
    if twofold_violation(a, b, m, moduli) is None:
        return
    x = data.draw(st.integers(0, (1 << a.n) - 1))
    y = data.draw(st.integers(0, (1 << b.n) - 1))
    assert twofold_violation(a, b, m.with_sets(x, y), moduli) is not None
    assert twofold_violation(a, b, m.with_points(x % a.n, y % b.n), moduli) is not None


@settings(max_examples=40, deadline=None)
@given(small_structure(), small_structure())
def test_empty_moduli_drop_cardinality_clause(a, b):
    m = TwofoldMapping(((1, 0b11),))
    assert twofold_violation(a, b, m, ()) is None or "cardinality" not in twofold_violation(a, b, m, ())


@settings(max_examples=30, deadline=None)
@given(small_structure(st.integers(1, 3)), small_structure(st.integers(1, 2)),
       small_structure(st.integers(1, 2)))
def test_union_commutative_and_associative(a, b, c):
    assert isomorphic(disjoint_union(a, b), disjoint_union(b, a))
    assert isomorphic(disjoint_union(disjoint_union(a, b), c),
                      disjoint_union(a, disjoint_union(b, c)))


@settings(max_examples=30, deadline=None)
@given(small_structure())
def test_full_restriction_is_isomorphic(a):
    sub, _ = induced_substructure(a, range(a.n))
    assert isomorphic(sub, a)


def test_linear_orders():
    assert len(set(o.sequence for o in linear_orders(3))) == 6
    assert [o.sequence for o in linear_orders(1)] == [(0,)]
    first = [o.sequence for o in linear_orders(6, "sample", count=5, seed=7)]
    assert first == [o.sequence for o in linear_orders(6, "sample", count=5, seed=7)]
    with pytest.raises(StructureError):
        list(linear_orders(9))


def test_linear_order_validation():
    with pytest.raises(StructureError):
        LinearOrder((0, 0, 1))
    assert LinearOrder((2, 0, 1)).less(2, 0)


def test_text_format_round_trip():
    text = """# a small example
universe 4
rel E/2: (0,1) (1,2)
set P: 0 3
const c = 2
order: 3 2 1 0
"""
    a = parse_structure(text)
    assert a.holds("E", (1, 2)) and list(a.predicate("P")) == [0, 3]
    assert a.constants == {"c": 2} and a.order.sequence == (3, 2, 1, 0)
    assert parse_structure(render_structure(a)) == a


@pytest.mark.parametrize("text", ["rel E/2: (0,1)", "universe 2\nrel E/2: (0,5)",
                                  "universe 2\nbogus", "universe 2\norder: 0 0"])
def test_text_format_errors(text):
    with pytest.raises(StructureError):
        parse_structure(text)
