"""Counting quantifiers rewritten into order-invariant MSO.

"An even number of elements satisfy P" needs no order to state, but the MSO
rewrite walks the P-elements along an arbitrary linear order and colours them
alternately. The rewrite is order-invariant; a careless sentence is not.
"""

from cmsogame.logic import (
    Witness, check_order_invariance, counting_to_order_invariant, evaluate, parse_formula,
    quantifier_rank, render,
)
from cmsogame.structures import FiniteStructure, mask_of

counting = parse_formula("ex[2] x . P(x)")
rewritten = counting_to_order_invariant(counting)
print(f"{render(counting)}  (rank {quantifier_rank(counting)})")
print(f"becomes a rank {quantifier_rank(rewritten)} MSO sentence over < "
      f"with {len(render(rewritten))} characters")

for members in ([], [0, 3], [1, 2, 4]):
    a = FiniteStructure(5, set_predicates={"P": mask_of(members)})
    verdict = check_order_invariance(a, rewritten)
    print(f"P = {members}: counting says {evaluate(a, counting)}, rewrite says "
          f"{verdict.value} under all {verdict.orders_checked} orders")

careless = parse_formula("ex x . (P(x) & all y . (x = y | x < y))")
a = FiniteStructure(3, set_predicates={"P": mask_of([1])})
verdict = check_order_invariance(a, careless)
assert isinstance(verdict, Witness)
print(f"'{render(careless)}' depends on the order:")
print(f"  {' '.join(map(str, verdict.order1.sequence))} -> {verdict.value1}")
print(f"  {' '.join(map(str, verdict.order2.sequence))} -> {not verdict.value1}")
