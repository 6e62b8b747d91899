"""Divisibility on grids: what the order sees and what the game cannot.

With an order, one MSO sentence decides whether k divides l on a cliquey
k x l grid. Without it, the mod M game cannot tell a k x l1 grid from a
k x l2 grid once both are large enough, even when k divides only one of them.
"""

import itertools

from cmsogame.games import GameConfig, GreedySpoiler, RandomSpoiler, grid_strategy, play_game
from cmsogame.grids import (
    GridSpec, builtin_formulas, make_grid, native_divides_oracle, witness_parameters,
)
from cmsogame.logic.evaluate import Evaluator
from cmsogame.structures import linear_orders

phi = builtin_formulas()["phi"]
print("phi under sampled orders (k | l expected):")
for k, l in itertools.product((2, 3), (2, 3, 4)):
    grid = make_grid(GridSpec(k, l))
    values = {Evaluator(grid, order)(phi) for order in linear_orders(grid, "sample", count=8,
                                                                       seed=k * l)}
    print(f"  {k}x{l}: {sorted(values)}  divides: {l % k == 0}")

order = next(iter(linear_orders(6, "sample", count=1, seed=3)))
print(f"native check on 2x3 under {order.sequence}: {native_divides_oracle(2, 3, order)}")

w = witness_parameters(1, {2})
print(f"witness for r=1, M={{2}}: s={w.s} k={w.k} l1={w.l1} l2={w.l2}")

# The witness grids have 256 and 264 cells; k = 2 with 12 vs 14 columns is the
# smallest pair meeting the threshold, and 2 divides both, so this shows the
# strategy at work rather than the separation itself.
cfg = GameConfig(1, {2})
left, right = make_grid(GridSpec(2, 12, True)), make_grid(GridSpec(2, 14, True))
strategy = grid_strategy(2, 12, 14, cfg)
lost = sum(play_game(left, right, cfg, spoiler, strategy).winner != "Duplicator"
           for spoiler in [RandomSpoiler(s) for s in range(100)] + [GreedySpoiler(s) for s in range(20)])
print(f"coloured 2x12 vs 2x14, {cfg}: 120 games, {lost} lost")

cfg = GameConfig(w.r, w.moduli)
left, right = make_grid(GridSpec(w.k, w.l1, True)), make_grid(GridSpec(w.k, w.l2, True))
strategy = grid_strategy(w.k, w.l1, w.l2, cfg)
lost = sum(play_game(left, right, cfg, RandomSpoiler(s), strategy).winner != "Duplicator"
           for s in range(30))
print(f"witness grids {w.k}x{w.l1} vs {w.k}x{w.l2}: 30 games, {lost} lost; "
      f"{w.k} divides {w.l1} but not {w.l2}")
