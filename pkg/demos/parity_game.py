"""Parity of a bare set, seen from three sides.

A two-element and a three-element set look alike to plain MSO, but one set
move under M = {2} already exposes them. The script solves the game, reads a
separating sentence off the solution, and then lets the set-lemma strategy
defend a pair of sizes that really are equivalent.
"""

from cmsogame.games import (
    GameConfig, GreedySpoiler, RandomSpoiler, extract_distinguishing_formula, play_game,
    set_lemma_strategy, solve_game,
)
from cmsogame.logic import evaluate, qr_and_moduli, render
from cmsogame.structures import FiniteStructure

two, three = FiniteStructure(2), FiniteStructure(3)

for cfg in (GameConfig(2), GameConfig(2, {2})):
    result = solve_game(two, three, cfg)
    print(f"2 vs 3, {cfg}: {result.winner} wins ({result.nodes} solver nodes)")

cfg = GameConfig(2, {2})
sentence = extract_distinguishing_formula(two, three, cfg)
rank, moduli = qr_and_moduli(sentence)
print(f"separating sentence (rank {rank}, moduli {sorted(moduli)}):")
print(f"  {render(sentence)}")
print(f"  holds in the 2-set: {evaluate(two, sentence)}, in the 3-set: {evaluate(three, sentence)}")

# 8 and 10 reach the threshold for r = 2 and agree mod 2, so Duplicator wins.
eight, ten = FiniteStructure(8), FiniteStructure(10)
strategy = set_lemma_strategy(8, 10, cfg)
lost = 0
for seed in range(200):
    spoiler = RandomSpoiler(seed) if seed % 2 else GreedySpoiler(seed)
    lost += play_game(eight, ten, cfg, spoiler, strategy).winner != "Duplicator"
print(f"8 vs 10 with the set-lemma strategy: 200 games, {lost} lost")
print(f"solver agrees: {solve_game(eight, ten, cfg).winner}")
