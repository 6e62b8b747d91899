import itertools

import pytest

from cmsogame.games import (
    LEFT, RIGHT, GameConfig, GameState, GreedySpoiler, IdentityStrategy, Move, RandomSpoiler,
    StrategyError, grid_strategy, play_game, set_lemma_problem, set_lemma_strategy, solve_game,
    union_strategy,
)
from cmsogame.grids import GridSpec, make_grid
from cmsogame.structures import FiniteStructure, disjoint_union, expand_with_sets, mask_of


def pure(n):
    return FiniteStructure(n)


def never_loses(strategy, a, b, cfg):
    """Every Spoiler move sequence against ``strategy`` ends in a Duplicator win."""
    strategy.start(a, b, cfg)

    def rec(state):
        if state.violation() is not None:
            return False
        if state.remaining == 0:
            return True
        for side in (LEFT, RIGHT):
            n = state.structure(side).n
            for kind, values in (("point", range(n)), ("set", range(1 << n))):
                for v in values:
                    move = Move(side, kind, v)
                    try:
                        reply = strategy.respond(state, move)
                    except StrategyError:
                        return False
                    if not rec(state.after(move, reply)):
                        return False
        return True
    return rec(GameState(a, b, cfg))


def play_many(a, b, cfg, strategy, random_games=100, greedy_games=20):
    for seed in range(random_games):
        out = play_game(a, b, cfg, RandomSpoiler(seed), strategy)
        assert out.winner == "Duplicator" and not out.illegal, out
    for seed in range(greedy_games):
        out = play_game(a, b, cfg, GreedySpoiler(seed), strategy)
        assert out.winner == "Duplicator" and not out.illegal, out


# --- set lemma ------------------------------------------------------------------------

def test_set_lemma_large_case_trace():
    cfg = GameConfig(2, {2})
    s = set_lemma_strategy(8, 10, cfg)
    s.start(pure(8), pure(10), cfg)
    reply = s.respond(GameState(pure(8), pure(10), cfg), Move.set(LEFT, [3]))
    assert reply.side == RIGHT and reply.value.bit_count() == 5


def test_set_lemma_small_case_trace():
    cfg = GameConfig(3, {2})
    s = set_lemma_strategy(24, 26, cfg)
    s.start(pure(24), pure(26), cfg)
    reply = s.respond(GameState(pure(24), pure(26), cfg), Move.set(LEFT, [5, 9]))
    assert reply.value.bit_count() == 2


def test_set_lemma_point_reply_is_lowest_consistent_id():
    cfg = GameConfig(2, {2})
    s = set_lemma_strategy(8, 10, cfg)
    a, b = pure(8), pure(10)
    s.start(a, b, cfg)
    state = GameState(a, b, cfg).after(Move.set(LEFT, [0, 1, 2]), Move.set(RIGHT, [4, 5, 6, 7, 8]))
    assert s.respond(state, Move.point(LEFT, 1)) == Move.point(RIGHT, 4)
    assert s.respond(state, Move.point(LEFT, 6)) == Move.point(RIGHT, 0)
    after = state.after(Move.point(LEFT, 6), Move.point(RIGHT, 0))
    assert after.violation() is None


@pytest.mark.parametrize("sizes,cfg", [
    ((3, 5), GameConfig(1, {2})), ((2, 5), GameConfig(1, {3})), ((4, 5), GameConfig(2)),
    ((4, 6), GameConfig(2)), ((2, 2), GameConfig(2, {2})),
])
def test_set_lemma_never_loses_exhaustively(sizes, cfg):
    a, b = pure(sizes[0]), pure(sizes[1])
    assert never_loses(set_lemma_strategy(*sizes, cfg), a, b, cfg)


def test_set_lemma_refuses_outside_hypotheses():
    assert set_lemma_problem(7, 10, GameConfig(2, {2})) is not None
    assert set_lemma_problem(6, 8, GameConfig(2, {2})) is not None
    assert set_lemma_problem(1, 4, GameConfig(1, {3})) is not None
    assert solve_game(pure(1), pure(4), GameConfig(1, {3})).winner == "Spoiler"
    with pytest.raises(StrategyError):
        set_lemma_strategy(7, 10, GameConfig(2, {2}))
    with pytest.raises(StrategyError):
        set_lemma_strategy(8, 10, GameConfig(2, {2})).start(pure(8), pure(12), GameConfig(2, {2}))


def test_set_lemma_play_off():
    for (x, y), cfg in [((8, 10), GameConfig(2, {2})), ((37, 40), GameConfig(3, {3})),
                        ((25, 31), GameConfig(2, {2, 3}))]:
        play_many(pure(x), pure(y), cfg, set_lemma_strategy(x, y, cfg))


# --- union ----------------------------------------------------------------------------

def test_union_of_identities():
    a = make_grid(GridSpec(2, 2, True))
    u = disjoint_union(a, a)
    cfg = GameConfig(2, {2})
    play_many(u, u, cfg, union_strategy(IdentityStrategy(), IdentityStrategy()), 50, 10)


def test_union_of_set_lemma_strategies():
    cfg = GameConfig(1, {2})
    a, b = disjoint_union(pure(1), pure(2)), disjoint_union(pure(1), pure(4))
    s = union_strategy(set_lemma_strategy(1, 1, cfg), set_lemma_strategy(2, 4, cfg))
    for seed in range(200):
        out = play_game(a, b, cfg, RandomSpoiler(seed), s)
        assert out.winner == "Duplicator"


def test_union_with_expansions():
    cfg = GameConfig(1, {2})
    a1 = expand_with_sets(pure(1), [("P", [0])])
    b1 = expand_with_sets(pure(1), [("P", [0])])
    a2 = expand_with_sets(pure(2), [("P", [])])
    b2 = expand_with_sets(pure(4), [("P", [])])
    a, b = disjoint_union(a1, a2), disjoint_union(b1, b2)
    s = union_strategy(IdentityStrategy(), set_lemma_strategy(2, 4, cfg, check=True))
    play_many(a, b, cfg, s, 200, 50)
    assert never_loses(union_strategy(IdentityStrategy(), set_lemma_strategy(2, 4, cfg)), a, b, cfg)


def test_union_lemma_exact_on_tiny_sets():
    for x1, y1, x2, y2 in itertools.product(range(1, 4), repeat=4):
        for cfg in (GameConfig(r, ms) for r in (1, 2) for ms in ((), (2,))):
            if (solve_game(pure(x1), pure(y1), cfg).winner == "Duplicator"
                    and solve_game(pure(x2), pure(y2), cfg).winner == "Duplicator"):
                a = disjoint_union(expand_with_sets(pure(x1), [("P", range(x1))]),
                                   expand_with_sets(pure(x2), [("P", [])]))
                b = disjoint_union(expand_with_sets(pure(y1), [("P", range(y1))]),
                                   expand_with_sets(pure(y2), [("P", [])]))
                assert solve_game(a, b, cfg).winner == "Duplicator", (x1, y1, x2, y2, cfg)


def test_union_needs_split_structures():
    s = union_strategy(IdentityStrategy(), IdentityStrategy())
    with pytest.raises(StrategyError):
        s.start(pure(2), pure(2), GameConfig(1))


def test_union_rejects_component_escape():
    class Escaping(IdentityStrategy):
        def respond(self, state, move):
            return Move(RIGHT if move.side == LEFT else LEFT, move.kind, 7)
    u = disjoint_union(pure(2), pure(2))
    out = play_game(u, u, GameConfig(1), RandomSpoiler(1, set_bias=0.0),
                    union_strategy(Escaping(), Escaping()))
    assert out.winner == "Spoiler" and "left its component" in out.protocol_error


# --- grids ----------------------------------------------------------------------------

def coloured(k, l):
    return make_grid(GridSpec(k, l, True))


def test_grid_full_columns_trace():
    cfg = GameConfig(1, {2})
    s = grid_strategy(2, 12, 14, cfg)
    a, b = coloured(2, 12), coloured(2, 14)
    s.start(a, b, cfg)
    reply = s.respond(GameState(a, b, cfg), Move.set(LEFT, range(10)))
    full = sum(1 for col in range(14) if reply.value >> (2 * col) & 3 == 3)
    empty = sum(1 for col in range(14) if reply.value >> (2 * col) & 3 == 0)
    assert (full, empty) == (13, 1)


def test_grid_equal_sizes_wins():
    cfg = GameConfig(2, {2})
    play_many(coloured(2, 3), coloured(2, 3), cfg, grid_strategy(2, 3, 3, cfg), 100, 20)


def test_grid_point_replies_keep_colour():
    cfg = GameConfig(1, {2})
    s = grid_strategy(3, 24, 26, cfg, check=False)
    a, b = coloured(3, 24), coloured(3, 26)
    s.start(a, b, cfg)
    for e in range(a.n):
        reply = s.respond(GameState(a, b, cfg), Move.point(LEFT, e))
        assert reply.value % 3 == e % 3


def test_grid_play_off():
    cfg = GameConfig(1, {2})
    play_many(coloured(2, 12), coloured(2, 14), cfg, grid_strategy(2, 12, 14, cfg), 300, 60)


def test_grid_strategy_on_plain_grids():
    cfg = GameConfig(1, {2})
    a, b = make_grid(GridSpec(2, 12)), make_grid(GridSpec(2, 14))
    play_many(a, b, cfg, grid_strategy(2, 12, 14, cfg), 100, 20)


@pytest.mark.parametrize("k,l1,l2,cfg", [
    (1, 4, 6, GameConfig(1, {2})), (2, 2, 2, GameConfig(2, {2})), (1, 3, 3, GameConfig(2)),
])
def test_grid_strategy_never_loses_exhaustively(k, l1, l2, cfg):
    assert never_loses(grid_strategy(k, l1, l2, cfg), coloured(k, l1), coloured(k, l2), cfg)


def test_grid_strategy_refuses_below_threshold():
    with pytest.raises(StrategyError):
        grid_strategy(2, 10, 12, GameConfig(1, {2}))
    with pytest.raises(StrategyError):
        grid_strategy(2, 12, 13, GameConfig(1, {2}))
    assert mask_of([0, 1]) == 3
