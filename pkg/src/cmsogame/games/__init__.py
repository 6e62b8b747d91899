"""The r-round (mod M) Ehrenfeucht-Fraisse game: play, exact solution and strategies."""

from .core import (
    DUPLICATOR, LEFT, RIGHT, SPOILER, GameConfig, GameState, GreedySpoiler, IdentityStrategy,
    Move, Outcome, RandomSpoiler, ScriptedSpoiler, SpoilerAgent, Strategy, StrategyError,
    format_transcript, legal, other, parse_move, parse_script, play_game,
)
from .distinguish import DEFAULT_NODE_CAP, FormulaTooLarge, extract_distinguishing_formula
from .solver import (
    DEFAULT_BUDGET, BudgetExceeded, GameResult, GameSolver, SolverDuplicator, SolverSpoiler,
    SolverStrategy, solve_game,
)
from .strategies import (
    GridStrategy, SetLemmaStrategy, UnionStrategy, grid_strategy, set_lemma_problem,
    set_lemma_strategy, union_strategy,
)
from .thresholds import (
    PartitionTransferError, grid_threshold, partition_transfer, set_lemma_threshold,
    strategy_threshold, threshold_equal,
)

__all__ = [name for name in dir() if not name.startswith("_")]
