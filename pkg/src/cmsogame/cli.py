"""Command-line front end.

Exit codes: 0 computed and the property holds (or Duplicator won), 1 the
property is refuted (a witness block follows), 2 usage or parse error,
3 precondition or budget error.
"""

from __future__ import annotations

import argparse
import dataclasses
import re
import sys
from typing import Callable, TextIO

from . import __version__
from .games import (
    DUPLICATOR, BudgetExceeded, FormulaTooLarge, GameConfig, GameSolver, GameState,
    GreedySpoiler, IdentityStrategy, RandomSpoiler, ScriptedSpoiler, SolverSpoiler,
    SolverStrategy, SpoilerAgent, Strategy, StrategyError, extract_distinguishing_formula,
    format_transcript, grid_strategy, parse_move, parse_script, play_game, set_lemma_strategy,
    union_strategy,
)
from .games.core import legal
from .grids import (
    GridError, GridSpec, builtin_formulas, grid_shape, make_grid, native_divides_oracle,
    witness_parameters,
)
from .grids.assets import BUILTIN_NAMES
from .games.thresholds import grid_threshold
from .logic import (
    FormulaSyntaxError, Invariant, TranslationError, Vocabulary, check_order_invariance,
    counting_to_order_invariant, eliminate_remainders, evaluate, parse_formula, render,
    rewrite_counting_to_predicates,
)
from .logic.evaluate import EvaluationError
from .structures import (
    FiniteStructure, LinearOrder, StructureError, parse_structure, render_structure,
)

OK, REFUTED, USAGE, PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class PreconditionError(Exception):
    pass


# --- argument helpers -----------------------------------------------------------

def moduli_arg(text: str) -> frozenset:
    if text.strip() == "":
        return frozenset()
    try:
        ms = frozenset(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"moduli must be a comma-separated list: {text!r}")
    if any(m < 1 for m in ms):
        raise argparse.ArgumentTypeError("moduli must be positive")
    return ms


def orders_arg(text: str) -> tuple[str, int]:
    if text == "all":
        return ("all", 0)
    m = re.fullmatch(r"sample:(\d+)", text)
    if not m or int(m.group(1)) < 1:
        raise argparse.ArgumentTypeError("--orders takes 'all' or 'sample:<n>'")
    return ("sample", int(m.group(1)))


def nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def read_structure(path: str) -> FiniteStructure:
    try:
        with open(path) as fh:
            return parse_structure(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except StructureError as exc:
        raise UsageError(f"{path}: {exc}")


def formula_text(args) -> str:
    if args.expr is not None:
        text = args.expr
    elif args.file is not None:
        try:
            with open(args.file) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}")
    else:
        raise UsageError("give a formula with -e or -f")
    formulas = builtin_formulas()

    def expand(m):
        name = m.group(1)
        if name not in formulas:
            raise UsageError(f"unknown built-in formula <{name}>; known: {', '.join(BUILTIN_NAMES)}")
        return "(" + render(formulas[name]) + ")"

    return re.sub(r"<([A-Za-z_][A-Za-z_0-9]*)>", expand, text)


def read_formula(args, structure: FiniteStructure | None = None):
    text = formula_text(args)
    vocab = Vocabulary.of(structure) if structure is not None else None
    try:
        return parse_formula(text, vocab)
    except FormulaSyntaxError as exc:
        raise UsageError(f"formula: {exc}")


def config_header(out: TextIO, command: str, **fields) -> None:
    parts = [f"{k}={v}" for k, v in fields.items() if v is not None]
    print(f"# {command} " + " ".join(parts), file=out)


def moduli_text(ms) -> str:
    return "{" + ",".join(map(str, sorted(ms))) + "}"


# --- strategies and agents ----------------------------------------------------------

def build_duplicator(spec: str, left: FiniteStructure, right: FiniteStructure,
                     cfg: GameConfig, budget: int, force: bool) -> tuple[Strategy, FiniteStructure, FiniteStructure]:
    """Strategy from a ``--duplicator`` value; unions may re-split the structures."""
    check = not force
    if spec == "solver":
        return SolverStrategy(budget, strict=False), left, right
    if spec == "identity":
        return IdentityStrategy(), left, right
    if spec == "set-lemma":
        return set_lemma_strategy(left.n, right.n, cfg, check), left, right
    if spec == "grid-lemma":
        k, l1, l2 = grid_dimensions(left, right)
        return grid_strategy(k, l1, l2, cfg, check), left, right
    m = re.fullmatch(r"union:(\d+),(\d+)(?::([a-z-]+)\+([a-z-]+))?", spec)
    if m:
        split_a, split_b = int(m.group(1)), int(m.group(2))
        if not (0 < split_a < left.n and 0 < split_b < right.n):
            raise PreconditionError("union split points must cut both structures into nonempty parts")
        names = (m.group(3) or "set-lemma", m.group(4) or "set-lemma")
        left = dataclasses.replace(left, split=split_a)
        right = dataclasses.replace(right, split=split_b)
        parts = []
        for name, (na, nb) in zip(names, ((split_a, split_b), (left.n - split_a, right.n - split_b))):
            if name == "set-lemma":
                parts.append(set_lemma_strategy(na, nb, cfg, check))
            elif name == "solver":
                parts.append(SolverStrategy(budget))
            elif name == "identity":
                parts.append(IdentityStrategy())
            else:
                raise UsageError(f"unknown union component strategy {name!r}")
        return union_strategy(*parts), left, right
    raise UsageError(f"unknown duplicator {spec!r}")


def grid_dimensions(left: FiniteStructure, right: FiniteStructure) -> tuple[int, int, int]:
    shapes = []
    for a in (left, right):
        if "sim_h" in a.relations:
            k, l = grid_shape(a)
        else:
            k = len(a.set_predicates)
            if k == 0 or a.n % k:
                raise PreconditionError("structure is not a grid")
            l = a.n // k
        shapes.append((k, l))
    if shapes[0][0] != shapes[1][0]:
        raise PreconditionError("grids must have the same number of rows")
    return shapes[0][0], shapes[0][1], shapes[1][1]


class HumanSpoiler(SpoilerAgent):
    """Reads Spoiler moves from a text stream, re-prompting on bad input."""

    name = "human"

    def __init__(self, inp: TextIO, out: TextIO):
        self.inp, self.out = inp, out

    def choose(self, state):
        print(f"position: {mapping_text(state)}", file=self.out)
        while True:
            print(f"round {state.played + 1}/{state.cfg.rounds}, "
                  "your move (e.g. 'left point 0' or 'right set 0 2'): ", end="", file=self.out)
            self.out.flush()
            line = self.inp.readline()
            if not line:
                raise EOFError
            try:
                move = parse_move(line)
            except ValueError as exc:
                print(f"  {exc}", file=self.out)
                continue
            if not legal(state, move):
                print(f"  illegal move: {move} leaves the {move.side} universe", file=self.out)
                continue
            return move


def mapping_text(state: GameState) -> str:
    from .structures import members_of
    parts = []
    for i, (x, y) in enumerate(state.mapping.set_pairs, 1):
        parts.append(f"X{i}: {{{','.join(map(str, members_of(x)))}}} -> {{{','.join(map(str, members_of(y)))}}}")
    for i, (x, y) in enumerate(state.mapping.point_pairs, 1):
        parts.append(f"x{i}: {x} -> {y}")
    return "; ".join(parts) if parts else "(empty)"


class _Echo(Strategy):
    """Wraps a strategy and prints each reply for interactive sessions."""

    def __init__(self, inner: Strategy, out: TextIO):
        self.inner, self.out = inner, out
        self.name = inner.name

    def start(self, left, right, cfg):
        self.inner.start(left, right, cfg)

    def respond(self, state, move):
        reply = self.inner.respond(state, move)
        print(f"  Duplicator answers {reply}", file=self.out)
        return reply


def build_spoiler(spec: str, seed: int, inp: TextIO, out: TextIO) -> SpoilerAgent:
    if spec == "random":
        return RandomSpoiler(seed)
    if spec == "greedy":
        return GreedySpoiler(seed)
    if spec == "human":
        return HumanSpoiler(inp, out)
    if spec.startswith("scripted:"):
        path = spec.split(":", 1)[1]
        try:
            with open(path) as fh:
                return ScriptedSpoiler(parse_script(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}")
        except ValueError as exc:
            raise UsageError(f"{path}: {exc}")
    raise UsageError(f"unknown spoiler {spec!r}")


def witness_block(lines: list[str]) -> str:
    return "\n".join(["witness:"] + [f"  {line}" for line in lines])


# --- subcommands -------------------------------------------------------------------

def cmd_eval(args, out, inp):
    a = read_structure(args.structure)
    f = read_formula(args, a)
    config_header(out, "eval", structure=args.structure, orders=args.orders_text, seed=args.seed)
    if args.orders is None:
        try:
            value = evaluate(a, f)
        except EvaluationError as exc:
            raise PreconditionError(str(exc))
        print("true" if value else "false", file=out)
        return OK
    return report_invariance(a, f, args, out)


def report_invariance(a, f, args, out):
    mode, count = args.orders or ("all", 0)
    if a.order is not None:
        a = a.with_order(None)
    try:
        result = check_order_invariance(a, f, mode=mode, count=count, seed=args.seed)
    except (ValueError, EvaluationError) as exc:
        raise PreconditionError(str(exc))
    if isinstance(result, Invariant):
        print(f"invariant: {'true' if result.value else 'false'} under {result.orders_checked} orders", file=out)
        return OK
    print("not order-invariant", file=out)
    print(witness_block([
        "order: " + " ".join(map(str, result.order1.sequence)) + f"  -> {str(result.value1).lower()}",
        "order: " + " ".join(map(str, result.order2.sequence)) + f"  -> {str(not result.value1).lower()}",
    ]), file=out)
    return REFUTED


def cmd_invariance(args, out, inp):
    a = read_structure(args.structure)
    f = read_formula(args, a)
    if args.orders is None:
        args.orders, args.orders_text = ("all", 0), "all"
    config_header(out, "invariance check", structure=args.structure, orders=args.orders_text,
                  seed=args.seed)
    return report_invariance(a, f, args, out)


def _cfg(args) -> GameConfig:
    return GameConfig(args.rounds, args.moduli)


def cmd_solve(args, out, inp):
    a, b = read_structure(args.left), read_structure(args.right)
    cfg = _cfg(args)
    config_header(out, "game solve", r=cfg.rounds, M=moduli_text(cfg.moduli), budget=args.budget,
                  seed=args.seed)
    solver = GameSolver(a, b, cfg, args.budget)
    if solver.duplicator_wins():
        print(f"winner: {DUPLICATOR}", file=out)
        outcome = play_game(a, b, cfg, RandomSpoiler(args.seed), SolverStrategy(args.budget))
        print("certificate: solver strategy; sample game against a random Spoiler:", file=out)
    else:
        print("winner: Spoiler", file=out)
        outcome = play_game(a, b, cfg, SolverSpoiler(solver), SolverStrategy(args.budget, strict=False))
        print("certificate: solver Spoiler against the best Duplicator replies:", file=out)
    print(format_transcript(outcome), file=out)
    print(f"nodes: {solver.nodes}", file=out)
    return OK


def cmd_play(args, out, inp):
    a, b = read_structure(args.left), read_structure(args.right)
    cfg = _cfg(args)
    config_header(out, "game play", r=cfg.rounds, M=moduli_text(cfg.moduli), spoiler=args.spoiler,
                  duplicator=args.duplicator, seed=args.seed, games=args.games)
    try:
        duplicator, a, b = build_duplicator(args.duplicator, a, b, cfg, args.budget, args.force)
    except (StrategyError, GridError) as exc:
        raise PreconditionError(str(exc))
    human = args.spoiler == "human"
    if human:
        duplicator = _Echo(duplicator, out)
    games = 1 if human or args.spoiler.startswith("scripted:") else args.games
    lost = None
    for g in range(games):
        spoiler = build_spoiler(args.spoiler, args.seed + g, inp, out)
        try:
            outcome = play_game(a, b, cfg, spoiler, duplicator)
        except EOFError:
            print("\naborted: end of input", file=out)
            return PRECONDITION
        if games == 1:
            print(format_transcript(outcome), file=out)
        if outcome.winner != DUPLICATOR and lost is None:
            lost = (g, outcome)
    if games > 1:
        print(f"games: {games}, Duplicator lost: {0 if lost is None else 'yes'}", file=out)
    if lost is None:
        return OK
    g, outcome = lost
    print(witness_block([f"seed {args.seed + g}"] + format_transcript(outcome).splitlines()), file=out)
    return REFUTED


def cmd_distinguish(args, out, inp):
    a, b = read_structure(args.left), read_structure(args.right)
    cfg = _cfg(args)
    config_header(out, "game distinguish", r=cfg.rounds, M=moduli_text(cfg.moduli), budget=args.budget)
    try:
        f = extract_distinguishing_formula(a, b, cfg, args.budget)
    except ValueError as exc:
        raise PreconditionError(str(exc))
    except FormulaTooLarge as exc:
        raise PreconditionError(str(exc))
    print(render(f), file=out)
    return OK


def cmd_grid(args, out, inp):
    try:
        g = make_grid(GridSpec(args.k, args.l, args.coloured))
    except GridError as exc:
        raise PreconditionError(str(exc))
    out.write(render_structure(g))
    return OK


_TRANSLATIONS: dict[str, Callable] = {
    "count-to-pred": lambda f: rewrite_counting_to_predicates(f, "to_predicates"),
    "pred-to-count": lambda f: rewrite_counting_to_predicates(f, "to_quantifiers"),
    "elim-remainder": eliminate_remainders,
    "count-to-order": counting_to_order_invariant,
}


def cmd_translate(args, out, inp):
    f = read_formula(args)
    try:
        g = _TRANSLATIONS[args.direction](f)
    except TranslationError as exc:
        raise PreconditionError(str(exc))
    print(render(g), file=out)
    return OK


def cmd_separate(args, out, inp):
    cfg = _cfg(args)
    config_header(out, "separate demo", r=cfg.rounds, M=moduli_text(cfg.moduli), seed=args.seed,
                  games=args.games)
    params = witness_parameters(cfg.rounds, cfg.moduli)
    print(f"witness parameters: s={params.s} k={params.k} l1={params.l1} l2={params.l2}", file=out)
    problems = params.problems()
    print(f"[exact] witness invariants: {'all hold' if not problems else '; '.join(problems)}", file=out)
    print(f"[exact] k | l1: {str(params.l1 % params.k == 0).lower()}; "
          f"k | l2: {str(params.l2 % params.k == 0).lower()}", file=out)
    ok = not problems
    # the divisibility sentence on small grids, by generic evaluation
    phi = builtin_formulas()["phi"]
    for k, l in ((2, 4), (2, 3)):
        g = make_grid(GridSpec(k, l)).with_order(LinearOrder.identity(k * l))
        value = evaluate(g, phi)
        ok &= value == (l % k == 0)
        print(f"[exact] phi on the {k}x{l} grid (identity order): {str(value).lower()}", file=out)
    pair = scaled_pair(params, args.budget_elements)
    if pair is None:
        print("[evidence] no grid pair within the element budget; play-off skipped", file=out)
    else:
        k, l1, l2, note = pair
        for l in (l1, l2):
            order = LinearOrder.identity(k * l)
            print(f"[evidence] divisibility walk on the {k}x{l} grid: "
                  f"{str(native_divides_oracle(k, l, order)).lower()}", file=out)
        gcfg = GameConfig(cfg.rounds, cfg.moduli)
        left, right = make_grid(GridSpec(k, l1, True)), make_grid(GridSpec(k, l2, True))
        strategy = grid_strategy(k, l1, l2, gcfg)
        losses = 0
        for g in range(args.games):
            spoiler = RandomSpoiler(args.seed + g) if g % 5 else GreedySpoiler(args.seed + g)
            outcome = play_game(left, right, gcfg, spoiler, strategy)
            losses += outcome.winner != DUPLICATOR
        print(f"[evidence] grid strategy on {k}x{l1} vs {k}x{l2} coloured grids ({note}): "
              f"{args.games} games, {losses} lost", file=out)
        ok &= losses == 0
    print("summary: exact checks are complete proofs only of the listed facts; "
          "play-offs are evidence for the equivalence", file=out)
    return OK if ok else REFUTED


def scaled_pair(params, budget: int):
    """The witness grids if they fit, else the largest smaller pair with the same properties."""
    lcm, r, ms = params.lcm, params.r, params.moduli
    if params.k * params.l2 <= budget:
        return params.k, params.l1, params.l2, "the witness pair"
    s = params.s - 1
    while s >= 1:
        k = 2 ** s
        if lcm % k:
            bound = grid_threshold(k, r, ms)
            l1 = -(-bound // (k * lcm)) * k * lcm
            if k * (l1 + lcm) <= budget:
                return k, l1, l1 + lcm, f"scaled down to k={k}"
        s -= 1
    # no pair separated by divisibility fits: keep only the column-count threshold
    for k in range(params.k - 1, 0, -1):
        l1 = grid_threshold(k, r, ms)
        if l1 and k * (l1 + lcm) <= budget:
            return k, l1, l1 + lcm, f"scaled down to k={k}, threshold only"
    return None


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmsogame", description="Counting MSO games, formulas and grids.",
                                epilog=__doc__.split("\n\n", 1)[1],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def formula_flags(q):
        q.add_argument("-e", dest="expr", help="formula text; <name> inserts a built-in formula")
        q.add_argument("-f", dest="file", help="file holding the formula")

    def game_flags(q, rounds_required=True):
        q.add_argument("-r", dest="rounds", type=nonneg, required=rounds_required, default=1)
        q.add_argument("-M", dest="moduli", type=moduli_arg, default=frozenset(),
                       help="moduli, e.g. 2,3 (empty for plain MSO)")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--budget", type=int, default=3_000_000, help="solver node budget")

    def common_out(q):
        q.add_argument("-o", dest="output", help="write the report to this file")

    q = sub.add_parser("eval", help="evaluate a formula on a structure")
    q.add_argument("structure")
    formula_flags(q)
    q.add_argument("--orders", type=orders_arg, help="all | sample:<n>: evaluate under orders")
    q.add_argument("--seed", type=int, default=0)
    common_out(q)
    q.set_defaults(run=cmd_eval)

    game = sub.add_parser("game", help="the r-round (mod M) game").add_subparsers(
        dest="game_command", required=True)
    q = game.add_parser("solve", help="decide the winner by exhaustive search")
    q.add_argument("left")
    q.add_argument("right")
    game_flags(q)
    common_out(q)
    q.set_defaults(run=cmd_solve)
    q = game.add_parser("play", help="play games between two agents")
    q.add_argument("left")
    q.add_argument("right")
    game_flags(q)
    q.add_argument("--spoiler", default="random", help="random | greedy | scripted:<file> | human")
    q.add_argument("--duplicator", default="solver",
                   help="solver | set-lemma | grid-lemma | identity | union:<a>,<b>[:<s1>+<s2>]")
    q.add_argument("--games", type=int, default=1, help="number of seeded games")
    q.add_argument("--force", action="store_true", help="build the strategy even if its hypotheses fail")
    common_out(q)
    q.set_defaults(run=cmd_play)
    q = game.add_parser("distinguish", help="extract a separating sentence")
    q.add_argument("left")
    q.add_argument("right")
    game_flags(q)
    common_out(q)
    q.set_defaults(run=cmd_distinguish)

    grid = sub.add_parser("grid", help="grid generator").add_subparsers(dest="grid_command", required=True)
    q = grid.add_parser("gen", help="write a k x l grid structure")
    q.add_argument("k", type=int)
    q.add_argument("l", type=int)
    q.add_argument("--coloured", action="store_true")
    common_out(q)
    q.set_defaults(run=cmd_grid)

    inv = sub.add_parser("invariance", help="order-invariance checks").add_subparsers(dest="inv_command", required=True)
    q = inv.add_parser("check", help="evaluate under every or sampled orders")
    q.add_argument("structure")
    formula_flags(q)
    q.add_argument("--orders", type=orders_arg)
    q.add_argument("--seed", type=int, default=0)
    common_out(q)
    q.set_defaults(run=cmd_invariance)

    q = sub.add_parser("translate", help="rewrite counting constructs")
    q.add_argument("direction", choices=sorted(_TRANSLATIONS))
    formula_flags(q)
    common_out(q)
    q.set_defaults(run=cmd_translate)

    sep = sub.add_parser("separate", help="the grid separation").add_subparsers(dest="sep_command", required=True)
    q = sep.add_parser("demo", help="witness parameters and a play-off")
    game_flags(q)
    q.add_argument("--games", type=int, default=100)
    q.add_argument("--budget-elements", type=int, default=4096,
                   help="largest grid universe used in the play-off")
    common_out(q)
    q.set_defaults(run=cmd_separate)
    return p


def run(argv=None, out: TextIO | None = None, inp: TextIO | None = None) -> int:
    out = out or sys.stdout
    inp = inp or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if hasattr(args, "orders"):
        args.orders_text = None if args.orders is None else (
            "all" if args.orders[0] == "all" else f"sample:{args.orders[1]}")
    target = out
    if getattr(args, "output", None):
        try:
            target = open(args.output, "w")
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return USAGE
    try:
        return args.run(args, target, inp)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (PreconditionError, BudgetExceeded, StrategyError, GridError, StructureError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PRECONDITION
    finally:
        if target is not out:
            target.close()


def main() -> None:
    sys.exit(run())
