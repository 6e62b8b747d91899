"""MSO / counting-MSO formulas: syntax, parsing, evaluation and translations."""

from .corpus import FormulaGenerator, random_structure, sentence_corpus
from .evaluate import EvaluationError, Evaluator, evaluate
from .invariance import Invariant, Witness, check_order_invariance
from .parser import FormulaSyntaxError, Vocabulary, parse_formula
from .syntax import (
    FALSE, TRUE, And, Card, CountExists, Eq, Exists, Forall, Formula, Iff, Implies, Less,
    Member, ModSet, Not, Or, Rel, SetExists, SetForall, Top, conj, disj, free_variables,
    lcm, moduli, qr_and_moduli, quantifier_rank, render, size, substitute, uses_order,
)
from .translate import (
    TranslationError, counting_to_order_invariant, eliminate_remainders,
    rewrite_counting_to_predicates,
)

__all__ = [name for name in dir() if not name.startswith("_")]
