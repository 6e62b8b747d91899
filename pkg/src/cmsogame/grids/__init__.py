"""Grid structures, the divisibility sentence and the separating parameters."""

from .assets import BUILTIN_NAMES, GRID_VOCABULARY, builtin_formulas, formula_source
from .grid import (
    DEFAULT_GRID_BUDGET, GridError, GridSpec, colour_interpretation, colour_names, grid_shape,
    make_grid, recolour,
)
from .witness import WitnessParams, native_divides_oracle, witness_parameters

__all__ = [name for name in dir() if not name.startswith("_")]
