"""The grid sentences, loaded from the text files next to this module.

``E_h``, ``E_v`` and ``phi_diag`` appear in the files as binary atoms and are
expanded in place by capture-avoiding substitution. All of them refer to the
free variable ``min``, which ``phi`` binds.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..logic.parser import parse_formula
from ..logic.syntax import Formula, Rel, map_children, substitute

__all__ = ["builtin_formulas", "formula_source", "BUILTIN_NAMES", "GRID_VOCABULARY"]

BUILTIN_NAMES = ("psi_grid", "phi", "phi_diag", "E_h", "E_v")
GRID_VOCABULARY = {"sim_h": 2, "sim_v": 2}
_MACROS = ("E_h", "E_v", "phi_diag")


def formula_source(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown built-in formula {name!r}")
    text = resources.files(__package__).joinpath("formulas", f"{name}.txt").read_text()
    return "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))


def _expand(f: Formula, defs: dict[str, Formula]) -> Formula:
    if isinstance(f, Rel) and f.name in defs:
        x, y = f.args
        return substitute(defs[f.name], {"x": x, "y": y})
    return map_children(f, lambda c: _expand(c, defs))


@lru_cache(maxsize=None)
def builtin_formulas() -> dict[str, Formula]:
    vocab = dict(GRID_VOCABULARY, **{m: 2 for m in _MACROS})
    raw = {name: parse_formula(formula_source(name), vocab) for name in BUILTIN_NAMES}
    defs: dict[str, Formula] = {}
    for name in _MACROS:  # each macro only uses the ones before it
        defs[name] = _expand(raw[name], defs)
    out = dict(defs)
    out["psi_grid"] = raw["psi_grid"]
    out["phi"] = _expand(raw["phi"], defs)
    return {name: out[name] for name in BUILTIN_NAMES}
