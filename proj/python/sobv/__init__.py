"""Second-order Boolean logic, quantified bit-vector formulas and the reduction between them."""

from ._core import (
    ArityError,
    BvFormula,
    ParseError,
    ResourceExceeded,
    So2Formula,
    SobvError,
    SortError,
    UnboundSymbolError,
    cross_check,
    decide_so2,
    emit_smt2,
    eval_so2,
    formula_size,
    gen_random_so2,
    parse_smt2,
    parse_so2,
    reduce,
    scalar_length,
    solve_bv2,
    validate,
)

__all__ = [
    "ArityError",
    "BvFormula",
    "ParseError",
    "ResourceExceeded",
    "So2Formula",
    "SobvError",
    "SortError",
    "UnboundSymbolError",
    "cross_check",
    "decide_so2",
    "emit_smt2",
    "eval_so2",
    "formula_size",
    "gen_random_so2",
    "parse_smt2",
    "parse_so2",
    "reduce",
    "scalar_length",
    "solve_bv2",
    "validate",
]
