"""Exact and numerical solutions of time-dependent SIS and book-algebra systems."""

from ._core import (
    Coefficient,
    DomainError,
    Error,
    ParseError,
    ScenarioError,
    book_solution,
    compare_scenario,
    deformed_book_solution,
    deformed_sis_solution,
    expm1_ratio,
    from_canonical,
    integrate,
    load_scenario,
    parse_expression,
    parse_scenario,
    run_invariants,
    run_scenario,
    sis_constant_solution,
    sis_solution,
    to_canonical,
    validity_window,
)

__all__ = [
    "Coefficient",
    "DomainError",
    "Error",
    "ParseError",
    "ScenarioError",
    "book_solution",
    "compare_scenario",
    "deformed_book_solution",
    "deformed_sis_solution",
    "expm1_ratio",
    "from_canonical",
    "integrate",
    "load_scenario",
    "parse_expression",
    "parse_scenario",
    "run_invariants",
    "run_scenario",
    "sis_constant_solution",
    "sis_solution",
    "to_canonical",
    "validity_window",
]
