"""Exact arithmetic: rationals, sparse polynomials, factored rational functions."""

from .factored import (
    INF,
    ZERO,
    format_factored,
    jacobian_rank,
    OPAQUE,
    POLY,
    PRIME,
    Atom,
    FactoredRational,
    NotAUnitError,
    atoms_trans_degree,
    chart_at_infinity,
    compose,
    compose_atom,
    constant_expansion,
    factor,
    poly_atom,
    prime_atom,
    substitute,
    trans_degree,
)
from .gcd import gcd
from .poly import DomainError, MultiPoly

__all__ = [
    "INF", "ZERO", "format_factored", "jacobian_rank", "OPAQUE", "POLY", "PRIME", "Atom", "DomainError", "FactoredRational", "MultiPoly",
    "NotAUnitError", "atoms_trans_degree", "chart_at_infinity", "compose", "compose_atom",
    "constant_expansion", "factor", "gcd", "poly_atom", "prime_atom", "substitute", "trans_degree",
]
