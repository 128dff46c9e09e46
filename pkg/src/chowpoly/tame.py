"""Divisorial valuations on (P^1)^p and tame symbols on wedge elements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactalg import (
    INF,
    OPAQUE,
    PRIME,
    Atom,
    DomainError,
    FactoredRational,
    MultiPoly,
    compose_atom,
    factor,
    poly_atom,
)
from .wedge import WedgeElement, wedge_of

POINT, INFINITY, GRAPH = "point", "infinity", "graph"


class UnparametrizableDivisor(DomainError):
    """A divisor that is not a graph over the remaining coordinates."""


class IndeterminateResidue(DomainError):
    """A residue computation met a non-unit; a coordinate change may help."""


@dataclass(frozen=True)
class Valuation:
    """Valuation of a prime divisor: ``var = value`` or a graph ``var = solution``.

    ``atom`` is the defining irreducible polynomial (None at infinity) and
    ``solution`` expresses ``var`` on the divisor.
    """

    kind: str
    var: str
    atom: Optional[Atom] = None
    solution: Optional[FactoredRational] = None
    value: object = None

    @classmethod
    def point(cls, var: str, value) -> "Valuation":
        if value is INF:
            return cls.infinity(var)
        value = Fraction(value)
        atom = poly_atom(MultiPoly.var(var) - value)
        return cls(POINT, var, atom, None, value)

    @classmethod
    def infinity(cls, var: str) -> "Valuation":
        return cls(INFINITY, var, None, None, INF)

    @classmethod
    def from_atom(cls, atom: Atom, variables: Sequence[str] | None = None) -> "Valuation":
        """Divisor of an atom, solved for its highest-index variable of degree 1."""
        if atom.kind == PRIME:
            raise DomainError("a constant has no divisor")
        p = atom.payload
        # names outside ``variables`` are parameters of the base field
        order = list(variables) if variables is not None else list(p.variables)
        if not any(v in order for v in p.variables):
            raise DomainError(f"{p} is a constant of the base field, not a divisor")
        for v in reversed(order):
            if p.degree(v) == 1:
                cs = p.coeffs_in(v)
                a, b = cs[1], cs.get(0, MultiPoly())
                if p.variables == (v,):
                    return cls.point(v, -b.constant_value() / a.constant_value())
                sol = factor(-b) / factor(a) if not b.is_zero() else None
                if sol is None:
                    # p = a*v with a constant would be univariate; nonconstant a means p reducible
                    raise UnparametrizableDivisor(f"divisor {p} is not irreducible")
                return cls(GRAPH, v, atom, sol, None)
        raise UnparametrizableDivisor(f"divisor {p} is not linear in any coordinate")

    @classmethod
    def graph(cls, var: str, solution) -> "Valuation":
        """Divisor ``var = solution`` with solution free of ``var``."""
        if not isinstance(solution, FactoredRational):
            return cls.point(var, solution)
        if var in solution.variables:
            raise DomainError("graph solution must not involve the solved variable")
        if solution.is_constant():
            return cls.point(var, solution.constant)
        p = MultiPoly.var(var) * solution.denominator() - solution.numerator()
        f = factor(p)
        (atom, e), = [(a, e) for a, e in f.factors if a.degree(var)]
        return cls(GRAPH, var, atom, solution, None)

    @property
    def label(self) -> str:
        if self.kind == INFINITY:
            return f"{self.var}=INF"
        if self.kind == POINT:
            return f"{self.var}={self.value}"
        from .cli.grammar import format_factored

        return f"{self.var}={format_factored(self.solution)}"

    def __str__(self):
        return self.label


def _multiplicity(p: MultiPoly, q: MultiPoly) -> Tuple[int, MultiPoly]:
    k = 0
    while True:
        try:
            q2 = q.divexact(p)
        except DomainError:
            return k, q
        q = q2
        k += 1


def atom_ord(v: Valuation, atom: Atom) -> int:
    if atom.kind == PRIME:
        return 0
    if v.kind == INFINITY:
        return -atom.payload.degree(v.var)
    if atom == v.atom:
        return 1
    if atom.kind == OPAQUE:
        return _multiplicity(v.atom.payload, atom.payload)[0]
    return 0


def ord(v: Valuation, f) -> int:  # noqa: A001 - mirrors the mathematical name
    """Order of vanishing of ``f`` along the divisor."""
    if not isinstance(f, FactoredRational):
        return 0
    return sum(e * atom_ord(v, a) for a, e in f.factors)


def _substitution(v: Valuation):
    return {v.var: v.value if v.kind == POINT else v.solution}


def unit_residue(v: Valuation, atom: Atom) -> FactoredRational:
    """Residue of the unit part of ``atom`` in the fixed chart of ``v``."""
    if atom.kind == PRIME:
        return FactoredRational.const(atom.payload)
    if v.kind == INFINITY:
        return factor(atom.payload.lc_in(v.var))
    if atom == v.atom:
        return FactoredRational.const(1)
    p = atom.payload
    if atom.kind == OPAQUE:
        k, p = _multiplicity(v.atom.payload, p)
        if k:
            atom = Atom(atom.kind, p.monic())
            scale = p.leading_coefficient()
            r = compose_atom(atom, _substitution(v))
            if r is None:
                raise IndeterminateResidue(f"residue of {p} along {v} is not a unit")
            return r * scale
    r = compose_atom(atom, _substitution(v))
    if r is None:
        raise IndeterminateResidue(f"factor {atom} vanishes identically along {v}")
    return r


def residue_unit(v: Valuation, f) -> FactoredRational:
    """Restriction of a unit ``f`` to the divisor."""
    if not isinstance(f, FactoredRational):
        f = FactoredRational.const(f)
    n = ord(v, f)
    if n:
        raise DomainError(f"not a unit along {v}: order {n}")
    out = FactoredRational.const(f.constant)
    for a, e in f.factors:
        out = out * unit_residue(v, a) ** e
    return out


def tame_symbol(v: Valuation, a: WedgeElement) -> WedgeElement:
    """Tame symbol of ``a`` along ``v``; arity drops by one."""
    if a.arity < 1:
        raise DomainError("tame symbol needs arity >= 1")
    out = WedgeElement.zero(a.arity - 1)
    ords: Dict[Atom, int] = {}
    residues: Dict[Atom, FactoredRational] = {}
    for mono, c in a.items():
        ns = []
        for x in mono:
            if x not in ords:
                ords[x] = atom_ord(v, x)
            ns.append(ords[x])
        if not any(ns):
            continue
        for x in mono:
            if x not in residues:
                residues[x] = unit_residue(v, x)
        for i, n in enumerate(ns):
            if not n:
                continue
            rest = [residues[x] for j, x in enumerate(mono) if j != i]
            sign = -1 if i % 2 else 1
            out = out + wedge_of(rest).scale(sign * n * c)
    return out


def divisor_support(a: WedgeElement, variables: Sequence[str]) -> List[Valuation]:
    """Valuations of every polynomial atom of ``a`` plus the infinity divisors.

    Atoms free of the coordinates are constants of the base field and have no divisor.
    """
    out: List[Valuation] = []
    seen = set()
    coords = set(variables)
    for x in a.atoms():
        if x.kind == PRIME or x in seen or not coords.intersection(x.variables):
            continue
        seen.add(x)
        out.append(Valuation.from_atom(x, variables))
    out.extend(Valuation.infinity(v) for v in variables)
    return out


def remaining_variables(v: Valuation, variables: Sequence[str]) -> Tuple[str, ...]:
    return tuple(x for x in variables if x != v.var)
