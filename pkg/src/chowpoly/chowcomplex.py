"""Formal cycles [Y, a] on products of projective lines and their differential.

A cycle lives on ``Y = (P^1)^p`` with named coordinates and carries a wedge
element of arity ``n``.  Weight and degree are ``m = n - p`` and
``j = n - 2p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactalg import (
    INF,
    ZERO,
    DomainError,
    FactoredRational,
    MultiPoly,
    atoms_trans_degree,
    factor,
)
from .tame import divisor_support, remaining_variables, tame_symbol
from .wedge import Monomial, WedgeElement, pullback, wedge_of

Variables = Tuple[str, ...]


def default_variables(count: int, prefix: str = "x") -> Variables:
    return tuple(f"{prefix}{i}" for i in range(1, count + 1))


@dataclass(frozen=True)
class Cycle:
    """A generator [(P^1)^p, a]."""

    variables: Variables
    wedge: WedgeElement

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise DomainError("repeated coordinate names")

    @property
    def p(self) -> int:
        return len(self.variables)

    @property
    def n(self) -> int:
        return self.wedge.arity

    @property
    def weight(self) -> int:
        return self.n - self.p

    @property
    def degree(self) -> int:
        return self.n - 2 * self.p

    def as_sum(self) -> "CycleSum":
        return CycleSum.from_cycle(self)


class CycleSum:
    """Rational combination of cycles of fixed weight and degree.

    Stored on the basis of single wedge monomials, which already applies
    additivity ``[Y, a + b] = [Y, a] + [Y, b]``.
    """

    __slots__ = ("weight", "degree", "_terms")

    def __init__(self, weight: int, degree: int, terms: Mapping[Tuple[Variables, Monomial], object] | None = None):
        self.weight = weight
        self.degree = degree
        p, n = weight - degree, 2 * weight - degree
        if p < 0 and terms:
            raise DomainError(f"weight {weight}, degree {degree} gives negative dimension")
        clean: Dict[Tuple[Variables, Monomial], Fraction] = {}
        for (vs, mono), c in (terms or {}).items():
            if len(vs) != p or len(mono) != n:
                raise DomainError(
                    f"term with p={len(vs)}, n={len(mono)} in a sum with p={p}, n={n}"
                )
            c = Fraction(c)
            if c:
                clean[(tuple(vs), mono)] = c
        self._terms = clean

    @property
    def p(self) -> int:
        return self.weight - self.degree

    @property
    def n(self) -> int:
        return 2 * self.weight - self.degree

    @classmethod
    def zero(cls, weight: int, degree: int) -> "CycleSum":
        return cls(weight, degree)

    @classmethod
    def from_cycle(cls, cycle: Cycle, coeff=1) -> "CycleSum":
        c = Fraction(coeff)
        return cls(cycle.weight, cycle.degree, {(cycle.variables, m): c * v for m, v in cycle.wedge.terms.items()})

    @classmethod
    def from_parts(cls, weight: int, degree: int, parts: Iterable[Tuple[object, Variables, WedgeElement]]) -> "CycleSum":
        out: Dict[Tuple[Variables, Monomial], Fraction] = {}
        for c, vs, w in parts:
            c = Fraction(c)
            for m, v in w.terms.items():
                key = (tuple(vs), m)
                out[key] = out.get(key, 0) + c * v
        return cls(weight, degree, out)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def raw_terms(self) -> Dict[Tuple[Variables, Monomial], Fraction]:
        return dict(self._terms)

    def by_variety(self) -> List[Tuple[Variables, WedgeElement]]:
        """Group into one wedge element per coordinate tuple, deterministically."""
        groups: Dict[Variables, Dict[Monomial, Fraction]] = {}
        for (vs, m), c in self._terms.items():
            groups.setdefault(vs, {})[m] = c
        return [(vs, WedgeElement(self.n, groups[vs])) for vs in sorted(groups)]

    def terms(self) -> List[Tuple[Fraction, Cycle]]:
        out = []
        for vs, w in self.by_variety():
            for m, c in w.items():
                out.append((c, Cycle(vs, WedgeElement(self.n, {m: 1}))))
        return out

    def _check(self, other: "CycleSum"):
        if (self.weight, self.degree) != (other.weight, other.degree):
            raise DomainError("weight/degree mismatch")

    def __add__(self, other: "CycleSum") -> "CycleSum":
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return CycleSum(self.weight, self.degree, out)

    def __neg__(self):
        return CycleSum(self.weight, self.degree, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CycleSum":
        c = Fraction(c)
        return CycleSum(self.weight, self.degree, {k: v * c for k, v in self._terms.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, CycleSum):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return (self.weight, self.degree) == (other.weight, other.degree) and self._terms == other._terms

    def __hash__(self):
        return hash((self.weight, self.degree, frozenset(self._terms.items())))

    def __repr__(self):
        from .cli.grammar import format_cycle_sum

        return f"CycleSum(m={self.weight}, j={self.degree}, {format_cycle_sum(self)!r})"


def as_cycle_sum(s) -> CycleSum:
    if isinstance(s, Cycle):
        return CycleSum.from_cycle(s)
    return s


# ---------------------------------------------------------------------------
# simplification rules


def _killed(vs: Variables, mono: Monomial, weight: int, degree: int) -> bool:
    p = len(vs)
    coords = set(vs)
    if degree == 1 and weight >= 2 and any(not coords.intersection(a.variables) for a in mono):
        return True
    if p == 0:
        return False
    vars_seen = set()
    for a in mono:
        vars_seen.update(coords.intersection(a.variables))
    if len(vars_seen) < p:
        return True
    return atoms_trans_degree(frozenset(mono), tuple(sorted(vs))) < p


def normalize_cycle(s) -> CycleSum:
    """Drop terms that vanish by the transcendence-degree rule and, in degree 1,
    by the constant-slot rule."""
    s = as_cycle_sum(s)
    keep = {
        (vs, m): c
        for (vs, m), c in s.raw_terms().items()
        if not _killed(vs, m, s.weight, s.degree)
    }
    return CycleSum(s.weight, s.degree, keep)


# ---------------------------------------------------------------------------
# differential


def differential(s, normalize: bool = True) -> CycleSum:
    """Sum of tame symbols over all prime divisors of each term's support."""
    s = as_cycle_sum(s)
    if s.p == 0:
        # a point has no divisors
        return CycleSum.zero(s.weight, s.degree + 1)
    parts = []
    for vs, w in s.by_variety():
        for v in divisor_support(w, vs):
            r = tame_symbol(v, w)
            if r.is_zero():
                continue
            parts.append((1, remaining_variables(v, vs), r))
    out = CycleSum.from_parts(s.weight, s.degree + 1, parts)
    return normalize_cycle(out) if normalize else out


def boundary_terms(s, include_zero: bool = False) -> List[Tuple[str, Variables, WedgeElement]]:
    """The individual divisor contributions of the differential, labelled."""
    s = as_cycle_sum(s)
    out = []
    for vs, w in s.by_variety():
        for v in divisor_support(w, vs):
            r = tame_symbol(v, w)
            if include_zero or not r.is_zero():
                out.append((v.label, remaining_variables(v, vs), r))
    return out


# ---------------------------------------------------------------------------
# polylogarithmic constructors


def _lin(p: MultiPoly) -> FactoredRational:
    return factor(p)


def _value(f):
    """Normalize a point of P^1: returns FactoredRational, or 0 / INF."""
    if f is INF or f is ZERO:
        return f
    if isinstance(f, FactoredRational):
        return f
    c = Fraction(f)
    return FactoredRational.const(c) if c else ZERO


def omega_slots(m: int, f, variables: Sequence[str] | None = None) -> Optional[List[FactoredRational]]:
    """Slot list (1-x1), x1, (x1-x2), x2, ..., x_{m-1}, (x_{m-1}-f); None when f is 0 or INF."""
    if m < 2:
        raise DomainError("omega needs weight m >= 2")
    f = _value(f)
    if f is INF or f is ZERO:
        return None
    xs = list(variables) if variables is not None else list(default_variables(m - 1))
    if len(xs) != m - 1:
        raise DomainError(f"omega_{m} needs {m - 1} coordinates")
    X = [MultiPoly.var(x) for x in xs]
    slots = [_lin(1 - X[0]), _lin(X[0])]
    for i in range(1, m - 1):
        slots.append(_lin(X[i - 1] - X[i]))
        slots.append(_lin(X[i]))
    last = X[-1] * f.denominator() - f.numerator()
    slots.append(factor(last) / f.denominator_part())
    return slots


def omega(m: int, f, variables: Sequence[str] | None = None) -> WedgeElement:
    slots = omega_slots(m, f, variables)
    if slots is None:
        return WedgeElement.zero(2 * m - 1)
    return wedge_of(slots)


def omega_tilde_slots(m: int, a, variables: Sequence[str] | None = None) -> Optional[List[FactoredRational]]:
    """(1-y1), y1, ..., (1-y_{m-1}), y_{m-1}, (y1*...*y_{m-1} - a)."""
    if m < 2:
        raise DomainError("omega_tilde needs weight m >= 2")
    a = _value(a)
    if a is INF or a is ZERO:
        return None
    ys = list(variables) if variables is not None else list(default_variables(m - 1, "y"))
    if len(ys) != m - 1:
        raise DomainError(f"omega_tilde_{m} needs {m - 1} coordinates")
    slots = []
    prod = MultiPoly.const(1)
    for y in ys:
        Y = MultiPoly.var(y)
        slots.append(_lin(1 - Y))
        slots.append(_lin(Y))
        prod = prod * Y
    last = prod * a.denominator() - a.numerator()
    slots.append(factor(last) / a.denominator_part())
    return slots


def omega_tilde(m: int, a, variables: Sequence[str] | None = None) -> WedgeElement:
    slots = omega_tilde_slots(m, a, variables)
    if slots is None:
        return WedgeElement.zero(2 * m - 1)
    return wedge_of(slots)


def ladder_map(m: int, source: Sequence[str] | None = None, target: Sequence[str] | None = None) -> Dict[str, FactoredRational]:
    """x1 -> y1, x_i -> y1*...*y_i: the coordinate change taking omega to omega_tilde."""
    xs = list(source) if source is not None else list(default_variables(m - 1))
    ys = list(target) if target is not None else list(default_variables(m - 1, "y"))
    out = {}
    prod = FactoredRational.const(1)
    for x, y in zip(xs, ys):
        prod = prod * factor(MultiPoly.var(y))
        out[x] = prod
    return out


def gamma_P(m: int, P, variables: Sequence[str] | None = None) -> Cycle:
    """[(P^1)^{m-1}, (1-x1) ^ x1 ^ ... ^ (1-x_{m-1}) ^ x_{m-1} ^ P]."""
    xs = tuple(variables) if variables is not None else default_variables(m - 1)
    if len(xs) != m - 1:
        raise DomainError(f"gamma_P of weight {m} needs {m - 1} coordinates")
    if isinstance(P, MultiPoly):
        if P.is_zero():
            raise DomainError("gamma_P needs P != 0")
        P = factor(P)
    elif not isinstance(P, FactoredRational):
        P = FactoredRational.const(P)
    slots = []
    for x in xs:
        X = MultiPoly.var(x)
        slots.append(_lin(1 - X))
        slots.append(_lin(X))
    slots.append(P)
    return Cycle(xs, wedge_of(slots))


def T_m(s, m: int | None = None) -> CycleSum:
    """Send {a}_m to [(P^1)^{m-1}, omega_m(a)], linearly; {0}, {INF} go to 0."""
    m = s.weight if m is None else m
    out = CycleSum.zero(m, 1)
    xs = default_variables(m - 1)
    for point, c in s.items():
        if point is INF or point is ZERO:
            continue
        if not point.is_constant():
            raise DomainError("T_m is defined here for points over Q only")
        out = out + CycleSum.from_cycle(Cycle(xs, omega(m, point, xs)), c)
    return out


# ---------------------------------------------------------------------------
# reparametrization


@dataclass(frozen=True)
class CoordinateMap:
    """A dominant rational map given by images of the source coordinates.

    ``images`` sends each coordinate of the variety being pulled back to a
    rational function of ``target`` coordinates; ``degree`` is the degree of
    the map (1 for birational maps).
    """

    images: Mapping[str, FactoredRational]
    target: Variables
    degree: int = 1


def pullback_cycle(s, cmap: CoordinateMap) -> CycleSum:
    """[Y2, a] = (1/deg) [Y1, phi^* a], term by term."""
    s = as_cycle_sum(s)
    parts = []
    for vs, w in s.by_variety():
        if set(vs) != set(cmap.images):
            raise DomainError(f"map covers {sorted(cmap.images)}, cycle has {list(vs)}")
        parts.append((Fraction(1, cmap.degree), cmap.target, pullback(w, cmap.images)))
    return CycleSum.from_parts(s.weight, s.degree, parts)


def equal_after_reparam(a, b, maps: Iterable[CoordinateMap]) -> bool:
    """True if a equals the pullback of b under one of the listed maps."""
    a = normalize_cycle(as_cycle_sum(a))
    b = as_cycle_sum(b)
    for cmap in maps:
        if normalize_cycle(a - pullback_cycle(b, cmap)).is_zero():
            return True
    return False


def identity_map(variables: Sequence[str]) -> CoordinateMap:
    return CoordinateMap({v: factor(MultiPoly.var(v)) for v in variables}, tuple(variables))


def rename_map(source: Sequence[str], target: Sequence[str]) -> CoordinateMap:
    return CoordinateMap({s: factor(MultiPoly.var(t)) for s, t in zip(source, target)}, tuple(target))
