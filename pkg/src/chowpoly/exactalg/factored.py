"""Atoms, factored rational functions and the partial factorizer.

Factorization is deliberately partial: rational content, square-free
decomposition, splitting of factors that are linear in some variable, and
rational-root extraction for univariate parts.  Whatever survives without
a proof of irreducibility becomes an ``opaque`` atom.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from sympy import divisors, factorint

from .gcd import ONE, content_in, gcd
from .poly import DomainError, MultiPoly, mono_key

PRIME, POLY, OPAQUE = "prime", "poly", "opaque"
_KIND_RANK = {PRIME: 0, POLY: 1, OPAQUE: 2}


class NotAUnitError(DomainError):
    """A substitution sends a factor to 0 or infinity."""

    def __init__(self, atom, message=None):
        self.atom = atom
        super().__init__(message or f"not a unit at divisor: factor {atom} vanishes or has a pole")


@dataclass(frozen=True)
class Atom:
    """Generator of the multiplicative group: a prime or a monic polynomial."""

    kind: str
    payload: Union[int, MultiPoly]
    key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind == PRIME:
            k = (0, self.payload, ())
        else:
            p = self.payload
            seq = tuple((mono_key(m), c) for m, c in p.sorted_terms())
            k = (_KIND_RANK[self.kind], p.total_degree(), seq)
        object.__setattr__(self, "key", k)

    def __lt__(self, other: "Atom"):
        return self.key < other.key

    @property
    def is_prime(self) -> bool:
        return self.kind == PRIME

    @property
    def poly(self) -> MultiPoly:
        if self.kind == PRIME:
            return MultiPoly.const(self.payload)
        return self.payload

    @property
    def variables(self) -> Tuple[str, ...]:
        return () if self.kind == PRIME else self.payload.variables

    def degree(self, var: str) -> int:
        return 0 if self.kind == PRIME else self.payload.degree(var)

    def __str__(self):
        return str(self.payload)


def prime_atom(p: int) -> Atom:
    return Atom(PRIME, int(p))


def poly_atom(p: MultiPoly, verified: bool = True) -> Atom:
    return Atom(POLY if verified else OPAQUE, p.monic())


@lru_cache(maxsize=4096)
def _factor_int(n: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def constant_expansion(c: Fraction) -> List[Tuple[Atom, int]]:
    """Prime exponents of |c|; the sign is torsion and is dropped."""
    out = []
    for p, e in _factor_int(abs(c.numerator)):
        out.append((prime_atom(p), e))
    for p, e in _factor_int(c.denominator):
        out.append((prime_atom(p), -e))
    return out


@dataclass(frozen=True)
class FactoredRational:
    """A nonzero rational function ``constant * prod(atom**exponent)``."""

    constant: Fraction
    factors: Tuple[Tuple[Atom, int], ...] = ()

    def __post_init__(self):
        c = Fraction(self.constant)
        if not c:
            raise DomainError("zero is not a unit")
        object.__setattr__(self, "constant", c)
        merged: Dict[Atom, int] = {}
        for a, e in self.factors:
            if a.kind == PRIME:
                raise DomainError("prime atoms belong in the constant")
            merged[a] = merged.get(a, 0) + e
        facs = tuple(sorted(((a, e) for a, e in merged.items() if e), key=lambda t: t[0].key))
        object.__setattr__(self, "factors", facs)

    @classmethod
    def const(cls, c) -> "FactoredRational":
        return cls(Fraction(c))

    @classmethod
    def from_atom(cls, atom: Atom, e: int = 1) -> "FactoredRational":
        if atom.kind == PRIME:
            return cls(Fraction(atom.payload) ** e)
        return cls(Fraction(1), ((atom, e),))

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "FactoredRational":
        return factor(p)

    @classmethod
    def from_polys(cls, num: MultiPoly, den: MultiPoly) -> "FactoredRational":
        return factor(num) / factor(den)

    # -- inspection -----------------------------------------------------------
    def is_constant(self) -> bool:
        return not self.factors

    @property
    def variables(self) -> Tuple[str, ...]:
        vs = set()
        for a, _ in self.factors:
            vs.update(a.variables)
        return tuple(sorted(vs))

    def degree(self, var: str) -> int:
        """Degree of the numerator minus degree of the denominator in ``var``."""
        return sum(e * a.degree(var) for a, e in self.factors)

    def numerator(self) -> MultiPoly:
        p = MultiPoly.const(self.constant)
        for a, e in self.factors:
            if e > 0:
                p = p * a.payload ** e
        return p

    def denominator(self) -> MultiPoly:
        p = ONE
        for a, e in self.factors:
            if e < 0:
                p = p * a.payload ** (-e)
        return p

    def numerator_part(self) -> "FactoredRational":
        return FactoredRational(self.constant, tuple((a, e) for a, e in self.factors if e > 0))

    def denominator_part(self) -> "FactoredRational":
        return FactoredRational(1, tuple((a, -e) for a, e in self.factors if e < 0))

    def evaluate(self, values: Mapping[str, object]):
        """Numeric value (complex) at a point."""
        v = complex(self.constant)
        for a, e in self.factors:
            v *= complex(a.payload.evaluate(values)) ** e
        return v

    # -- group operations ------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, FactoredRational):
            other = FactoredRational.const(other)
        return FactoredRational(self.constant * other.constant, self.factors + other.factors)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return FactoredRational(self.constant ** k, tuple((a, e * k) for a, e in self.factors))

    def inverse(self) -> "FactoredRational":
        return self ** -1

    def __truediv__(self, other):
        if not isinstance(other, FactoredRational):
            other = FactoredRational.const(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return FactoredRational.const(other) * self.inverse()

    def __neg__(self):
        return FactoredRational(-self.constant, self.factors)

    # -- ring operations (expand, combine, refactor) -------------------------
    def _add(self, other: "FactoredRational", sign: int):
        # common denominator keeps shared atoms factored
        common: Dict[Atom, int] = {}
        for a, e in self.factors + other.factors:
            if e < 0:
                common[a] = max(common.get(a, 0), -e)
        den = FactoredRational(1, tuple(common.items()))
        p = (self * den).numerator()
        q = (other * den).numerator()
        s = p + q if sign > 0 else p - q
        if s.is_zero():
            return None
        return factor(s) / den

    def add(self, other) -> "FactoredRational | None":
        """Sum, or None when it vanishes."""
        if not isinstance(other, FactoredRational):
            other = FactoredRational.const(other)
        return self._add(other, 1)

    def sub(self, other) -> "FactoredRational | None":
        if not isinstance(other, FactoredRational):
            other = FactoredRational.const(other)
        return self._add(other, -1)

    def one_minus(self) -> "FactoredRational | None":
        return FactoredRational.const(1).sub(self)

    def __str__(self):
        return format_factored(self)


def format_factored(f: FactoredRational) -> str:
    parts = []
    if f.constant != 1 or not f.factors:
        parts.append(str(f.constant))
    for a, e in f.factors:
        s = f"({a})"
        if e != 1:
            s += f"^{e}" if e > 0 else f"^({e})"
        parts.append(s)
    return "*".join(parts)


# ---------------------------------------------------------------------------
# factorization


def _yun(p: MultiPoly, var: str) -> List[Tuple[MultiPoly, int]]:
    """Square-free decomposition of ``p`` (primitive in ``var``)."""
    dp = p.diff(var)
    c = gcd(p, dp)
    w = p.divexact(c)
    y = dp.divexact(c)
    z = y - w.diff(var)
    out = []
    i = 1
    while w.degree(var) > 0:
        g = gcd(w, z)
        if not g.is_constant():
            out.append((g, i))
        w = w.divexact(g)
        y = z.divexact(g)
        z = y - w.diff(var)
        i += 1
    return out


def _rational_roots(p: MultiPoly, var: str) -> List[Fraction]:
    coeffs = p.coeffs_in(var)
    deg = max(coeffs)
    ints = {e: c.constant_value() for e, c in coeffs.items()}
    den = 1
    for c in ints.values():
        den = lcm(den, c.denominator)
    a = {e: int(c * den) for e, c in ints.items()}
    low = min(a)
    roots = [Fraction(0)] if low > 0 else []
    a0 = a[low]
    an = a[deg]
    for num in divisors(abs(a0)):
        for d in divisors(abs(an)):
            for s in (1, -1):
                r = Fraction(s * num, d)
                if r in roots:
                    continue
                if sum(c * r ** (e - low) for e, c in a.items()) == 0:
                    roots.append(r)
    return roots


def _split(g: MultiPoly, acc: Counter, mult: int) -> None:
    """Split a square-free monic polynomial into atoms."""
    g = g.monic()
    if g.is_constant():
        return
    vs = g.variables
    for v in reversed(vs):
        if g.degree(v) == 1:
            cs = g.coeffs_in(v)
            h = gcd(cs.get(1, MultiPoly()), cs.get(0, MultiPoly()))
            if h.is_constant():
                acc[poly_atom(g)] += mult
            else:
                _split(h, acc, mult)
                _split(g.divexact(h), acc, mult)
            return
    if len(vs) == 1:
        v = vs[0]
        rest = g
        for r in _rational_roots(g, v):
            lin = MultiPoly.var(v) - r
            acc[poly_atom(lin)] += mult
            rest = rest.divexact(lin)
        rest = rest.monic()
        if rest.is_constant():
            return
        # a quadratic or cubic without rational roots is irreducible
        acc[poly_atom(rest, verified=rest.degree(v) <= 3)] += mult
        return
    for v in vs:
        c = content_in(g, v)
        if not c.is_constant():
            _split(c, acc, mult)
            _split(g.divexact(c), acc, mult)
            return
    acc[poly_atom(g, verified=False)] += mult


def _factor_into(p: MultiPoly, acc: Counter, mult: int) -> None:
    p = p.monic()
    if p.is_constant():
        return
    # degree 1 in some variable: content there, and the primitive part is irreducible
    for v in reversed(p.variables):
        if p.degree(v) == 1:
            c = content_in(p, v)
            if not c.is_constant():
                _factor_into(c, acc, mult)
                p = p.divexact(c)
            acc[poly_atom(p.monic())] += mult
            return
    var = min(p.variables, key=lambda v: (p.degree(v), v))
    c = content_in(p, var)
    if not c.is_constant():
        _factor_into(c, acc, mult)
        p = p.divexact(c)
    for g, i in _yun(p, var):
        _split(g, acc, mult * i)


@lru_cache(maxsize=16384)
def _factor_cached(p: MultiPoly) -> Tuple[Tuple[Atom, int], ...]:
    acc: Counter = Counter()
    _factor_into(p, acc, 1)
    return tuple(acc.items())


def factor(p: MultiPoly) -> FactoredRational:
    """Factor a nonzero polynomial into rational constant times atoms."""
    if p.is_zero():
        raise DomainError("cannot factor the zero polynomial")
    if p.is_constant():
        return FactoredRational(p.constant_value())
    return FactoredRational(p.leading_coefficient(), _factor_cached(p))


# ---------------------------------------------------------------------------
# substitution


class Infinity:
    """The point at infinity of a projective line coordinate."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()


class Zero:
    """The point 0 of a projective line, used where a nonzero value is expected."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "0"

    __str__ = __repr__

    def __reduce__(self):
        return (Zero, ())


ZERO = Zero()

Value = Union[FactoredRational, Fraction, int]


def _as_factored(v) -> FactoredRational:
    if isinstance(v, FactoredRational):
        return v
    return FactoredRational.const(v)


def _image_parts(img):
    """(numerator poly, denominator poly, factored denominator) of an image."""
    if isinstance(img, FactoredRational):
        return img.numerator(), img.denominator(), img.denominator_part()
    c = Fraction(img)
    return MultiPoly.const(c), ONE, FactoredRational.const(1)


def compose_atom(atom: Atom, images: Mapping[str, Value]) -> "FactoredRational | None":
    """Image of an atom under simultaneous substitution; None if it vanishes."""
    if atom.kind == PRIME:
        return FactoredRational.const(atom.payload)
    p = atom.payload
    used = [v for v in p.variables if v in images]
    if not used:
        return FactoredRational.from_atom(atom)
    nums, dens, degs = {}, {}, {}
    den_total = FactoredRational.const(1)
    for v in used:
        nums[v], dens[v], dfac = _image_parts(images[v])
        d = p.degree(v)
        degs[v] = d
        den_total = den_total * dfac ** d
    acc = MultiPoly()
    for m, c in p.items():
        t = MultiPoly.const(c)
        rest = []
        exps = dict(m)
        for v in used:
            e = exps.pop(v, 0)
            if e:
                t = t * nums[v] ** e
            if degs[v] - e:
                t = t * dens[v] ** (degs[v] - e)
        rest = tuple(sorted(exps.items()))
        if rest:
            t = t.mul_monomial(rest)
        acc = acc + t
    if acc.is_zero():
        return None
    return factor(acc) / den_total


def compose(f: FactoredRational, images: Mapping[str, Value]) -> FactoredRational:
    """Substitute rational functions for variables in a factored value."""
    out = FactoredRational.const(f.constant)
    for a, e in f.factors:
        r = compose_atom(a, images)
        if r is None:
            raise NotAUnitError(a)
        out = out * r ** e
    return out


def chart_at_infinity(f: FactoredRational, var: str, chart: str = "s") -> Tuple[FactoredRational, int]:
    """Write ``f`` near ``var = INF`` as ``s**order * unit`` with ``s = 1/var``.

    Returns the unit part as a function of ``chart`` and the order in ``s``.
    """
    s = MultiPoly.var(chart)
    out = FactoredRational.const(f.constant)
    order = 0
    for a, e in f.factors:
        d = a.degree(var)
        if not d:
            out = out * FactoredRational.from_atom(a, e)
            continue
        hat = MultiPoly()
        for k, c in a.payload.coeffs_in(var).items():
            hat = hat + (c * s ** (d - k))
        out = out * factor(hat) ** e
        order -= d * e
    return out, order


def substitute(f: FactoredRational, var: str, value) -> FactoredRational:
    """Restrict ``f`` to ``var = value``; value is a rational function or INF."""
    if value is INF:
        unit, order = chart_at_infinity(f, var, chart="_s")
        if order:
            raise NotAUnitError(var, f"not a unit at {var}=INF: order {-order} pole/zero")
        return compose(unit, {"_s": 0})
    return compose(f, {var: value})


# ---------------------------------------------------------------------------
# transcendence degree by Jacobian rank


def _row_normalize(row: List[MultiPoly]) -> List[MultiPoly]:
    g = MultiPoly()
    for r in row:
        g = gcd(g, r)
    if g.is_zero() or g.is_constant():
        nz = [r for r in row if not r.is_zero()]
        if not nz:
            return row
        lc = nz[0].leading_coefficient()
        return [r.scale(1 / lc) for r in row]
    return [r.divexact(g) for r in row]


def jacobian_rank(rows: List[List[MultiPoly]]) -> int:
    """Rank over the fraction field by fraction-free elimination."""
    m = [list(r) for r in rows if any(not x.is_zero() for x in r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][col].is_zero():
                continue
            a, b = pr[col], m[i][col]
            m[i] = _row_normalize([a * m[i][j] - b * pr[j] for j in range(ncols)])
        rank += 1
        if rank == len(m):
            break
    return rank


def _dlog_row(f: FactoredRational, variables: Tuple[str, ...]) -> List[MultiPoly]:
    polys = [(a.payload, e) for a, e in f.factors]
    row = []
    for v in variables:
        s = MultiPoly()
        for i, (p, e) in enumerate(polys):
            d = p.diff(v)
            if d.is_zero():
                continue
            t = d.scale(e)
            for j, (q, _) in enumerate(polys):
                if j != i:
                    t = t * q
            s = s + t
        row.append(s)
    return row


def trans_degree(fs: Iterable[FactoredRational], variables: Iterable[str] | None = None) -> int:
    """Transcendence degree of Q(f_1, ..., f_n) over Q."""
    fs = [_as_factored(f) for f in fs]
    if not fs:
        raise DomainError("trans_degree needs a nonempty list")
    if variables is None:
        vs = set()
        for f in fs:
            vs.update(f.variables)
        variables = tuple(sorted(vs))
    else:
        variables = tuple(variables)
    if not variables:
        return 0
    return jacobian_rank([_dlog_row(f, variables) for f in fs if not f.is_constant()])


@lru_cache(maxsize=65536)
def atoms_trans_degree(atoms: frozenset, variables: Tuple[str, ...] | None = None) -> int:
    """Transcendence degree of the atoms; with ``variables`` given, over the
    field generated by all other names."""
    polys = [a for a in atoms if a.kind != PRIME]
    if not polys:
        return 0
    return trans_degree([FactoredRational.from_atom(a) for a in polys], variables)
