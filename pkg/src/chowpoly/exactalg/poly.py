"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by variable name,
with every exponent positive.  The empty tuple is the unit monomial.  Terms
live in a plain dict ``monomial -> Fraction`` with no zero coefficients.

Monomials are compared lexicographically with variables ordered by name,
so ``x`` beats ``y`` and ``x*y`` beats ``x``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Iterable, Mapping, Tuple

Monomial = Tuple[Tuple[str, int], ...]

_SENTINEL = ("￿", 0)


class DomainError(ValueError):
    """Raised when an exact operation is applied outside its domain."""


def mono_key(m: Monomial):
    """Sort key: the lex-largest monomial has the smallest key."""
    return tuple((v, -e) for v, e in m) + (_SENTINEL,)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_div(a: Monomial, b: Monomial):
    """Return a/b or None when b does not divide a."""
    d = dict(a)
    for v, e in b:
        k = d.get(v, 0) - e
        if k < 0:
            return None
        if k:
            d[v] = k
        else:
            del d[v]
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial, var: str) -> int:
    for v, e in m:
        if v == var:
            return e
    return 0


def _drop(m: Monomial, var: str) -> Monomial:
    return tuple(p for p in m if p[0] != var)


class MultiPoly:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("_terms", "_hash", "_lead")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None
        self._lead = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "MultiPoly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        p._lead = None
        return p

    @classmethod
    def const(cls, c) -> "MultiPoly":
        c = Fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls._raw({((name, 1),): Fraction(1)})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise DomainError("polynomial is not constant")
        return self._terms.get((), Fraction(0))

    @property
    def variables(self) -> Tuple[str, ...]:
        vs = set()
        for m in self._terms:
            for v, _ in m:
                vs.add(v)
        return tuple(sorted(vs))

    def degree(self, var: str) -> int:
        return max((mono_degree(m, var) for m in self._terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def leading(self) -> Tuple[Monomial, Fraction]:
        if not self._terms:
            raise DomainError("zero polynomial has no leading term")
        if self._lead is None:
            m = min(self._terms, key=mono_key)
            self._lead = (m, self._terms[m])
        return self._lead

    def leading_coefficient(self) -> Fraction:
        return self.leading()[1]

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: mono_key(t[0]))

    # -- arithmetic ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    @staticmethod
    def _coerce(x) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        return MultiPoly.const(x)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPoly":
        c = Fraction(c)
        if not c:
            return MultiPoly()
        return MultiPoly._raw({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        if len(other._terms) < len(self._terms):
            a, b = other, self
        else:
            a, b = self, other
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in a._terms.items():
            for m2, c2 in b._terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return MultiPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, mono: Monomial, c=1) -> "MultiPoly":
        c = Fraction(c)
        return MultiPoly._raw({mono_mul(m, mono): v * c for m, v in self._terms.items()})

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Exact quotient; raises DomainError when ``other`` does not divide."""
        if other.is_zero():
            raise DomainError("division by zero polynomial")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lm, lc = other.leading()
        q: Dict[Monomial, Fraction] = {}
        r = self
        while r._terms:
            rm, rc = r.leading()
            t = mono_div(rm, lm)
            if t is None:
                raise DomainError("inexact polynomial division")
            c = rc / lc
            q[t] = q.get(t, 0) + c
            r = r - other.mul_monomial(t, c)
        return MultiPoly(q)

    def divides(self, other: "MultiPoly") -> bool:
        try:
            other.divexact(self)
        except DomainError:
            return False
        return True

    # -- calculus and structure ---------------------------------------------
    def diff(self, var: str) -> "MultiPoly":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = mono_degree(m, var)
            if e:
                nm = tuple((v, k - 1 if v == var else k) for v, k in m)
                nm = tuple(p for p in nm if p[1])
                out[nm] = out.get(nm, 0) + c * e
        return MultiPoly(out)

    def coeffs_in(self, var: str) -> Dict[int, "MultiPoly"]:
        """Coefficients with respect to ``var``; keys are degrees."""
        groups: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            e = mono_degree(m, var)
            groups.setdefault(e, {})[_drop(m, var)] = c
        return {e: MultiPoly._raw(t) for e, t in groups.items()}

    @classmethod
    def from_coeffs_in(cls, var: str, coeffs: Mapping[int, "MultiPoly"]) -> "MultiPoly":
        out = MultiPoly()
        for e, c in coeffs.items():
            out = out + (c.mul_monomial(((var, e),)) if e else c)
        return out

    def lc_in(self, var: str) -> "MultiPoly":
        cs = self.coeffs_in(var)
        return cs[max(cs)]

    def rational_content(self) -> Fraction:
        """Positive rational c with self/c integral and primitive."""
        if not self._terms:
            return Fraction(0)
        nums = [c.numerator for c in self._terms.values()]
        dens = [c.denominator for c in self._terms.values()]
        return Fraction(reduce(gcd, nums), reduce(lcm, dens))

    def monic(self) -> "MultiPoly":
        if not self._terms:
            return self
        return self.scale(1 / self.leading_coefficient())

    def evaluate(self, values: Mapping[str, object]):
        """Substitute numbers (Fraction, int, float or complex) for variables.

        Variables missing from ``values`` are kept, so the result is a
        MultiPoly unless every variable is assigned and the values are exact.
        """
        exact = all(isinstance(v, (int, Fraction)) for v in values.values())
        if exact:
            out: Dict[Monomial, Fraction] = {}
            for m, c in self._terms.items():
                rest = []
                for v, e in m:
                    if v in values:
                        c = c * Fraction(values[v]) ** e
                    else:
                        rest.append((v, e))
                if c:
                    key = tuple(rest)
                    s = out.get(key, 0) + c
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
            return MultiPoly._raw(out)
        total = 0
        for m, c in self._terms.items():
            t = complex(c)
            for v, e in m:
                t *= values[v] ** e
            total += t
        return total

    def compose(self, images: Mapping[str, "MultiPoly"]) -> "MultiPoly":
        """Substitute polynomials for variables."""
        out = MultiPoly()
        cache: Dict[Tuple[str, int], MultiPoly] = {}
        for m, c in self._terms.items():
            t = MultiPoly.const(c)
            rest = []
            for v, e in m:
                if v in images:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = images[v] ** e
                    t = t * cache[key]
                else:
                    rest.append((v, e))
            if rest:
                t = t.mul_monomial(tuple(rest))
            out = out + t
        return out

    def rename(self, names: Mapping[str, str]) -> "MultiPoly":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            d: Dict[str, int] = {}
            for v, e in m:
                w = names.get(v, v)
                d[w] = d.get(w, 0) + e
            out[tuple(sorted(d.items()))] = c
        return MultiPoly(out)

    # -- text -----------------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self):
        return f"MultiPoly({str(self)!r})"


def poly_sum(polys: Iterable[MultiPoly]) -> MultiPoly:
    out = MultiPoly()
    for p in polys:
        out = out + p
    return out
