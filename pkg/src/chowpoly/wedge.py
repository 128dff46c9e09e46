"""Canonical forms in the rational exterior algebra of a function field's unit group.

A wedge monomial is a strictly increasing tuple of atoms.  Constants are
expanded into prime atoms here; signs and other torsion vanish.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from .exactalg import (
    PRIME,
    Atom,
    DomainError,
    FactoredRational,
    NotAUnitError,
    compose_atom,
    constant_expansion,
    trans_degree,
)

Monomial = Tuple[Atom, ...]


def sort_with_sign(atoms: Sequence[Atom]) -> Tuple[Monomial, int]:
    """Sort atoms by the global order and return the permutation sign."""
    idx = sorted(range(len(atoms)), key=lambda i: atoms[i].key)
    sign = 1
    seen = [False] * len(idx)
    for i in range(len(idx)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = idx[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return tuple(atoms[i] for i in idx), sign


class WedgeElement:
    """Element of the n-th exterior power, as a map monomial -> coefficient."""

    __slots__ = ("arity", "_terms")

    def __init__(self, arity: int, terms: Mapping[Monomial, object] | None = None):
        if arity < 0:
            raise DomainError("negative arity")
        self.arity = arity
        clean: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            if len(m) != arity:
                raise DomainError(f"monomial of length {len(m)} in arity {arity} element")
            c = Fraction(c)
            if c:
                clean[m] = c
        self._terms = clean

    @classmethod
    def scalar(cls, c) -> "WedgeElement":
        return cls(0, {(): c})

    @classmethod
    def zero(cls, arity: int) -> "WedgeElement":
        return cls(arity)

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda t: tuple(a.key for a in t[0]))

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def atoms(self) -> List[Atom]:
        out = set()
        for m in self._terms:
            out.update(m)
        return sorted(out, key=lambda a: a.key)

    def __eq__(self, other):
        if not isinstance(other, WedgeElement):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.arity == other.arity and self._terms == other._terms

    def __hash__(self):
        return hash((self.arity, frozenset(self._terms.items())))

    def _check(self, other: "WedgeElement"):
        if self.arity != other.arity:
            raise DomainError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other: "WedgeElement") -> "WedgeElement":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return WedgeElement(self.arity, out)

    def __neg__(self):
        return WedgeElement(self.arity, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "WedgeElement":
        c = Fraction(c)
        return WedgeElement(self.arity, {m: v * c for m, v in self._terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def wedge(self, other: "WedgeElement") -> "WedgeElement":
        """Exterior product, self on the left."""
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                if set(m1) & set(m2):
                    continue
                m, s = sort_with_sign(m1 + m2)
                out[m] = out.get(m, 0) + s * c1 * c2
        return WedgeElement(self.arity + other.arity, out)

    def __repr__(self):
        from .cli.grammar import format_wedge

        return f"WedgeElement({format_wedge(self)!r})"


def add(a: WedgeElement, b: WedgeElement) -> WedgeElement:
    return a + b


def scale(c, a: WedgeElement) -> WedgeElement:
    return a.scale(c)


def expand_slot(f) -> List[Tuple[Atom, int]]:
    """Atoms of one slot with their exponents, constant primes included."""
    if not isinstance(f, FactoredRational):
        c = Fraction(f)
        if not c:
            raise DomainError("a wedge slot is zero")
        f = FactoredRational.const(c)
    return constant_expansion(f.constant) + list(f.factors)


def wedge_of(fs: Iterable) -> WedgeElement:
    """Multilinear, alternating expansion of f_1 ^ ... ^ f_n."""
    slots = [expand_slot(f) for f in fs]
    current: Dict[Tuple[Atom, ...], Fraction] = {(): Fraction(1)}
    for exp in slots:
        nxt: Dict[Tuple[Atom, ...], Fraction] = {}
        for mono, c in current.items():
            for atom, e in exp:
                if atom in mono:
                    continue
                key = mono + (atom,)
                nxt[key] = nxt.get(key, 0) + c * e
        current = nxt
        if not current:
            break
    out: Dict[Monomial, Fraction] = {}
    for mono, c in current.items():
        m, s = sort_with_sign(mono)
        out[m] = out.get(m, 0) + s * c
    return WedgeElement(len(slots), out)


def pullback(a: WedgeElement, images: Mapping[str, object], check_dominant: bool = True) -> WedgeElement:
    """Pull back along a coordinate map ``var -> rational function``."""
    imgs = {v: (w if isinstance(w, FactoredRational) else FactoredRational.const(w)) for v, w in images.items()}
    if check_dominant and imgs:
        if trans_degree(list(imgs.values())) < len(imgs):
            raise DomainError("coordinate map is not dominant")
    cache: Dict[Atom, FactoredRational] = {}

    def image(atom: Atom) -> FactoredRational:
        if atom not in cache:
            r = compose_atom(atom, imgs)
            if r is None:
                raise NotAUnitError(atom)
            cache[atom] = r
        return cache[atom]

    out = WedgeElement.zero(a.arity)
    for mono, c in a.items():
        out = out + wedge_of([image(x) for x in mono]).scale(c)
    return out


def rename(a: WedgeElement, names: Mapping[str, str]) -> WedgeElement:
    """Rename variables (a bijective identification of coordinates)."""
    from .exactalg import MultiPoly

    images = {old: FactoredRational.from_poly(MultiPoly.var(new)) for old, new in names.items()}
    return pullback(a, images, check_dominant=False)


@lru_cache(maxsize=4096)
def _has_prime(mono: Monomial) -> bool:
    return any(x.kind == PRIME for x in mono)


def has_constant_slot(mono: Monomial) -> bool:
    return _has_prime(mono)
