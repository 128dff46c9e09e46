"""Multivariate gcd over the rationals by recursive primitive remainder sequences."""

from __future__ import annotations

from functools import lru_cache

from .poly import MultiPoly

ONE = MultiPoly.const(1)


def content_in(p: MultiPoly, var: str) -> MultiPoly:
    """Gcd of the coefficients of ``p`` viewed as a polynomial in ``var``."""
    g = MultiPoly()
    for c in p.coeffs_in(var).values():
        g = gcd(g, c)
        if g.is_constant() and not g.is_zero():
            return ONE
    return g


def primitive_part_in(p: MultiPoly, var: str) -> MultiPoly:
    c = content_in(p, var)
    if c.is_constant():
        return p.monic()
    return p.divexact(c).monic()


def _pseudo_rem(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    db = b.degree(var)
    lb = b.lc_in(var)
    r = a
    while not r.is_zero():
        dr = r.degree(var)
        if dr < db:
            break
        lr = r.lc_in(var)
        r = r * lb - (b * lr).mul_monomial(((var, dr - db),) if dr > db else ())
    return r


def _prs_gcd(a: MultiPoly, b: MultiPoly, var: str) -> MultiPoly:
    # a, b primitive in var, both of positive degree in var
    if a.degree(var) < b.degree(var):
        a, b = b, a
    while True:
        r = _pseudo_rem(a, b, var)
        if r.is_zero():
            return b.monic()
        if r.degree(var) == 0:
            return ONE
        a, b = b, primitive_part_in(r, var)


def gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return ONE
    if a == b:
        return a.monic()
    return _gcd_cached(a.monic(), b.monic())


@lru_cache(maxsize=8192)
def _gcd_cached(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    va, vb = set(a.variables), set(b.variables)
    only_a = sorted(va - vb)
    if only_a:
        return gcd(content_in(a, only_a[0]), b)
    only_b = sorted(vb - va)
    if only_b:
        return gcd(a, content_in(b, only_b[0]))
    var = sorted(va)[0]
    ca, cb = content_in(a, var), content_in(b, var)
    pa = a if ca.is_constant() else a.divexact(ca)
    pb = b if cb.is_constant() else b.divexact(cb)
    g = gcd(ca, cb)
    if pa.degree(var) == 0 or pb.degree(var) == 0:
        h = ONE
    else:
        h = _prs_gcd(pa, pb, var)
    return (g * h).monic()
