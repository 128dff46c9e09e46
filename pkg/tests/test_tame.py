from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chowpoly.exactalg import DomainError, FactoredRational, MultiPoly, factor
from chowpoly.tame import (
    UnparametrizableDivisor,
    Valuation,
    divisor_support,
    ord,
    residue_unit,
    tame_symbol,
    unit_residue,
)
from chowpoly.wedge import WedgeElement, wedge_of

from helpers import rand_split, split_value

t, x1, x2 = MultiPoly.var("t"), MultiPoly.var("x1"), MultiPoly.var("x2")
T = factor(t)
C = FactoredRational.const
GRAPH = Valuation.graph("x2", C(2) / factor(x1))


def test_orders():
    assert ord(Valuation.point("t", 0), T ** 2 * factor(1 - t)) == 2
    assert ord(Valuation.infinity("t"), factor(1 - t)) == -1
    assert ord(GRAPH, factor(x1 * x2 - 2)) == 1
    assert ord(GRAPH, factor(x1)) == 0


def test_residues():
    assert residue_unit(Valuation.point("t", 0), factor(1 - t)) == C(1)
    a = Fraction(5, 3)
    (atom, _), = factor(t - a).factors
    assert unit_residue(Valuation.infinity("t"), atom) == C(1)
    assert residue_unit(GRAPH, factor(x1)) == factor(x1)
    # x1 * x2 restricts to 2 on the graph
    assert residue_unit(GRAPH, factor(x1) * factor(x2)) == C(2)
    with pytest.raises(DomainError):
        residue_unit(Valuation.point("t", 0), T)


def test_tame_examples():
    assert tame_symbol(Valuation.point("t", 0), wedge_of([T, factor(1 - t)])).is_zero()
    for a in (Fraction(2), Fraction(3), Fraction(1, 2), Fraction(-4, 7)):
        w = wedge_of([factor(1 - t), T, factor(t - a)])
        assert tame_symbol(Valuation.point("t", a), w) == wedge_of([C(1 - a), C(a)])
        assert tame_symbol(Valuation.infinity("t"), w).is_zero()


def test_tame_sign_by_slot():
    # the uniformizer in slot i contributes with sign (-1)^i (slots counted from 0)
    u, v = C(2), C(3)
    pi = factor(t - 5)
    at = Valuation.point("t", 5)
    assert tame_symbol(at, wedge_of([pi, u, v])) == wedge_of([u, v])
    assert tame_symbol(at, wedge_of([u, pi, v])) == -wedge_of([u, v])
    assert tame_symbol(at, wedge_of([u, v, pi])) == wedge_of([u, v])


def test_divisor_support():
    w = wedge_of([factor(1 - t), T, factor(t - 2)])
    labels = sorted(v.label for v in divisor_support(w, ["t"]))
    assert labels == sorted(["t=0", "t=1", "t=2", "t=INF"])
    w2 = wedge_of([factor(x1 * x2 - 2), factor(x1), factor(1 - x2)])
    kinds = [(v.kind, v.var) for v in divisor_support(w2, ["x1", "x2"])]
    assert ("graph", "x2") in kinds
    consts = wedge_of([C(2), C(3)])
    vs = divisor_support(consts, ["x1"])
    assert [v.label for v in vs] == ["x1=INF"]
    assert all(tame_symbol(v, consts).is_zero() for v in vs)


def test_unparametrizable_divisor():
    y = MultiPoly.var("y")
    x = MultiPoly.var("x")
    w = wedge_of([factor(x ** 2 + y ** 2 + 1), factor(x), factor(y)])
    with pytest.raises(UnparametrizableDivisor):
        divisor_support(w, ["x", "y"])


def test_parameter_atoms_are_not_divisors():
    a = MultiPoly.var("a")
    w = wedge_of([factor(t - a), factor(a + 1), T])
    labels = {v.label for v in divisor_support(w, ["t"])}
    assert labels == {"t=a", "t=0", "t=INF"}
    # the residue of t - a at t = 0 is the parameter class -a
    got = tame_symbol(Valuation.point("t", 0), w)
    assert got == wedge_of([factor(a), factor(a + 1)])


# -- properties ------------------------------------------------------------------


@st.composite
def split(draw):
    import random

    return rand_split(random.Random(draw(st.integers(0, 10 ** 6))))


POINTS = [Fraction(k) for k in range(-4, 5)] + [Fraction(1, 2), Fraction(-1, 3), Fraction(5, 2), None]


def _val(r):
    return Valuation.infinity("t") if r is None else Valuation.point("t", r)


@settings(max_examples=100, deadline=None)
@given(split(), split(), split(), st.sampled_from(POINTS))
def test_bilinearity(f, g, h, r):
    F, G, H = (split_value(*z) for z in (f, g, h))
    v = _val(r)
    a, b = wedge_of([F, G, H]), wedge_of([G, H, F])
    assert tame_symbol(v, a + b.scale(3)) == tame_symbol(v, a) + tame_symbol(v, b).scale(3)


@settings(max_examples=100, deadline=None)
@given(split(), st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5).filter(bool), min_size=1, max_size=3),
       st.sampled_from(POINTS))
def test_normalization_units(f, consts, r):
    # a_2, ..., a_k units along v: tame(a_1 ^ ...) = ord(a_1) * (residues)
    F = split_value(*f)
    units = [C(c) for c in consts]
    v = _val(r)
    got = tame_symbol(v, wedge_of([F] + units))
    want = wedge_of(units).scale(ord(v, F))
    assert got == want


@settings(max_examples=100, deadline=None)
@given(split(), split())
def test_weil_reciprocity_property(f, g):
    w = wedge_of([split_value(*f), split_value(*g)])
    total = WedgeElement.zero(1)
    for v in divisor_support(w, ["t"]):
        total = total + tame_symbol(v, w)
    assert total.is_zero()
