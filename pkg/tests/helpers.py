"""Random generators shared by the test modules."""

import random
from fractions import Fraction

from chowpoly.exactalg import FactoredRational, MultiPoly, factor

SMALL = [Fraction(n, d) for n in range(-7, 8) for d in (1, 2, 3, 5) if n]


def rand_rat(rng: random.Random, pool=SMALL) -> Fraction:
    return rng.choice(pool)


def rand_split(rng: random.Random, var: str = "t", roots=None, max_factors: int = 4, max_exp: int = 3):
    """(constant, {root: exponent}) for a split rational function of one variable."""
    roots = roots or [Fraction(k) for k in range(-4, 5)] + [Fraction(1, 2), Fraction(-1, 3), Fraction(5, 2)]
    c = rand_rat(rng)
    facs = {}
    for _ in range(rng.randint(1, max_factors)):
        r = rng.choice(roots)
        e = rng.choice([k for k in range(-max_exp, max_exp + 1) if k])
        facs[r] = facs.get(r, 0) + e
    return c, {r: e for r, e in facs.items() if e}


def split_value(c, facs, var: str = "t") -> FactoredRational:
    t = MultiPoly.var(var)
    out = FactoredRational.const(c)
    for r, e in facs.items():
        out = out * factor(t - r) ** e
    return out


def coordinate_factor(rng: random.Random, variables=("x", "y")) -> FactoredRational:
    """A single factor v - r with v a coordinate and r rational."""
    v = rng.choice(variables)
    r = rng.choice([Fraction(k) for k in range(-3, 4)] + [Fraction(1, 2), Fraction(-2, 3)])
    return factor(MultiPoly.var(v) - r)


def coordinate_slot(rng: random.Random, variables=("x", "y"), max_factors: int = 2) -> FactoredRational:
    out = FactoredRational.const(rng.choice([1, 1, 2, 3, Fraction(1, 2), -1]))
    for _ in range(rng.randint(1, max_factors)):
        out = out * coordinate_factor(rng, variables) ** rng.choice([1, 1, -1, 2])
    return out
