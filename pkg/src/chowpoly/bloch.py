"""Li symbols {h}_m over Q or Q(t), the maps delta and res, and relation generators."""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactalg import INF, ZERO, Atom, DomainError, FactoredRational, MultiPoly, factor
from .numerics import sv_polylog
from .tame import Valuation, ord as val_ord, residue_unit
from .wedge import WedgeElement, expand_slot, wedge_of

PROVED, CERTIFIED, NUMERIC = "proved", "certified", "numeric"
SYMBOLIC, CERTIFICATE = "symbolic", "certificate"
EVIDENCE_LEVEL = {SYMBOLIC: PROVED, CERTIFICATE: CERTIFIED, NUMERIC: NUMERIC}


def as_point(h):
    """Canonical point of P^1(F): a FactoredRational, ZERO or INF."""
    if h is INF or h is ZERO:
        return h
    if isinstance(h, FactoredRational):
        return h
    if isinstance(h, MultiPoly):
        return ZERO if h.is_zero() else factor(h)
    c = Fraction(h)
    return FactoredRational.const(c) if c else ZERO


def _point_key(h):
    if h is ZERO:
        return (0,)
    if h is INF:
        return (1,)
    return (2, h.constant, tuple((a.key, e) for a, e in h.factors))


class LiSymbol:
    """A rational combination of generators {h}_m."""

    __slots__ = ("weight", "_terms")

    def __init__(self, weight: int, terms: Mapping[object, object] | None = None):
        if weight < 1:
            raise DomainError("Li symbols need weight >= 1")
        self.weight = weight
        clean: Dict[object, Fraction] = {}
        for h, c in (terms or {}).items():
            h = as_point(h)
            c = Fraction(c)
            clean[h] = clean.get(h, 0) + c
        self._terms = {h: c for h, c in clean.items() if c}

    @classmethod
    def gen(cls, weight: int, h, coeff=1) -> "LiSymbol":
        return cls(weight, {as_point(h): coeff})

    @property
    def terms(self) -> Dict[object, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[object, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: _point_key(t[0]))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def variables(self) -> Tuple[str, ...]:
        vs = set()
        for h in self._terms:
            if isinstance(h, FactoredRational):
                vs.update(h.variables)
        return tuple(sorted(vs))

    @property
    def base_field(self) -> str:
        vs = self.variables
        if not vs:
            return "Q"
        return "Q(" + ",".join(vs) + ")"

    def _check(self, other: "LiSymbol"):
        if self.weight != other.weight:
            raise DomainError(f"weight mismatch: {self.weight} vs {other.weight}")

    def __add__(self, other: "LiSymbol") -> "LiSymbol":
        self._check(other)
        out = dict(self._terms)
        for h, c in other._terms.items():
            out[h] = out.get(h, 0) + c
        return LiSymbol(self.weight, out)

    def __neg__(self):
        return LiSymbol(self.weight, {h: -c for h, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LiSymbol":
        c = Fraction(c)
        return LiSymbol(self.weight, {h: v * c for h, v in self._terms.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, LiSymbol):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.weight == other.weight and self._terms == other._terms

    def __hash__(self):
        return hash((self.weight, frozenset(self._terms.items())))

    def __repr__(self):
        from .cli.grammar import format_lisymbol

        return f"LiSymbol({format_lisymbol(self)!r})"


def li_sum(weight: int, parts: Iterable[LiSymbol]) -> LiSymbol:
    out = LiSymbol(weight)
    for s in parts:
        out = out + s
    return out


# ---------------------------------------------------------------------------
# delta


class DeltaImage:
    """Formal sum of {h}_{m-1} (x) g with g expanded over atoms."""

    __slots__ = ("weight", "_terms")

    def __init__(self, weight: int, terms: Mapping[Tuple[object, Atom], object] | None = None):
        self.weight = weight
        self._terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def terms(self) -> Dict[Tuple[object, Atom], Fraction]:
        return dict(self._terms)

    def atoms(self) -> List[Atom]:
        return sorted({a for _, a in self._terms}, key=lambda a: a.key)

    def component(self, atom: Atom) -> LiSymbol:
        """The weight m-1 symbol paired with ``atom``."""
        return LiSymbol(self.weight - 1, {h: c for (h, a), c in self._terms.items() if a == atom})

    def items(self):
        return sorted(self._terms.items(), key=lambda t: (t[0][1].key, _point_key(t[0][0])))

    def __eq__(self, other):
        if not isinstance(other, DeltaImage):
            return NotImplemented
        return self._terms == other._terms


def delta(s: LiSymbol):
    """delta_2 lands in the wedge square; delta_m for m > 2 in a DeltaImage."""
    m = s.weight
    if m < 2:
        raise DomainError("delta needs weight >= 2")
    if m == 2:
        out = WedgeElement.zero(2)
        for h, c in s.items():
            if h is ZERO or h is INF:
                continue
            one_minus = h.one_minus()
            if one_minus is None:
                continue
            out = out + wedge_of([h, one_minus]).scale(c)
        return out
    acc: Dict[Tuple[object, Atom], Fraction] = {}
    for h, c in s.items():
        if h is ZERO or h is INF:
            continue
        for atom, e in expand_slot(h):
            key = (h, atom)
            acc[key] = acc.get(key, 0) + c * e
    return DeltaImage(m, acc)


# ---------------------------------------------------------------------------
# residues and specialization


def res(v: Valuation, s: LiSymbol) -> LiSymbol:
    """{h} -> {h(v)} when h is a unit along v, else 0."""
    out: Dict[object, Fraction] = {}
    for h, c in s.items():
        if h is ZERO or h is INF:
            continue
        if val_ord(v, h):
            continue
        r = residue_unit(v, h)
        if not r.is_constant():
            raise DomainError(f"residue of {h} along {v} is not constant")
        out[r] = out.get(r, 0) + c
    return LiSymbol(s.weight, out)


def specialize(s: LiSymbol, values: Mapping[str, complex]) -> List[Tuple[Fraction, complex]]:
    """Numeric points of a symbol at complex parameter values (0 and INF dropped)."""
    out = []
    for h, c in s.items():
        if h is ZERO or h is INF:
            continue
        out.append((c, h.evaluate(values)))
    return out


def sv_value(s: LiSymbol, values: Mapping[str, complex] | None = None) -> float:
    """Sum of coefficient * single-valued polylog over the specialized points."""
    total = 0.0
    terms = specialize(s, values or {})
    for c, z in terms:
        total += float(c) * sv_polylog(s.weight, z)
    return total


# ---------------------------------------------------------------------------
# relation generators


class RejectedGenerator(DomainError):
    """Kernel evidence failed; ``detail`` names the offending term or sample."""

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


@dataclass
class Relation:
    name: str
    symbol: LiSymbol
    evidence: str
    notes: Dict[str, object] = field(default_factory=dict)

    @property
    def weight(self) -> int:
        return self.symbol.weight


def _parameter(alpha: LiSymbol, var: Optional[str]) -> str:
    vs = alpha.variables
    if var is not None:
        if any(v != var for v in vs):
            raise DomainError(f"symbol involves {vs}, expected only {var}")
        return var
    if len(vs) > 1:
        raise DomainError(f"symbol over a field with several parameters {vs}")
    return vs[0] if vs else "t"


def _numeric_samples(seed: int, count: int) -> List[complex]:
    rng = random.Random(seed)
    return [cmath.rect(rng.uniform(0.3, 3.0), rng.uniform(-3.1, 3.1)) for _ in range(count)]


def check_kernel(
    alpha: LiSymbol,
    evidence: str,
    certificate: Mapping[str, Sequence[Tuple[object, LiSymbol]]] | None = None,
    var: str | None = None,
    samples: int = 12,
    seed: int = 0,
    tol: float = 1e-8,
) -> Tuple[str, Dict[str, object]]:
    """Validate delta(alpha) = 0 at the requested evidence level.

    Weight 2 is always decided exactly.  Above weight 2 a certificate maps the
    text form of each atom to a list of (coefficient, relation) pairs whose sum
    must equal that component exactly; the numeric check evaluates each
    component's single-valued polylog at random complex parameter values.
    """
    m = alpha.weight
    d = delta(alpha)
    if m == 2:
        if not d.is_zero():
            raise RejectedGenerator("delta is not zero", d)
        return PROVED, {}
    if d.is_zero():
        return PROVED, {}
    if evidence == SYMBOLIC:
        raise RejectedGenerator("delta vanishes only modulo lower relations; supply a certificate or use numeric evidence", d)
    if evidence == CERTIFICATE:
        certificate = certificate or {}
        for atom in d.atoms():
            comp = d.component(atom)
            claimed = LiSymbol(m - 1)
            for c, rel in certificate.get(str(atom), ()):
                claimed = claimed + rel.scale(c)
            if comp != claimed:
                raise RejectedGenerator(f"certificate does not account for the component at {atom}", comp - claimed)
        return CERTIFIED, {"atoms": [str(a) for a in d.atoms()]}
    if evidence == NUMERIC:
        t = _parameter(alpha, var)
        worst = 0.0
        for z in _numeric_samples(seed, samples):
            for atom in d.atoms():
                comp = d.component(atom)
                try:
                    val = sv_value(comp, {t: z})
                except (ZeroDivisionError, DomainError):
                    continue
                worst = max(worst, abs(val))
                if abs(val) > tol:
                    raise RejectedGenerator(f"component at {atom} does not vanish at {t}={z}", (z, str(atom), val))
        return NUMERIC, {"samples": samples, "seed": seed, "max_abs": worst}
    raise DomainError(f"unknown evidence kind {evidence!r}")


def r_m_generator(
    alpha: LiSymbol,
    kernel_evidence: str = SYMBOLIC,
    certificate=None,
    var: str | None = None,
    **numeric,
) -> Relation:
    """res_0(alpha) - res_INF(alpha), after checking delta(alpha) = 0."""
    t = _parameter(alpha, var)
    level, notes = check_kernel(alpha, kernel_evidence, certificate, t, **numeric)
    g = res(Valuation.point(t, 0), alpha) - res(Valuation.infinity(t), alpha)
    return Relation("", g, level, notes)


# ---------------------------------------------------------------------------
# fixtures


def five_term(c=3, var: str = "t") -> LiSymbol:
    """{c} + {t} + {(1-c)/(1-ct)} + {1-ct} + {(1-t)/(1-ct)} over Q(t)."""
    c = Fraction(c)
    t = MultiPoly.var(var)
    one_ct = factor(1 - t * c)
    return LiSymbol(2, {
        FactoredRational.const(c): 1,
        factor(t): 1,
        FactoredRational.const(1 - c) / one_ct: 1,
        one_ct: 1,
        factor(1 - t) / one_ct: 1,
    })
