"""Polylogarithms, single-valued polylogarithms and Monte Carlo Chow integrals.

The integral of ``log|f1| dlog|f2| ^ ... ^ dlog|f_{2p+1}|`` over
``(P^1(C))^p`` is estimated by sampling each coordinate from the
Fubini-Study measure.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .exactalg import INF, ZERO, DomainError, FactoredRational, MultiPoly

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# Bernoulli numbers and zeta values


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    return -sum(comb(n + 1, k) * bernoulli(k) for k in range(n)) / (n + 1)


def bernoulli_poly(n: int, x: complex) -> complex:
    return sum(comb(n, k) * float(bernoulli(k)) * x ** (n - k) for k in range(n + 1))


@lru_cache(maxsize=None)
def zeta_int(k: int) -> float:
    """Riemann zeta at an integer k != 1."""
    if k == 1:
        raise DomainError("zeta has a pole at 1")
    if k == 0:
        return -0.5
    if k < 0:
        n = 1 - k
        return float(-bernoulli(n) / n)
    # Euler-Maclaurin with cutoff N
    N = 12
    s = math.fsum(n ** -k for n in range(1, N))
    s += N ** (1 - k) / (k - 1) + 0.5 * N ** -k
    rising = k  # k (k+1) ... (k + 2j - 2)
    for j in range(1, 12):
        term = float(bernoulli(2 * j)) / factorial(2 * j) * rising * N ** (-k - 2 * j + 1)
        s += term
        if abs(term) < 1e-18 * s:
            break
        rising *= (k + 2 * j - 1) * (k + 2 * j)
    return s


def _harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# classical polylogarithm


def _neg(z: complex) -> complex:
    # -z, sending the negative real axis to the upper side of the cut
    w = complex(-z.real, -z.imag)
    if w.imag == 0:
        w = complex(w.real, 0.0)
    return w


def _series(m: int, z: complex) -> complex:
    s, zk, k = 0j, z, 1
    while True:
        t = zk / k ** m
        s += t
        if abs(t) < 1e-17 * max(abs(s), 1e-300) or k > 2000:
            return s
        k += 1
        zk *= z


def _log_series(m: int, z: complex) -> complex:
    mu = cmath.log(z)
    if mu == 0:
        return complex(zeta_int(m))
    s = 0j
    muk = 1 + 0j
    k = 0
    while True:
        if k != m - 1:
            t = zeta_int(m - k) * muk / factorial(k)
            s += t
            # zeta vanishes at negative even integers, so skip exact zeros
            if k > m and t != 0 and abs(t) < 1e-17 * max(abs(s), 1e-300):
                break
        if k > 400:
            break
        k += 1
        muk *= mu
    s += mu ** (m - 1) / factorial(m - 1) * (_harmonic(m - 1) - cmath.log(_neg(mu)))
    return s


def li_m(m: int, z) -> complex:
    """Principal branch of Li_m(z); for real z > 1 the value is the limit from below."""
    if m < 1:
        raise DomainError("li_m needs m >= 1")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("li_m argument is not finite")
    if z == 0:
        return 0j
    if m == 1:
        if z == 1:
            raise DomainError("Li_1 has a pole at 1")
        return -cmath.log(_neg(z - 1))
    r = abs(z)
    if r <= 0.5:
        return _series(m, z)
    if r >= 2:
        inv = _series(m, 1 / z)
        corr = TWO_PI_I ** m / factorial(m) * bernoulli_poly(m, 0.5 + cmath.log(_neg(z)) / TWO_PI_I)
        return -((-1) ** m) * inv - corr
    return _log_series(m, z)


def on_branch_cut(m: int, z) -> bool:
    z = complex(z)
    return m >= 1 and z.imag == 0 and z.real > 1


def sv_polylog(m: int, z) -> float:
    """Single-valued polylogarithm; the Bloch-Wigner function for m = 2."""
    if m < 2:
        raise DomainError("sv_polylog needs m >= 2")
    if z is INF or z is ZERO:
        return 0.0
    z = complex(z)
    if z == 0:
        return 0.0
    lz = math.log(abs(z))
    s = li_m(m, z)
    if lz != 0:
        for k in range(1, m):
            bk = bernoulli(k)
            if bk:
                s += 2 ** k * float(bk) / factorial(k) * lz ** k * li_m(m - k, z)
    return s.real if m % 2 else s.imag


# ---------------------------------------------------------------------------
# numeric rational functions


@dataclass(frozen=True)
class NumericPoly:
    """Polynomial with complex coefficients: {exponent vector: coefficient}."""

    variables: Tuple[str, ...]
    terms: Tuple[Tuple[Tuple[int, ...], complex], ...]

    @classmethod
    def from_multipoly(cls, p: MultiPoly, variables: Sequence[str], params: Mapping[str, complex] | None = None):
        params = params or {}
        variables = tuple(variables)
        out: Dict[Tuple[int, ...], complex] = {}
        for mono, c in p.items():
            coeff = complex(c)
            exps = [0] * len(variables)
            for v, e in mono:
                if v in variables:
                    exps[variables.index(v)] = e
                elif v in params:
                    coeff *= complex(params[v]) ** e
                else:
                    raise DomainError(f"variable {v} has no value")
            key = tuple(exps)
            out[key] = out.get(key, 0) + coeff
        return cls(variables, tuple((k, c) for k, c in sorted(out.items()) if c != 0))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, k: int) -> int:
        return max((e[k] for e, _ in self.terms), default=0)

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """z has shape (N, p)."""
        out = np.zeros(z.shape[0], dtype=complex)
        for exps, c in self.terms:
            t = np.full(z.shape[0], c, dtype=complex)
            for k, e in enumerate(exps):
                if e:
                    t = t * z[:, k] ** e
            out += t
        return out

    def diff(self, k: int) -> "NumericPoly":
        out = []
        for exps, c in self.terms:
            e = exps[k]
            if e:
                ne = list(exps)
                ne[k] -= 1
                out.append((tuple(ne), c * e))
        return NumericPoly(self.variables, tuple(out))


@dataclass(frozen=True)
class NumericRational:
    """constant * prod(poly ** exponent) with complex coefficients."""

    variables: Tuple[str, ...]
    constant: complex
    factors: Tuple[Tuple[NumericPoly, int], ...] = ()

    @classmethod
    def from_factored(cls, f, variables: Sequence[str], params: Mapping[str, complex] | None = None):
        variables = tuple(variables)
        if not isinstance(f, FactoredRational):
            f = FactoredRational.const(f)
        c = complex(f.constant)
        facs = []
        for a, e in f.factors:
            p = NumericPoly.from_multipoly(a.payload, variables, params)
            if all(not any(ex) for ex, _ in p.terms):
                val = p.terms[0][1] if p.terms else 0j
                if val == 0:
                    raise DomainError(f"factor {a} vanishes at the given parameters")
                c *= val ** e
            else:
                facs.append((p, e))
        return cls(variables, c, tuple(facs))

    @classmethod
    def linear(cls, variables: Sequence[str], coeffs: Mapping[str, complex], const: complex = 0):
        """sum coeffs[v] * v + const."""
        variables = tuple(variables)
        terms = []
        for v, c in coeffs.items():
            e = [0] * len(variables)
            e[variables.index(v)] = 1
            terms.append((tuple(e), complex(c)))
        if const:
            terms.append(((0,) * len(variables), complex(const)))
        return cls(variables, 1 + 0j, ((NumericPoly(variables, tuple(sorted(terms))), 1),))

    @classmethod
    def const(cls, variables: Sequence[str], c: complex):
        return cls(tuple(variables), complex(c))

    def is_constant(self) -> bool:
        return not self.factors

    def log_abs_and_dlog(self, z: np.ndarray):
        """log|f|, |f| and the holomorphic logarithmic derivatives (N, p)."""
        n, p = z.shape
        logabs = np.full(n, math.log(abs(self.constant)))
        g = np.zeros((n, p), dtype=complex)
        for poly, e in self.factors:
            val = poly.evaluate(z)
            with np.errstate(divide="ignore", invalid="ignore"):
                logabs = logabs + e * np.log(np.abs(val))
                for k in range(p):
                    d = poly.diff(k)
                    if not d.is_zero():
                        g[:, k] += e * d.evaluate(z) / val
        return logabs, g

    def evaluate(self, values: Sequence[complex]) -> complex:
        z = np.array([list(values)], dtype=complex)
        v = self.constant
        for poly, e in self.factors:
            v *= complex(poly.evaluate(z)[0]) ** e
        return v


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class MCConfig:
    samples: int = 200_000
    seed: int = 0
    workers: int = 1
    epsilon: float = 1e-9
    batch: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1 or self.workers < 1:
            raise DomainError("samples and workers must be positive")
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")


@dataclass
class IntegralEstimate:
    value: float
    stderr: float
    samples: int
    rejected_fraction: float
    seed: int
    warning: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _sample(rng: np.random.Generator, n: int, p: int):
    u = rng.random((n, p))
    phi = rng.random((n, p)) * (2 * math.pi)
    r2 = u / (1 - u)
    z = np.sqrt(r2) * np.exp(1j * phi)
    w = np.prod(math.pi * (1 + r2) ** 2, axis=1)
    return z, w


def _integrand(slots: Sequence[NumericRational], z: np.ndarray, log_cut: float):
    n, p = z.shape
    ok = np.ones(n, dtype=bool)
    log1, _ = slots[0].log_abs_and_dlog(z)
    ok &= np.isfinite(log1) & (np.abs(log1) <= log_cut)
    if p == 0:
        return np.where(ok, log1, 0.0), ok
    M = np.empty((n, 2 * p, 2 * p))
    for j, f in enumerate(slots[1:]):
        la, g = f.log_abs_and_dlog(z)
        ok &= np.isfinite(la) & (np.abs(la) <= log_cut)
        M[:, j, 0::2] = g.real
        M[:, j, 1::2] = -g.imag
    M[~ok] = 0.0
    M = np.nan_to_num(M, nan=0.0, posinf=0.0, neginf=0.0)
    det = np.linalg.det(M)
    val = np.where(ok, np.nan_to_num(log1) * det, 0.0)
    return val, ok


def _check_slots(p: int, slots: Sequence[NumericRational]):
    if len(slots) != 2 * p + 1:
        raise DomainError(f"expected {2 * p + 1} slots on a {p}-dimensional torus, got {len(slots)}")
    for f in slots:
        if f.constant == 0:
            raise DomainError("a slot is identically zero")
        if len(f.variables) != p:
            raise DomainError("slot variables do not match the dimension")


def _worker(terms, p: int, cfg: MCConfig, worker: int, count: int):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, worker])))
    log_cut = math.log(1 / cfg.epsilon)
    s = s2 = 0.0
    rejected = 0
    done = 0
    while done < count:
        n = min(cfg.batch, count - done)
        if p:
            z, w = _sample(rng, n, p)
        else:
            z, w = np.zeros((n, 0), dtype=complex), np.ones(n)
        total = np.zeros(n)
        bad = np.zeros(n, dtype=bool)
        for c, slots in terms:
            val, ok = _integrand(slots, z, log_cut)
            bad |= ~ok
            total += c * val
        total = np.where(bad, 0.0, total * w)
        rejected += int(bad.sum())
        s += math.fsum(total)
        s2 += math.fsum(total * total)
        done += n
    return s, s2, rejected


def chow_integral_sum(p: int, terms: Sequence[Tuple[float, Sequence[NumericRational]]], cfg: MCConfig) -> IntegralEstimate:
    """Estimate sum c_i * theta(slots_i) with common samples for every term."""
    terms = [(float(c), list(sl)) for c, sl in terms]
    for _, sl in terms:
        _check_slots(p, sl)
    if not terms:
        return IntegralEstimate(0.0, 0.0, cfg.samples, 0.0, cfg.seed)
    if p == 0:
        z = np.zeros((1, 0), dtype=complex)
        v = 0.0
        for c, sl in terms:
            val, ok = _integrand(sl, z, math.inf)
            v += c * float(val[0])
        return IntegralEstimate(v, 0.0, cfg.samples, 0.0, cfg.seed)
    counts = [cfg.samples // cfg.workers + (1 if w < cfg.samples % cfg.workers else 0) for w in range(cfg.workers)]
    if cfg.workers == 1:
        parts = [_worker(terms, p, cfg, 0, counts[0])]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            futs = [ex.submit(_worker, terms, p, cfg, w, counts[w]) for w in range(cfg.workers)]
            parts = [f.result() for f in futs]
    n = cfg.samples
    s = math.fsum(x[0] for x in parts)
    s2 = math.fsum(x[1] for x in parts)
    rej = sum(x[2] for x in parts)
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0)
    stderr = math.sqrt(var / (n - 1)) if n > 1 else 0.0
    frac = rej / n
    warning = f"rejected fraction {frac:.4f} >= 0.01" if frac >= 0.01 else None
    return IntegralEstimate(mean, stderr, n, frac, cfg.seed, warning)


def chow_integral(p: int, slots: Sequence[NumericRational], cfg: MCConfig) -> IntegralEstimate:
    return chow_integral_sum(p, [(1.0, slots)], cfg)


def det_matrix(slots: Sequence[NumericRational], z: np.ndarray) -> np.ndarray:
    """Per-sample determinant of the dlog matrix, used by skew-symmetry probes."""
    n, p = z.shape
    M = np.empty((n, 2 * p, 2 * p))
    for j, f in enumerate(slots[1:]):
        _, g = f.log_abs_and_dlog(z)
        M[:, j, 0::2] = g.real
        M[:, j, 1::2] = -g.imag
    return np.linalg.det(M)


def sample_points(p: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 0])))
    return _sample(rng, n, p)[0]


# ---------------------------------------------------------------------------
# numeric forms of omega and cycle terms


def omega_numeric(m: int, a: complex, variables: Sequence[str] | None = None) -> List[NumericRational]:
    """(1-x1), x1, (x1-x2), x2, ..., (x_{m-1} - a) with complex a."""
    xs = tuple(variables) if variables is not None else tuple(f"x{i}" for i in range(1, m))
    slots = [NumericRational.linear(xs, {xs[0]: -1}, 1), NumericRational.linear(xs, {xs[0]: 1})]
    for i in range(1, m - 1):
        slots.append(NumericRational.linear(xs, {xs[i - 1]: 1, xs[i]: -1}))
        slots.append(NumericRational.linear(xs, {xs[i]: 1}))
    slots.append(NumericRational.linear(xs, {xs[-1]: 1}, -complex(a)))
    return slots


def monomial_slots(mono, variables: Sequence[str], params: Mapping[str, complex] | None = None) -> List[NumericRational]:
    return [NumericRational.from_factored(FactoredRational.from_atom(a), variables, params) for a in mono]


@dataclass
class EmpiricalConstant:
    q_hat: float
    spread: float
    support: List[complex]
    ratios: List[float] = field(default_factory=list)
    ratio_stderrs: List[float] = field(default_factory=list)
    rejected: List[complex] = field(default_factory=list)
    estimates: List[IntegralEstimate] = field(default_factory=list)
    within_tolerance: bool = False

    def to_dict(self) -> dict:
        return {
            "q_hat": self.q_hat,
            "spread": self.spread,
            "support": [format_complex(z) for z in self.support],
            "ratios": self.ratios,
            "ratio_stderrs": self.ratio_stderrs,
            "rejected": [format_complex(z) for z in self.rejected],
            "estimates": [e.to_dict() for e in self.estimates],
            "within_tolerance": self.within_tolerance,
        }


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def estimate_q(m: int, points: Sequence[complex], cfg: MCConfig, sigma: float = 3.0, rel_tol: float = 0.02) -> EmpiricalConstant:
    """Ratios chow_integral(omega_m(a)) / sv_polylog(m, a) and their spread."""
    if not points:
        raise DomainError("estimate_q needs at least one point")
    support, rejected, ratios, errs, ests = [], [], [], [], []
    for a in points:
        a = complex(a)
        L = sv_polylog(m, a)
        if abs(L) <= 1e-3:
            rejected.append(a)
            continue
        est = chow_integral(m - 1, omega_numeric(m, a), cfg)
        support.append(a)
        ests.append(est)
        ratios.append(est.value / L)
        errs.append(est.stderr / abs(L))
    if not ratios:
        raise DomainError("every point has a vanishing single-valued polylogarithm")
    q = math.fsum(ratios) / len(ratios)
    worst = 0.0
    ok = True
    for i in range(len(ratios)):
        for k in range(i + 1, len(ratios)):
            d = abs(ratios[i] - ratios[k])
            worst = max(worst, d)
            allowed = max(sigma * math.hypot(errs[i], errs[k]), rel_tol * abs(q))
            ok &= d <= allowed
    spread = worst / abs(q) if q else math.inf
    return EmpiricalConstant(q, spread, support, ratios, errs, rejected, ests, ok)


def vanishing_verdict(total: IntegralEstimate, l1_mass: float, sigma: float = 3.0, rel_tol: float = 0.02) -> bool:
    return abs(total.value) <= max(sigma * total.stderr, rel_tol * l1_mass)


def verify_boundary(top, cfg: MCConfig, sigma: float = 3.0, rel_tol: float = 0.02,
                    params: Mapping[str, complex] | None = None) -> dict:
    """Integrate every boundary contribution of a degree-0 cycle and test the sum.

    Names other than the cycle coordinates are parameters; ``params`` gives
    their complex values for the numerical stage.
    """
    from .chowcomplex import as_cycle_sum, boundary_terms, normalize_cycle, CycleSum

    top = as_cycle_sum(top)
    if top.degree != 0:
        raise DomainError("verify_boundary needs a degree-0 cycle")
    m = top.weight
    p = m - 1
    contributions = []
    all_terms = []
    for label, vs, w in boundary_terms(top):
        piece = normalize_cycle(CycleSum.from_parts(m, 1, [(1, vs, w)]))
        for c, cyc in piece.terms():
            (mono, _), = cyc.wedge.items()
            slots = monomial_slots(mono, cyc.variables, params)
            contributions.append((label, c, cyc))
            all_terms.append((float(c), slots))
    per_term = [chow_integral_sum(p, [t], cfg) for t in all_terms]
    total = chow_integral_sum(p, all_terms, cfg)
    l1 = math.fsum(abs(e.value) for e in per_term)
    return {
        "weight": m,
        "terms": [(label, c, cyc, e) for (label, c, cyc), e in zip(contributions, per_term)],
        "total": total,
        "l1_mass": l1,
        "verdict": vanishing_verdict(total, l1, sigma, rel_tol),
    }
