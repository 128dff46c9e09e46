"""Command line entry point; every command prints a JSON report."""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from .. import bloch
from ..chowcomplex import (
    Cycle,
    CycleSum,
    T_m,
    boundary_terms,
    differential,
    gamma_P,
    normalize_cycle,
    omega,
    omega_tilde,
)
from ..exactalg import INF, ZERO, DomainError, FactoredRational, MultiPoly, NotAUnitError
from ..numerics import (
    MCConfig,
    chow_integral_sum,
    estimate_q,
    format_complex,
    monomial_slots,
    omega_numeric,
    sv_polylog,
    vanishing_verdict,
    verify_boundary,
)
from ..tame import IndeterminateResidue, UnparametrizableDivisor, Valuation, divisor_support, tame_symbol
from ..wedge import wedge_of
from .grammar import (
    ParseError,
    format_cycle,
    format_cycle_sum,
    format_factored,
    format_lisymbol,
    format_wedge,
    parse_complex,
    parse_complex_list,
    parse_cycle_sum,
    parse_factored,
    parse_lisymbol,
    parse_rational,
    parse_wedge,
)
from .registry import Registry

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3
VERIFIED, FAILED, COMPUTED, ERROR = "verified", "failed", "computed", "error"

DEFAULTS = {
    "samples": 200_000,
    "seed": 0,
    "workers": 1,
    "epsilon": 1e-9,
    "tolerance_sigma": 3.0,
    "registry_path": None,
}
CONFIG_KEYS = set(DEFAULTS)


class UsageError(DomainError):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.exact: Dict[str, object] = {}
        self.numeric: Dict[str, object] = {}
        self.verdict = COMPUTED
        self.warnings: List[str] = []
        self.timings: Dict[str, float] = {}

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "exact_results": self.exact,
            "numeric_results": self.numeric,
            "verdict": self.verdict,
            "warnings": self.warnings,
            "timings": self.timings,
        }


def estimate_dict(e) -> dict:
    d = {"value": e.value, "stderr": e.stderr, "samples": e.samples, "seed": e.seed,
         "rejected_fraction": e.rejected_fraction}
    return d


# ---------------------------------------------------------------------------
# argument helpers


def parse_valuation(text: str) -> Valuation:
    if "=" not in text:
        raise ParseError("expected var=value", text, 0)
    var, _, rhs = text.partition("=")
    var = var.strip()
    if not var or not var.isidentifier():
        raise ParseError("expected a variable name before '='", text, 0)
    v = parse_rational(rhs)
    if v is INF:
        return Valuation.infinity(var)
    if v is ZERO:
        return Valuation.point(var, 0)
    if v.is_constant():
        return Valuation.point(var, v.constant)
    return Valuation.graph(var, v)


def parse_params(items: Optional[List[str]]) -> Dict[str, complex]:
    out = {}
    for item in items or []:
        name, _, val = item.partition("=")
        if not name or not val:
            raise ParseError("expected name=complex", item, 0)
        out[name.strip()] = parse_complex(val)
    return out


def mc_config(opts: dict) -> MCConfig:
    return MCConfig(samples=int(opts["samples"]), seed=int(opts["seed"]),
                    workers=int(opts["workers"]), epsilon=float(opts["epsilon"]))


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    return data


def single_variable(values, var: Optional[str]) -> str:
    vs = set()
    for f in values:
        if isinstance(f, FactoredRational):
            vs.update(f.variables)
    if var:
        if vs - {var}:
            raise DomainError(f"functions involve {sorted(vs)}, expected only {var}")
        return var
    if len(vs) > 1:
        raise DomainError(f"expected functions of one variable, got {sorted(vs)}")
    return vs.pop() if vs else "t"


def cycle_terms_text(s: CycleSum) -> List[dict]:
    return [{"coeff": str(c), "cycle": format_cycle(cyc.variables, cyc.wedge)} for c, cyc in s.terms()]


# ---------------------------------------------------------------------------
# commands


def cmd_factor(a, opts, rep: Report):
    f = parse_factored(a.expr)
    rep.exact["factored"] = format_factored(f)
    rep.exact["constant"] = str(f.constant)
    rep.exact["atoms"] = [{"atom": str(x), "kind": x.kind, "exponent": e} for x, e in f.factors]
    if any(x.kind == "opaque" for x, _ in f.factors):
        rep.warnings.append("some factors are opaque: irreducibility not established")


def cmd_wedge(a, opts, rep: Report):
    w = parse_wedge(a.expr)
    rep.exact["arity"] = w.arity if not w.is_zero() else None
    rep.exact["wedge"] = format_wedge(w)


def cmd_tame(a, opts, rep: Report):
    w = parse_wedge(a.expr)
    v = parse_valuation(a.at)
    r = tame_symbol(v, w)
    rep.exact["valuation"] = v.label
    rep.exact["tame"] = format_wedge(r)


def _check_expect(rep: Report, got: CycleSum, expect: Optional[str]):
    if expect is None:
        return
    want = normalize_cycle(parse_cycle_sum(expect, got.weight, got.degree))
    ok = normalize_cycle(got) == want
    rep.exact["expected"] = format_cycle_sum(want)
    rep.verdict = VERIFIED if ok else FAILED


def cmd_d(a, opts, rep: Report):
    s = parse_cycle_sum(a.expr)
    rep.exact["input"] = format_cycle_sum(s)
    rep.exact["weight"], rep.exact["degree"] = s.weight, s.degree
    rep.exact["boundary"] = [
        {"divisor": label, "variables": list(vs), "tame": format_wedge(w)} for label, vs, w in boundary_terms(s, include_zero=True)
    ]
    d = differential(s)
    rep.exact["differential"] = format_cycle_sum(d)
    rep.exact["differential_terms"] = cycle_terms_text(d)
    _check_expect(rep, d, a.expect)


def cmd_d2check(a, opts, rep: Report):
    s = parse_cycle_sum(a.expr)
    d1 = differential(s, normalize=False)
    d2 = differential(d1, normalize=False)
    rep.exact["d"] = format_cycle_sum(d1)
    rep.exact["dd"] = format_cycle_sum(d2)
    rep.verdict = VERIFIED if d2.is_zero() else FAILED


def cmd_weil(a, opts, rep: Report):
    f, g = parse_factored(a.f), parse_factored(a.g)
    var = single_variable([f, g], a.var)
    w = wedge_of([f, g])
    total = None
    per = []
    for v in divisor_support(w, (var,)):
        r = tame_symbol(v, w)
        per.append({"divisor": v.label, "tame": format_wedge(r)})
        total = r if total is None else total + r
    rep.exact["contributions"] = per
    rep.exact["sum"] = format_wedge(total) if total is not None else "0"
    rep.verdict = VERIFIED if total is None or total.is_zero() else FAILED


def cmd_delta(a, opts, rep: Report):
    s = parse_lisymbol(a.expr)
    d = bloch.delta(s)
    rep.exact["input"] = format_lisymbol(s)
    if s.weight == 2:
        rep.exact["delta"] = format_wedge(d)
    else:
        rep.exact["delta"] = [
            {"atom": str(atom), "component": format_lisymbol(d.component(atom))} for atom in d.atoms()
        ]
    rep.exact["is_zero"] = d.is_zero()


def cmd_res(a, opts, rep: Report):
    s = parse_lisymbol(a.expr)
    v = parse_valuation(a.at)
    if v.kind == "graph":
        raise UsageError("res needs a point or INF of the parameter line")
    rep.exact["valuation"] = v.label
    rep.exact["res"] = format_lisymbol(bloch.res(v, s))


def cmd_omega(a, opts, rep: Report):
    val = parse_rational(a.a)
    m = a.m
    build = omega_tilde if a.tilde else omega
    prefix = "y" if a.tilde else "x"
    xs = tuple(f"{prefix}{i}" for i in range(1, m))
    w = build(m, val, xs)
    rep.exact["wedge"] = format_wedge(w)
    cyc = Cycle(xs, w)
    rep.exact["cycle"] = format_cycle(xs, w)
    d = differential(cyc)
    rep.exact["differential"] = format_cycle_sum(d)


def cmd_gamma(a, opts, rep: Report):
    P = parse_factored(a.P)
    xs = tuple(f"x{i}" for i in range(1, a.m))
    stray = [v for v in P.variables if v not in xs]
    if stray:
        raise DomainError(f"P uses {stray}; coordinates are {list(xs)}")
    c = gamma_P(a.m, P, xs)
    rep.exact["cycle"] = format_cycle(c.variables, c.wedge)
    rep.exact["normalized"] = format_cycle_sum(normalize_cycle(c))


def cmd_tmap(a, opts, rep: Report):
    s = parse_lisymbol(a.expr)
    t = T_m(s)
    rep.exact["input"] = format_lisymbol(s)
    rep.exact["image"] = format_cycle_sum(t)


def cmd_rgen(a, opts, rep: Report):
    alpha = parse_lisymbol(a.expr)
    reg_path = a.registry or opts.get("registry_path")
    reg = Registry.load(reg_path) if reg_path else Registry()
    cert = None
    cited = []
    if a.certificate:
        with open(a.certificate) as fh:
            raw = json.load(fh)
        cert = {}
        for atom, pairs in raw.items():
            cert[atom] = [(Fraction(c), reg.get(name).symbol) for c, name in pairs]
            cited += [reg.get(name) for _, name in pairs]
    try:
        rel = bloch.r_m_generator(alpha, a.evidence, certificate=cert, var=a.var, seed=int(opts["seed"]))
    except bloch.RejectedGenerator as e:
        rep.verdict = FAILED
        rep.exact["rejected"] = str(e)
        detail = e.detail
        if hasattr(detail, "arity") and hasattr(detail, "items"):
            rep.exact["residual"] = format_wedge(detail)
        elif isinstance(detail, bloch.LiSymbol):
            rep.exact["residual"] = format_lisymbol(detail)
        elif isinstance(detail, bloch.DeltaImage):
            rep.exact["residual"] = [{"atom": str(x), "component": format_lisymbol(detail.component(x))} for x in detail.atoms()]
        elif detail is not None:
            rep.exact["residual"] = str(detail)
        return
    # a certificate is only as strong as the weakest relation it cites
    if rel.evidence == bloch.CERTIFIED and any(r.evidence == bloch.NUMERIC for r in cited):
        rel.evidence = bloch.NUMERIC
        rep.warnings.append("certificate cites numerically checked relations")
    rel.name = a.name or reg.fresh_name(alpha.weight)
    rep.exact["name"] = rel.name
    rep.exact["generator"] = format_lisymbol(rel.symbol)
    rep.exact["evidence"] = rel.evidence
    if rel.notes:
        rep.numeric["kernel_check"] = rel.notes
    rep.verdict = VERIFIED
    if reg_path:
        reg.add(rel)
        reg.save(reg_path)
        rep.exact["registry"] = reg_path


def _cycle_numeric_terms(s: CycleSum, params):
    terms = []
    for c, cyc in s.terms():
        (mono, _), = cyc.wedge.items()
        terms.append((float(c), monomial_slots(mono, cyc.variables, params)))
    return terms


def cmd_integrate(a, opts, rep: Report):
    s = parse_cycle_sum(a.expr)
    if s.n != 2 * s.p + 1:
        raise DomainError(f"integration needs arity 2p+1; got p={s.p}, arity {s.n}")
    params = parse_params(a.param)
    cfg = mc_config(opts)
    terms = _cycle_numeric_terms(s, params)
    rep.exact["input"] = format_cycle_sum(s)
    est = chow_integral_sum(s.p, terms, cfg)
    rep.numeric["integral"] = estimate_dict(est)
    if est.warning:
        rep.warnings.append(est.warning)


def cmd_estimate_q(a, opts, rep: Report):
    pts = parse_complex_list(a.points)
    cfg = mc_config(opts)
    e = estimate_q(a.m, pts, cfg, sigma=float(opts["tolerance_sigma"]))
    rep.numeric["q"] = e.to_dict()
    for z in e.rejected:
        rep.warnings.append(f"point {format_complex(z)} rejected: single-valued polylog too small")
    for est in e.estimates:
        if est.warning:
            rep.warnings.append(est.warning)
    rep.verdict = VERIFIED if e.within_tolerance else FAILED


def cmd_verify_boundary(a, opts, rep: Report):
    top = parse_cycle_sum(a.expr)
    cfg = mc_config(opts)
    r = verify_boundary(top, cfg, sigma=float(opts["tolerance_sigma"]), params=parse_params(a.param))
    rep.exact["input"] = format_cycle_sum(top)
    rep.exact["differential"] = format_cycle_sum(differential(top))
    rep.numeric["terms"] = [
        {"divisor": label, "coeff": str(c), "cycle": format_cycle(cyc.variables, cyc.wedge), **estimate_dict(e)}
        for label, c, cyc, e in r["terms"]
    ]
    rep.numeric["sum"] = estimate_dict(r["total"])
    rep.numeric["l1_mass"] = r["l1_mass"]
    if r["total"].warning:
        rep.warnings.append(r["total"].warning)
    rep.verdict = VERIFIED if r["verdict"] else FAILED


def cmd_verify_fiveterm(a, opts, rep: Report):
    alpha = bloch.five_term(Fraction(a.c))
    rep.exact["alpha"] = format_lisymbol(alpha)
    d = bloch.delta(alpha)
    rep.exact["delta"] = format_wedge(d)
    rel = bloch.r_m_generator(alpha)
    rep.exact["generator"] = format_lisymbol(rel.symbol)
    rep.exact["evidence"] = rel.evidence
    rng = random.Random(int(opts["seed"]))
    worst = 0.0
    for _ in range(a.points):
        t = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        worst = max(worst, abs(bloch.sv_value(alpha, {"t": t})))
    rep.numeric["sv_max_abs"] = worst
    ok = d.is_zero() and worst <= 1e-9
    if a.integrate:
        cfg = mc_config(opts)
        gen_terms = _cycle_numeric_terms(T_m(rel.symbol), {})
        gen = chow_integral_sum(1, gen_terms, cfg)
        t0 = parse_complex(a.t)
        spec_terms = [(float(c), omega_numeric(2, z)) for c, z in bloch.specialize(alpha, {"t": t0})]
        per = [chow_integral_sum(1, [x], cfg) for x in spec_terms]
        tot = chow_integral_sum(1, spec_terms, cfg)
        l1 = math.fsum(abs(e.value) for e in per)
        rep.numeric["generator_integral"] = estimate_dict(gen)
        rep.numeric["specialized_integral"] = {**estimate_dict(tot), "l1_mass": l1, "t": format_complex(t0)}
        sigma = float(opts["tolerance_sigma"])
        gen_l1 = math.fsum(abs(chow_integral_sum(1, [x], cfg).value) for x in gen_terms)
        ok &= vanishing_verdict(gen, gen_l1, sigma) and vanishing_verdict(tot, l1, sigma)
    rep.verdict = VERIFIED if ok else FAILED


COMMANDS: Dict[str, Callable] = {
    "factor": cmd_factor,
    "wedge": cmd_wedge,
    "tame": cmd_tame,
    "d": cmd_d,
    "delta": cmd_delta,
    "res": cmd_res,
    "weil": cmd_weil,
    "d2check": cmd_d2check,
    "omega": cmd_omega,
    "gamma": cmd_gamma,
    "tmap": cmd_tmap,
    "rgen": cmd_rgen,
    "integrate": cmd_integrate,
    "estimate-q": cmd_estimate_q,
    "verify-boundary": cmd_verify_boundary,
    "verify-fiveterm": cmd_verify_fiveterm,
}


def build_parser() -> argparse.ArgumentParser:
    common = _ArgParser(add_help=False)
    g = common.add_argument_group("global options")
    sup = argparse.SUPPRESS
    g.add_argument("--seed", type=int, default=sup, help="Monte Carlo seed")
    g.add_argument("--samples", type=int, default=sup, help="Monte Carlo samples per integral")
    g.add_argument("--workers", type=int, default=sup, help="worker threads")
    g.add_argument("--epsilon", type=float, default=sup, help="rejection cutoff for |f| near 0 or INF")
    g.add_argument("--config", default=sup, help="JSON config file")
    g.add_argument("--out", default=sup, help="also write the report to this path")
    g.add_argument("--timings", action="store_true", default=sup, help="record wall-clock timings")

    p = _ArgParser(prog="chowpoly", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    s = add("factor", "factor a rational function")
    s.add_argument("expr")
    s = add("wedge", "canonical form of a wedge")
    s.add_argument("expr")
    s = add("tame", "tame symbol along a divisor")
    s.add_argument("expr")
    s.add_argument("--at", required=True, help="var=value, var=INF or var=expression")
    s = add("d", "differential of a cycle sum")
    s.add_argument("expr")
    s.add_argument("--expect", help="compare with this cycle sum")
    s = add("delta", "delta of a Li symbol")
    s.add_argument("expr")
    s = add("res", "residue of a Li symbol at a point")
    s.add_argument("expr")
    s.add_argument("--at", required=True)
    s = add("weil", "sum of tame symbols of f/\\g over the line")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--var")
    s = add("d2check", "check d(d(x)) = 0")
    s.add_argument("expr")
    s = add("omega", "the polylogarithm cycle of weight m")
    s.add_argument("-m", type=int, required=True)
    s.add_argument("-a", required=True)
    s.add_argument("--tilde", action="store_true", help="use the product coordinates")
    s = add("gamma", "the cycle gamma_P")
    s.add_argument("-m", type=int, required=True)
    s.add_argument("P")
    s = add("tmap", "image of a Li symbol over Q under T_m")
    s.add_argument("expr")
    s = add("rgen", "relation generator res_0 - res_INF")
    s.add_argument("expr")
    s.add_argument("--evidence", choices=[bloch.SYMBOLIC, bloch.CERTIFICATE, bloch.NUMERIC], default=bloch.SYMBOLIC)
    s.add_argument("--certificate", help="JSON {atom: [[coeff, relation name], ...]}")
    s.add_argument("--name")
    s.add_argument("--var")
    s.add_argument("--registry", help="registry file (overrides config registry_path)")
    s = add("integrate", "Monte Carlo Chow integral of a degree-1 cycle sum")
    s.add_argument("expr")
    s.add_argument("--param", action="append", help="name=complex, repeatable")
    s = add("estimate-q", "ratio of Chow integrals to single-valued polylogs")
    s.add_argument("-m", type=int, required=True)
    s.add_argument("--points", required=True, help="comma separated complex points, e.g. i,1+i")
    s = add("verify-boundary", "integrate the boundary of a degree-0 cycle")
    s.add_argument("expr")
    s.add_argument("--param", action="append", help="name=complex for names other than the coordinates")
    s = add("verify-fiveterm", "check the five-term relation")
    s.add_argument("--c", default="3", help="the constant parameter")
    s.add_argument("--points", type=int, default=20, help="random complex specializations")
    s.add_argument("--integrate", action="store_true", help="also integrate the generator and a specialization")
    s.add_argument("--t", default="1/2+i", help="complex specialization for the integral")
    return p


def _error_report(command, inputs, kind, exc) -> dict:
    rep = Report(command, inputs)
    rep.verdict = ERROR
    err = {"type": kind, "message": str(exc)}
    if isinstance(exc, ParseError):
        err.update(line=exc.line, column=exc.column)
    rep.exact["error"] = err
    return rep.to_dict()


def _emit(report: dict, out: Optional[str]):
    text = json.dumps(report, indent=2, sort_keys=False)
    sys.stdout.write(text + "\n")
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(str(e) + "\n")
        _emit(_error_report(None, {"argv": argv}, "usage", e), None)
        return EXIT_INPUT
    ns = vars(a)
    cli_opts = {k: ns[k] for k in ("seed", "samples", "workers", "epsilon") if k in ns}
    out = ns.get("out")
    inputs = {k: v for k, v in ns.items() if k not in ("command", "out", "config", "timings") and v is not None}
    try:
        opts = dict(DEFAULTS)
        opts.update(load_config(ns.get("config")))
        opts.update(cli_opts)
    except UsageError as e:
        _emit(_error_report(a.command, inputs, "config", e), out)
        return EXIT_INPUT
    rep = Report(a.command, inputs)
    t0 = time.perf_counter()
    try:
        COMMANDS[a.command](a, opts, rep)
    except (UnparametrizableDivisor, IndeterminateResidue, NotAUnitError) as e:
        _emit(_error_report(a.command, inputs, "unsupported", e), out)
        return EXIT_UNSUPPORTED
    except (DomainError, ValueError, ZeroDivisionError, OSError, json.JSONDecodeError) as e:
        _emit(_error_report(a.command, inputs, "input", e), out)
        return EXIT_INPUT
    if ns.get("timings"):
        rep.timings["total_seconds"] = time.perf_counter() - t0
    _emit(rep.to_dict(), out)
    return EXIT_FAILED if rep.verdict == FAILED else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
