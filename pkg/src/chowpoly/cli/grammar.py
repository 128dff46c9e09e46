"""Text forms for rational functions, wedges, cycles and Li symbols.

Grammar (whitespace is ignored)::

    rational  := sum
    sum       := product (('+' | '-') product)*
    product   := unary (('*' | '/') unary)*
    unary     := '-' unary | power
    power     := primary ('^' exponent)?
    exponent  := '-'? INT | '(' '-'? INT ')'
    primary   := INT | NAME | 'INF' | '(' sum ')'

    wedge     := slots | wterm (('+' | '-') wterm)*
    slots     := rational ('/\\' rational)*
    wterm     := (coeff '*'?)? '<' slots? '>'

    cycle     := cterm (('+' | '-') cterm)*
    cterm     := (coeff '*'?)? '[' '[' names? ']' ',' wedge ']'

    lisymbol  := literm (('+' | '-') literm)*
    literm    := (coeff '*')? INT '{' rational '}'
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from ..exactalg import INF, ZERO, DomainError, FactoredRational, MultiPoly, factor
from ..wedge import WedgeElement, wedge_of


class ParseError(DomainError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.line = line
        self.column = col

    def to_dict(self) -> dict:
        return {"type": "syntax", "message": self.message, "line": self.line, "column": self.column}


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<wedge>/\\)|(?P<op>[-+*/^(){}\[\]<>,=]))"
)


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # -- helpers --------------------------------------------------------------
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str, k: int = 0) -> bool:
        kind, v, _ = self.peek(k)
        return kind in ("op", "wedge") and v == value

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.take()

    def fail(self, message: str, pos: int | None = None):
        kind, v, p = self.peek()
        if pos is None:
            pos = p
            message += f", found {v!r}" if kind != "end" else ", found end of input"
        raise ParseError(message, self.text, pos)

    def done(self):
        if self.peek()[0] != "end":
            self.fail("unexpected trailing input")

    # -- rational expressions -------------------------------------------------
    # values are FactoredRational, ZERO or INF
    def rational(self):
        v = self.product()
        while self.at("+") or self.at("-"):
            _, op, pos = self.take()
            w = self.product()
            v = self._add(v, w, op, pos)
        return v

    def _add(self, v, w, op, pos):
        if v is INF or w is INF:
            self.fail("INF cannot take part in arithmetic", pos)
        if w is ZERO:
            return v
        if op == "-":
            w = -w
        if v is ZERO:
            return w
        r = v.add(w)
        return ZERO if r is None else r

    def product(self):
        v = self.unary()
        while self.at("*") or self.at("/"):
            _, op, pos = self.take()
            w = self.unary()
            if v is INF or w is INF:
                self.fail("INF cannot take part in arithmetic", pos)
            if op == "*":
                v = ZERO if (v is ZERO or w is ZERO) else v * w
            else:
                if w is ZERO:
                    self.fail("zero denominator", pos)
                v = ZERO if v is ZERO else v / w
        return v

    def unary(self):
        if self.at("-"):
            _, _, pos = self.take()
            v = self.unary()
            if v is INF:
                self.fail("INF cannot take part in arithmetic", pos)
            return v if v is ZERO else -v
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.primary()
        if self.at("^"):
            _, _, pos = self.take()
            e = self.exponent()
            if v is INF:
                self.fail("INF cannot take part in arithmetic", pos)
            if v is ZERO:
                if e < 0:
                    self.fail("zero denominator", pos)
                return FactoredRational.const(1) if e == 0 else ZERO
            v = v ** e
        return v

    def exponent(self) -> int:
        paren = self.at("(")
        if paren:
            self.take()
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        kind, v, _ = self.peek()
        if kind != "num":
            self.fail("expected an integer exponent")
        self.take()
        if paren:
            self.expect(")")
        return sign * int(v)

    def primary(self):
        kind, v, pos = self.peek()
        if kind == "num":
            self.take()
            n = int(v)
            return FactoredRational.const(n) if n else ZERO
        if kind == "name":
            self.take()
            if v == "INF":
                return INF
            if not _NAME_RE.match(v):
                self.fail(f"invalid variable name {v!r}", pos)
            return factor(MultiPoly.var(v))
        if self.at("("):
            self.take()
            r = self.rational()
            self.expect(")")
            return r
        self.fail("expected a number, variable or '('")

    # -- coefficients ---------------------------------------------------------
    def coeff(self) -> Fraction:
        """Optional rational coefficient INT ('/' INT)? followed by optional '*'."""
        kind, v, _ = self.peek()
        if kind != "num":
            return Fraction(1)
        c = Fraction(int(v))
        self.take()
        if self.at("/") and self.peek(1)[0] == "num":
            self.take()
            _, d, pos = self.take()
            if int(d) == 0:
                self.fail("zero denominator", pos)
            c /= int(d)
        if self.at("*"):
            self.take()
        return c

    def signed_terms(self, term):
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        elif self.at("+"):
            self.take()
        out = [term(sign)]
        while self.at("+") or self.at("-"):
            _, op, _ = self.take()
            out.append(term(1 if op == "+" else -1))
        return out

    # -- wedges ---------------------------------------------------------------
    def slots(self) -> List[FactoredRational]:
        out = [self.slot()]
        while self.at("/\\"):
            self.take()
            out.append(self.slot())
        return out

    def slot(self) -> FactoredRational:
        pos = self.peek()[2]
        v = self.rational()
        if v is ZERO:
            self.fail("a wedge slot is zero", pos)
        if v is INF:
            self.fail("a wedge slot is INF", pos)
        return v

    def _is_bracket_wedge(self) -> bool:
        k = 0
        if self.at("-") or self.at("+"):
            k = 1
        if self.peek(k)[0] == "num":
            k += 1
            if self.at("/", k) and self.peek(k + 1)[0] == "num":
                k += 2
            if self.at("*", k):
                k += 1
        return self.at("<", k)

    def wedge(self) -> WedgeElement:
        if not self._is_bracket_wedge():
            kind, v, _ = self.peek()
            if kind == "num" and int(v) == 0 and (self.peek(1)[0] == "end" or self.at("]", 1)):
                self.take()
                return WedgeElement.zero(0)
            return wedge_of(self.slots())
        terms = self.signed_terms(self._wterm)
        arities = {w.arity for w in terms}
        if len(arities) > 1:
            self.fail("wedge terms of different arity")
        out = terms[0]
        for w in terms[1:]:
            out = out + w
        return out

    def _wterm(self, sign: int) -> WedgeElement:
        c = self.coeff() * sign
        self.expect("<")
        if self.at(">"):
            self.take()
            return WedgeElement.scalar(c)
        w = wedge_of(self.slots())
        self.expect(">")
        return w.scale(c)

    # -- cycles ---------------------------------------------------------------
    def cycle_terms(self):
        return self.signed_terms(self._cterm)

    def _cterm(self, sign: int):
        c = self.coeff() * sign
        self.expect("[")
        self.expect("[")
        names: List[str] = []
        while not self.at("]"):
            kind, v, pos = self.take()
            if kind != "name" or not _NAME_RE.match(v):
                self.fail("expected a coordinate name", pos)
            if v in names:
                self.fail(f"repeated coordinate {v}", pos)
            names.append(v)
            if not self.at("]"):
                self.expect(",")
        self.expect("]")
        self.expect(",")
        w = self.wedge()
        self.expect("]")
        # other names in the wedge are parameters of the base field
        return c, tuple(names), w

    # -- Li symbols -----------------------------------------------------------
    def li_terms(self):
        return self.signed_terms(self._literm)

    def _literm(self, sign: int):
        # either  c*m{...}  or  m{...}
        kind, v, pos = self.peek()
        if kind != "num":
            self.fail("expected a weight")
        c = Fraction(sign)
        if not self.at("{", 1):
            c *= self.coeff()
            kind, v, pos = self.peek()
            if kind != "num" or not self.at("{", 1):
                self.fail("expected weight{point}")
        self.take()
        m = int(v)
        if m < 1:
            self.fail("weight must be positive", pos)
        self.expect("{")
        h = self.rational()
        self.expect("}")
        return c, m, h


# ---------------------------------------------------------------------------
# public parse functions


def parse_rational(text: str):
    """FactoredRational, or the markers ZERO / INF."""
    p = _Parser(text)
    v = p.rational()
    p.done()
    return v


def parse_factored(text: str) -> FactoredRational:
    v = parse_rational(text)
    if v is ZERO or v is INF:
        raise ParseError("expected a nonzero finite rational function", text, 0)
    return v


def parse_wedge(text: str) -> WedgeElement:
    p = _Parser(text)
    w = p.wedge()
    p.done()
    return w


def parse_cycle_sum(text: str, weight: int | None = None, degree: int | None = None):
    """Cycle sum; the bare text ``0`` needs the weight and degree from the caller."""
    from ..chowcomplex import CycleSum

    if text.strip() == "0":
        if weight is None or degree is None:
            raise ParseError("the zero cycle sum needs a known weight and degree", text, 0)
        return CycleSum.zero(weight, degree)
    p = _Parser(text)
    terms = p.cycle_terms()
    p.done()
    shapes = {(len(vs), w.arity) for _, vs, w in terms if not w.is_zero()}
    if len(shapes) > 1:
        raise ParseError("cycle terms have different dimension or arity", text, 0)
    if shapes:
        (pdim, n), = shapes
    else:
        pdim, n = len(terms[0][1]), terms[0][2].arity
    return CycleSum.from_parts(n - pdim, n - 2 * pdim, [(c, vs, w) for c, vs, w in terms])


def parse_cycle(text: str):
    from ..chowcomplex import Cycle

    p = _Parser(text)
    terms = p.cycle_terms()
    p.done()
    if len(terms) != 1 or terms[0][0] != 1:
        raise ParseError("expected a single cycle [[vars], wedge]", text, 0)
    _, vs, w = terms[0]
    return Cycle(vs, w)


def parse_lisymbol(text: str, weight: int | None = None):
    from ..bloch import LiSymbol

    if text.strip() == "0":
        if weight is None:
            raise ParseError("the zero Li symbol needs a known weight", text, 0)
        return LiSymbol(weight)
    p = _Parser(text)
    terms = p.li_terms()
    p.done()
    weights = {m for _, m, _ in terms}
    if len(weights) != 1:
        raise ParseError("Li symbol terms of different weight", text, 0)
    (m,) = weights
    out = LiSymbol(m)
    for c, _, h in terms:
        out = out + LiSymbol.gen(m, h, c)
    return out


def parse_expression(text: str):
    """Dispatch on the outer shape: cycle, Li symbol, wedge or rational."""
    s = text.strip()
    if re.match(r"^[-+]?\s*(\d+(\s*/\s*\d+)?\s*\*?\s*)?\[", s):
        return parse_cycle_sum(text)
    if re.search(r"\d\s*\{", s):
        return parse_lisymbol(text)
    if "/\\" in s or "<" in s:
        return parse_wedge(text)
    return parse_rational(text)


def parse_point(text: str):
    """A point of P^1 over Q or Q(t): rational expression, 0 or INF."""
    return parse_rational(text)


_IMAG_JUXT = re.compile(r"(\d)\s*i\b")


def parse_complex(text: str) -> complex:
    """Complex number written with the imaginary unit i, e.g. ``1+i``, ``2i`` or ``-1/2+3*i``."""
    # allow juxtaposition such as 2i or 3/2i
    v = parse_rational(_IMAG_JUXT.sub(r"\1*i", text))
    if v is INF:
        raise ParseError("INF is not a complex number", text, 0)
    if v is ZERO:
        return 0j
    stray = [x for x in v.variables if x != "i"]
    if stray:
        raise ParseError(f"unexpected names {stray} in a complex number", text, 0)
    return v.evaluate({"i": 1j})


def parse_complex_list(text: str) -> List[complex]:
    return [parse_complex(part) for part in _split_top(text, ",")]


def _split_top(text: str, sep: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (s.strip() for s in parts) if p]


# ---------------------------------------------------------------------------
# formatting


def format_coeff(c: Fraction) -> str:
    return str(Fraction(c))


def format_factored(f) -> str:
    if f is INF:
        return "INF"
    if f is ZERO:
        return "0"
    parts = []
    if f.constant != 1 or not f.factors:
        c = f.constant
        parts.append(str(c) if c.denominator == 1 and c > 0 else f"({c})")
    for a, e in f.factors:
        s = _format_atom(a)
        if e != 1:
            s += f"^{e}" if e > 0 else f"^({e})"
        parts.append(s)
    return "*".join(parts)


def _format_atom(a) -> str:
    text = str(a.payload)
    if a.kind == "prime" or _NAME_RE.match(text):
        return text
    return f"({text})"


def _join_signed(pieces: Sequence[Tuple[Fraction, str]]) -> str:
    out = []
    for i, (c, body) in enumerate(pieces):
        a = abs(c)
        text = body if a == 1 else f"{a}*{body}"
        if i == 0:
            out.append(("-" if c < 0 else "") + text)
        else:
            out.append((" - " if c < 0 else " + ") + text)
    return "".join(out)


def format_monomial(mono) -> str:
    return "<" + "/\\".join(_format_atom(a) for a in mono) + ">"


def format_wedge(w: WedgeElement) -> str:
    if w.is_zero():
        return "0"
    return _join_signed([(c, format_monomial(m)) for m, c in w.items()])


def format_cycle(vs: Sequence[str], w: WedgeElement) -> str:
    return f"[[{','.join(vs)}], {format_wedge(w)}]"


def format_cycle_sum(s) -> str:
    groups = s.by_variety()
    if not groups:
        return "0"
    return " + ".join(format_cycle(vs, w) for vs, w in groups)


def format_point(h) -> str:
    return format_factored(h)


def format_lisymbol(s) -> str:
    if s.is_zero():
        return "0"
    return _join_signed([(c, f"{s.weight}{{{format_point(h)}}}") for h, c in s.items()])


def format_valuation(v) -> str:
    return v.label
