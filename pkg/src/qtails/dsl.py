"""Text format for series expressions and identity files (``.qid``).

Grammar::

    file     := decl*
    decl     := "identity" STRING ["source" STRING] ["corrected" STRING]
                ":" expr "==" expr ";"
    expr     := term ("*" term)*
    term     := atom ("^" SIGNED_INT)?
    atom     := "h" "(" INT ")" | "eta" ["(" INT ")"] | "1" | msum | "(" expr ")"
    msum     := "sum" "{" "vars:" IDENT* ";" ["sign:" linform ";"] "exp:" qpoly ";"
                ["num:" linform ("," linform)* ";"] ["den:" linform ("," linform)* ";"] "}"

``linform`` is an integer linear combination of the block's variables plus a
constant; ``qpoly`` is a rational polynomial of degree at most two built from
``+ - * /``, parentheses and ``^``.  ``#`` starts a comment running to the end
of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .multisum import (
    EnumerationStats,
    InvalidSpec,
    LinearForm,
    MultisumSpec,
    QuadraticExponent,
    evaluate,
    validate,
)
from .series import TruncatedSeries, h_series, mul, one, qpoch_infinite_power


class DSLSyntaxError(SyntaxError):
    """Parse failure carrying a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateName(ValueError):
    pass


# -- AST --


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class HFunc:
    b: int

    def __post_init__(self):
        if self.b < 1:
            raise ValueError(f"h(b) needs b >= 1, got {self.b}")


@dataclass(frozen=True)
class EtaPower:
    j: int = 1
    c: int = 1

    def __post_init__(self):
        if self.j < 1:
            raise ValueError(f"eta(j) needs j >= 1, got {self.j}")


@dataclass(frozen=True)
class Multisum:
    spec: MultisumSpec


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("a Product needs at least two factors")


SeriesExpr = Union[One, HFunc, EtaPower, Multisum, Product]


def product(factors) -> SeriesExpr:
    """Product node, collapsing the empty and single-factor cases."""
    factors = tuple(factors)
    if not factors:
        return One()
    if len(factors) == 1:
        return factors[0]
    return Product(factors)


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: SeriesExpr
    rhs: SeriesExpr
    source: str = ""
    corrected: bool = False
    original_text: str = ""


# -- tokenizer --

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|[(){}*^+\-/:;,])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# polynomials during parsing: {monomial (sorted tuple of var indices): Fraction}
_Poly = dict


def _poly_mul(a: _Poly, b: _Poly) -> _Poly:
    out: _Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(sorted(ma + mb))
            out[m] = out.get(m, Fraction(0)) + ca * cb
    return {m: c for m, c in out.items() if c}


def _poly_add(a: _Poly, b: _Poly, sign: int = 1) -> _Poly:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, Fraction(0)) + sign * c
    return {m: c for m, c in out.items() if c}


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, expected: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise DSLSyntaxError(f"expected {expected}, found {tok.describe()}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident", "int") and t.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(repr(text))
        t = self.tok
        self.i += 1
        return t

    def expect_kind(self, kind: str, what: str) -> _Tok:
        if self.tok.kind != kind:
            self.error(what)
        t = self.tok
        self.i += 1
        return t

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.error("end of input")

    # file level

    def identity_file(self) -> list[Identity]:
        out = []
        seen = {}
        while self.tok.kind != "eof":
            start = self.tok
            ident = self.declaration()
            if ident.name in seen:
                raise DuplicateName(
                    f"identity {ident.name!r} declared twice (lines {seen[ident.name]} and {start.line})"
                )
            seen[ident.name] = start.line
            out.append(ident)
        return out

    def string(self) -> str:
        t = self.expect_kind("string", "a quoted string")
        return re.sub(r"\\(.)", r"\1", t.text[1:-1])

    def declaration(self) -> Identity:
        self.expect("identity")
        name = self.string()
        source = ""
        original = None
        if self.at("source"):
            self.i += 1
            source = self.string()
        if self.at("corrected"):
            self.i += 1
            original = self.string()
        self.expect(":")
        lhs = self.expr()
        self.expect("==")
        rhs = self.expr()
        self.expect(";")
        return Identity(
            name, lhs, rhs, source, corrected=original is not None, original_text=original or ""
        )

    # expressions

    def expr(self) -> SeriesExpr:
        factors = [self.term()]
        while self.at("*"):
            self.i += 1
            factors.append(self.term())
        return product(factors)

    def signed_int(self) -> int:
        neg = False
        if self.at("-"):
            neg = True
            self.i += 1
        elif self.at("+"):
            self.i += 1
        t = self.expect_kind("int", "an integer exponent")
        return -int(t.text) if neg else int(t.text)

    def term(self) -> SeriesExpr:
        start = self.tok
        atom = self.atom()
        if not self.at("^"):
            return atom
        self.i += 1
        k = self.signed_int()
        if isinstance(atom, EtaPower):
            return EtaPower(atom.j, atom.c * k)
        if k < 0:
            raise DSLSyntaxError("negative powers are only allowed on eta", start.line, start.col)
        if isinstance(atom, One):
            return atom
        return product([atom] * k)

    def positive_int_arg(self, what: str) -> int:
        self.expect("(")
        t = self.expect_kind("int", f"a positive integer for {what}")
        if int(t.text) < 1:
            raise DSLSyntaxError(f"{what} must be at least 1, got {t.text}", t.line, t.col)
        self.expect(")")
        return int(t.text)

    def atom(self) -> SeriesExpr:
        t = self.tok
        if t.kind == "ident" and t.text == "h":
            self.i += 1
            return HFunc(self.positive_int_arg("h(b)"))
        if t.kind == "ident" and t.text == "eta":
            self.i += 1
            j = self.positive_int_arg("eta(j)") if self.at("(") else 1
            return EtaPower(j, 1)
        if t.kind == "ident" and t.text == "sum":
            self.i += 1
            return Multisum(self.msum())
        if t.kind == "int" and t.text == "1":
            self.i += 1
            return One()
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        self.error("h(b), eta, 1, sum{...} or '('")

    # multisum block

    def section(self, key: str) -> bool:
        if self.at(key) and self.toks[self.i + 1].text == ":":
            self.i += 2
            return True
        return False

    def msum(self) -> MultisumSpec:
        open_tok = self.expect("{")
        if not self.section("vars"):
            self.error("'vars:'")
        names: list[str] = []
        while self.tok.kind == "ident":
            t = self.tok
            if t.text in names:
                raise DSLSyntaxError(f"variable {t.text!r} declared twice", t.line, t.col)
            names.append(t.text)
            self.i += 1
        self.expect(";")
        index = {v: k for k, v in enumerate(names)}
        sign = LinearForm()
        if self.section("sign"):
            sign = self.linform(index)
            self.expect(";")
        if not self.section("exp"):
            self.error("'exp:'")
        exp_tok = self.tok
        poly = self.poly(index)
        self.expect(";")
        if any(len(m) > 2 for m in poly):
            raise DSLSyntaxError("exponent has degree above 2", exp_tok.line, exp_tok.col)
        num: list[LinearForm] = []
        den: list[LinearForm] = []
        if self.section("num"):
            num = self.linlist(index)
        if self.section("den"):
            den = self.linlist(index)
        self.expect("}")
        quad = {m: c for m, c in poly.items() if len(m) == 2}
        lin = {m[0]: c for m, c in poly.items() if len(m) == 1}
        exponent = QuadraticExponent(quad, lin, poly.get((), Fraction(0)))
        try:
            spec = MultisumSpec(len(names), exponent, sign, tuple(num), tuple(den), tuple(names))
            validate(spec)
            return spec
        except InvalidSpec as exc:
            raise DSLSyntaxError(str(exc), open_tok.line, open_tok.col) from None

    def linlist(self, index) -> list[LinearForm]:
        forms = [self.linform(index)]
        while self.at(","):
            self.i += 1
            forms.append(self.linform(index))
        self.expect(";")
        return forms

    def linform(self, index) -> LinearForm:
        t = self.tok
        poly = self.poly(index)
        if any(len(m) > 1 for m in poly):
            raise DSLSyntaxError("expected a linear form", t.line, t.col)
        if any(c.denominator != 1 for c in poly.values()):
            raise DSLSyntaxError("linear form coefficients must be integers", t.line, t.col)
        coeffs = tuple((m[0], int(c)) for m, c in poly.items() if m)
        return LinearForm(coeffs, int(poly.get((), 0)))

    def poly(self, index) -> _Poly:
        acc = self.pterm(index)
        while self.at("+") or self.at("-"):
            sign = 1 if self.tok.text == "+" else -1
            self.i += 1
            acc = _poly_add(acc, self.pterm(index), sign)
        return acc

    def pterm(self, index) -> _Poly:
        acc = self.unary(index)
        while self.at("*") or self.at("/"):
            op = self.tok
            self.i += 1
            rhs = self.unary(index)
            if op.text == "*":
                acc = _poly_mul(acc, rhs)
            else:
                if set(rhs) - {()} or not rhs:
                    raise DSLSyntaxError("division only by a non-zero constant", op.line, op.col)
                c = rhs[()]
                acc = {m: v / c for m, v in acc.items()}
            if any(len(m) > 2 for m in acc):
                raise DSLSyntaxError("term has degree above 2", op.line, op.col)
        return acc

    def unary(self, index) -> _Poly:
        if self.at("-"):
            self.i += 1
            return {m: -c for m, c in self.unary(index).items()}
        if self.at("+"):
            self.i += 1
            return self.unary(index)
        base_tok = self.tok
        base = self.pfactor(index)
        if self.at("^"):
            self.i += 1
            k = int(self.expect_kind("int", "a non-negative integer power").text)
            out: _Poly = {(): Fraction(1)}
            for _ in range(k):
                out = _poly_mul(out, base)
                if any(len(m) > 2 for m in out):
                    raise DSLSyntaxError("power has degree above 2", base_tok.line, base_tok.col)
            return out
        return base

    def pfactor(self, index) -> _Poly:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            v = Fraction(int(t.text))
            return {(): v} if v else {}
        if t.kind == "ident":
            if t.text not in index:
                raise DSLSyntaxError(f"undeclared variable {t.text!r}", t.line, t.col)
            self.i += 1
            return {(index[t.text],): Fraction(1)}
        if self.at("("):
            self.i += 1
            p = self.poly(index)
            self.expect(")")
            return p
        self.error("a number, a variable or '('")


def parse_expression(text: str) -> SeriesExpr:
    p = _Parser(text)
    e = p.expr()
    p.expect_eof()
    return e


def parse_identity_file(text: str) -> list[Identity]:
    return _Parser(text).identity_file()


# -- printing --


def _coef_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _join_terms(terms: list[tuple[Fraction, str]]) -> str:
    """Join (coefficient, monomial) pairs; an empty monomial is a constant."""
    parts = []
    for c, mono in terms:
        mag = abs(c)
        if not mono:
            body = _coef_text(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_coef_text(mag)}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"


def format_linear(form: LinearForm, names) -> str:
    terms = [(Fraction(c), names[i]) for i, c in form.coefficients]
    if form.constant:
        terms.append((Fraction(form.constant), ""))
    return _join_terms(terms)


def format_exponent(e: QuadraticExponent, names) -> str:
    terms = []
    for (i, j), c in e.quad:
        mono = f"{names[i]}^2" if i == j else f"{names[i]}*{names[j]}"
        terms.append((c, mono))
    for i, c in e.linear:
        terms.append((c, names[i]))
    if e.constant:
        terms.append((e.constant, ""))
    return _join_terms(terms)


def format_multisum(s: MultisumSpec) -> str:
    names = s.names
    parts = [f"vars: {' '.join(names)};"]
    if s.sign.coefficients or s.sign.constant:
        parts.append(f"sign: {format_linear(s.sign, names)};")
    parts.append(f"exp: {format_exponent(s.exponent, names)};")
    if s.numerator_pochhammers:
        parts.append("num: " + ", ".join(format_linear(f, names) for f in s.numerator_pochhammers) + ";")
    if s.denominator_pochhammers:
        parts.append("den: " + ", ".join(format_linear(f, names) for f in s.denominator_pochhammers) + ";")
    return "sum{" + " ".join(parts) + "}"


def pretty_print(e: SeriesExpr) -> str:
    if isinstance(e, One):
        return "1"
    if isinstance(e, HFunc):
        return f"h({e.b})"
    if isinstance(e, EtaPower):
        base = "eta" if e.j == 1 else f"eta({e.j})"
        return base if e.c == 1 else f"{base}^{e.c}"
    if isinstance(e, Multisum):
        return format_multisum(e.spec)
    if isinstance(e, Product):
        return " * ".join(
            f"({pretty_print(f)})" if isinstance(f, Product) else pretty_print(f) for f in e.factors
        )
    raise TypeError(f"not a series expression: {e!r}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_identity(ident: Identity) -> str:
    head = f"identity {_quote(ident.name)}"
    if ident.source:
        head += f" source {_quote(ident.source)}"
    if ident.corrected:
        head += f" corrected {_quote(ident.original_text)}"
    return f"{head}:\n    {pretty_print(ident.lhs)}\n    == {pretty_print(ident.rhs)};\n"


def format_identity_file(identities) -> str:
    return "\n".join(format_identity(i) for i in identities)


# -- evaluation --


def eval_expr(
    e: SeriesExpr, order: int, stats: Optional[list[EnumerationStats]] = None
) -> TruncatedSeries:
    """Evaluate ``e`` to ``order``; multisum statistics are appended to ``stats``."""
    if isinstance(e, One):
        return one(order)
    if isinstance(e, HFunc):
        return h_series(e.b, order)
    if isinstance(e, EtaPower):
        return qpoch_infinite_power(e.j, e.c, order)
    if isinstance(e, Multisum):
        series, st = evaluate(e.spec, order)
        if stats is not None:
            stats.append(st)
        return series
    if isinstance(e, Product):
        acc = eval_expr(e.factors[0], order, stats)
        for f in e.factors[1:]:
            acc = mul(acc, eval_expr(f, order, stats))
        return acc
    raise TypeError(f"not a series expression: {e!r}")


def h_factors(e: SeriesExpr) -> list[int]:
    """b-indices of the h factors of a product, in order, with multiplicity."""
    if isinstance(e, HFunc):
        return [e.b]
    if isinstance(e, Product):
        return [b for f in e.factors for b in h_factors(f)]
    return []


def replace_h_factor(e: SeriesExpr, position: int, b: int) -> SeriesExpr:
    """Copy of ``e`` with its ``position``-th h factor (depth-first order) replaced by h(b)."""
    counter = [0]

    def go(node):
        if isinstance(node, HFunc):
            k = counter[0]
            counter[0] += 1
            return HFunc(b) if k == position else node
        if isinstance(node, Product):
            return Product(tuple(go(f) for f in node.factors))
        return node

    out = go(e)
    if position >= counter[0]:
        raise IndexError(f"expression has only {counter[0]} h factors")
    return out
