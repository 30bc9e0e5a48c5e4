"""Expression language for frame coefficients, metric entries and constants.

Grammar (whitespace-insensitive, LL(1))::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?          # right-associative, integer exponent
    atom   := NUMBER | RATIONAL | NAME | FUNC '(' expr ')' | '(' expr ')'

``RATIONAL`` is ``<digits>/<digits>`` written without spaces; ``3 / 2`` is a
division of two integers instead (same value, different tree).  Implicit
multiplication (``2x``) is rejected.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from . import jet as _jet
from .errors import (
    ExprSyntaxError,
    NonIntegerExponent,
    PointOutsideDomain,
    TranscendentalInRationalMode,
    UnknownIdentifier,
)
from .jet import Jet

FUNCTIONS = ("exp", "ln", "sin", "cos", "sqrt")


# -- AST -------------------------------------------------------------------------
@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> Fraction:
        return Fraction(self.text)


@dataclass(frozen=True)
class Rat:
    num: int
    den: int


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Rat, Var, Neg, Add, Sub, Mul, Div, Pow, Call]

_BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/"}
_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


@dataclass(frozen=True)
class Constraint:
    """Strict inequality ``left op right`` with op in ``>``, ``<``, ``!=``."""

    left: Expr
    op: str
    right: Expr

    def holds(self, point) -> bool:
        a, b = eval_value(self.left, point), eval_value(self.right, point)
        return {">": a > b, "<": a < b, "!=": a != b}[self.op]

    def __str__(self):
        return f"{to_text(self.left)} {self.op} {to_text(self.right)}"


@dataclass(frozen=True)
class Chart:
    coord_names: tuple[str, ...]
    domain_constraints: tuple[Constraint, ...] = field(default=())

    def __post_init__(self):
        if len(set(self.coord_names)) != len(self.coord_names):
            raise ValueError(f"coordinate names are not distinct: {self.coord_names}")
        if not self.coord_names:
            raise ValueError("a chart needs at least one coordinate")

    @property
    def dim(self) -> int:
        return len(self.coord_names)

    def contains(self, point) -> bool:
        return all(c.holds(point) for c in self.domain_constraints)

    def check_point(self, point):
        if len(point) != self.dim:
            raise PointOutsideDomain(f"point {tuple(point)} has {len(point)} coordinates, chart has {self.dim}")
        for c in self.domain_constraints:
            if not c.holds(point):
                raise PointOutsideDomain(f"point {tuple(point)} violates domain constraint '{c}'")


# -- tokenizer -------------------------------------------------------------------
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<rat>\d+/\d+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>!=|[-+*/^()<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int  # byte offset into the UTF-8 encoding of the source


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        byte = len(text[:pos].encode("utf-8"))
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", byte)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), byte))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.encode("utf-8"))))
    return toks


# -- parser ----------------------------------------------------------------------
class _Parser:
    def __init__(self, text: str, coord_names):
        self.toks = _tokenize(text)
        self.i = 0
        self.coords = {name: k for k, name in enumerate(coord_names)}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.tok.offset)

    def finish(self):
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.tok.text!r}", self.tok.offset)

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.accept("*"):
                node = Mul(node, self.unary())
            elif self.accept("/"):
                node = Div(node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            offset = self.take().offset
            exponent = self.unary()
            value = constant_value(exponent)
            if value is None or value.denominator != 1:
                raise NonIntegerExponent("exponent must be an integer constant", offset)
            return Pow(base, int(value))
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "rat":
            self.take()
            p, q = (int(s) for s in t.text.split("/"))
            if q == 0:
                raise ExprSyntaxError("zero denominator in rational literal", t.offset)
            return Rat(p, q)
        if t.kind == "num":
            self.take()
            return Num(t.text)
        if t.kind == "name":
            self.take()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if t.text not in self.coords:
                raise UnknownIdentifier(f"unknown identifier {t.text!r}", t.offset)
            if self.tok.kind in ("name", "num", "rat") or (self.tok.kind == "op" and self.tok.text == "("):
                raise ExprSyntaxError("implicit multiplication is not supported", self.tok.offset)
            return Var(t.text, self.coords[t.text])
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise ExprSyntaxError(f"expected a value, found {found!r}", t.offset)


def parse(text: str, chart: Chart | tuple[str, ...] | None = None) -> Expr:
    """Parse ``text`` into an AST; coordinate names come from ``chart``."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    names = _names(chart)
    p = _Parser(text, names)
    node = p.expr()
    if p.tok.kind in ("num", "rat", "name"):
        raise ExprSyntaxError("implicit multiplication is not supported", p.tok.offset)
    p.finish()
    return node


def parse_constraint(text: str, chart: Chart | tuple[str, ...]) -> Constraint:
    p = _Parser(text, _names(chart))
    left = p.expr()
    op = p.tok
    if not (op.kind == "op" and op.text in (">", "<", "!=")):
        raise ExprSyntaxError("expected one of '>', '<', '!='", op.offset)
    p.take()
    right = p.expr()
    p.finish()
    return Constraint(left, op.text, right)


def _names(chart) -> tuple[str, ...]:
    if chart is None:
        return ()
    if isinstance(chart, Chart):
        return chart.coord_names
    return tuple(chart)


def constant_value(e: Expr) -> Fraction | None:
    """Exact value of a coordinate-free, polynomial-rational expression, else None."""
    try:
        v = eval_value(e, (), exact=True)
    except (IndexError, TranscendentalInRationalMode, ZeroDivisionError):
        return None
    return v


# -- printing --------------------------------------------------------------------
def to_text(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_text(e))`` rebuilds an equal tree."""
    return _show(e, 0)


def _show(e: Expr, ctx: int) -> str:
    if isinstance(e, Num):
        return e.text
    if isinstance(e, Rat):
        return f"{e.num}/{e.den}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({_show(e.arg, 0)})"
    if isinstance(e, Neg):
        s = "-" + _show(e.arg, 3)
        return f"({s})" if ctx > 3 else s
    if isinstance(e, Pow):
        s = f"{_show(e.base, 5)}^{e.exponent}" if e.exponent >= 0 else f"{_show(e.base, 5)}^({e.exponent})"
        return f"({s})" if ctx > 4 else s
    prec = _PREC[type(e)]
    # left-associative: the right operand needs parens at equal precedence
    s = f"{_show(e.left, prec)} {_BINARY[type(e)]} {_show(e.right, prec + 1)}"
    return f"({s})" if ctx > prec else s


# -- evaluation ------------------------------------------------------------------
def eval_value(e: Expr, point, exact: bool = False):
    """Plain scalar evaluation (no derivatives)."""
    if isinstance(e, Num):
        return e.value if exact else float(e.value)
    if isinstance(e, Rat):
        return Fraction(e.num, e.den) if exact else e.num / e.den
    if isinstance(e, Var):
        return point[e.index]
    if isinstance(e, Neg):
        return -eval_value(e.arg, point, exact)
    if isinstance(e, Pow):
        b = eval_value(e.base, point, exact)
        return b**e.exponent if e.exponent >= 0 else 1 / b ** (-e.exponent)
    if isinstance(e, Call):
        if exact:
            raise TranscendentalInRationalMode(f"{e.func}() cannot be evaluated exactly")
        fn = {"exp": math.exp, "ln": math.log, "sin": math.sin, "cos": math.cos, "sqrt": math.sqrt}[e.func]
        return fn(eval_value(e.arg, point, exact))
    a, b = eval_value(e.left, point, exact), eval_value(e.right, point, exact)
    if isinstance(e, Add):
        return a + b
    if isinstance(e, Sub):
        return a - b
    if isinstance(e, Mul):
        return a * b
    return a / b


def is_transcendental(e: Expr) -> bool:
    if isinstance(e, Call):
        return True
    if isinstance(e, (Neg,)):
        return is_transcendental(e.arg)
    if isinstance(e, Pow):
        return is_transcendental(e.base)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return is_transcendental(e.left) or is_transcendental(e.right)
    return False


def eval_jet(e: Expr, point, degree: int = 4, chart: Chart | None = None, exact: bool = False) -> Jet:
    """Evaluate ``e`` to a jet at ``point``; checks ``chart`` domain constraints if given.

    In exact mode the point is converted to fractions and transcendental calls
    raise :class:`TranscendentalInRationalMode`.
    """
    if chart is not None:
        chart.check_point(point)
    if exact:
        point = tuple(Fraction(x) for x in point)
    else:
        point = tuple(float(x) for x in point)
    return _ev(e, point, len(point), degree, exact)


def _ev(e: Expr, p, n: int, degree: int, exact: bool) -> Jet:
    if isinstance(e, Num):
        return Jet.const(e.value if exact else float(e.value), n, degree, exact)
    if isinstance(e, Rat):
        return Jet.const(Fraction(e.num, e.den) if exact else e.num / e.den, n, degree, exact)
    if isinstance(e, Var):
        return _jet.jet_var(e.index, p, n, degree, exact)
    if isinstance(e, Neg):
        return -_ev(e.arg, p, n, degree, exact)
    if isinstance(e, Pow):
        return _ev(e.base, p, n, degree, exact) ** e.exponent
    if isinstance(e, Call):
        if exact:
            raise TranscendentalInRationalMode(
                f"{e.func}() has no exact value; use float mode for transcendental expressions"
            )
        return _jet.ELEMENTARY[e.func](_ev(e.arg, p, n, degree, exact))
    a, b = _ev(e.left, p, n, degree, exact), _ev(e.right, p, n, degree, exact)
    if isinstance(e, Add):
        return a + b
    if isinstance(e, Sub):
        return a - b
    if isinstance(e, Mul):
        return a * b
    return a / b
