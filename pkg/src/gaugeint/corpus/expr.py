"""Small expression language for derivative/antiderivative pairs.

Grammar (whitespace-insensitive)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" unary)?                # right associative
    atom     := NUMBER | "x" | "pi" | FUNC "(" expr ")" | "(" expr ")"
              | "piecewise" "(" piece ("," piece)* ")"
    piece    := "x" ("<" | "<=") SIGNED_NUMBER ":" expr | expr   # bare expr: default, last

Evaluation is vectorized over numpy arrays; ``nan`` marks an undefined value
and every non-finite intermediate result is turned into ``nan``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ParseError

MAX_SOURCE_BYTES = 64 * 1024

FUNCTIONS = ("sin", "cos", "sqrt", "ln", "abs", "sign", "exp")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class Piece:
    op: str  # "<" or "<="
    bound: float
    expr: "Expr"


@dataclass(frozen=True)
class Piecewise:
    pieces: tuple
    default: Union["Expr", None] = None


Expr = Union[Num, Var, Neg, BinOp, Call, Piecewise]

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op><=|≤|[-+*/^(),:<])
    )""",
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ParseError(f"unexpected character {text[start]!r}", self._byte(start))
            kind = m.lastgroup
            value = m.group(kind)
            if kind == "op" and value == "≤":
                value = "<="
            self.tokens.append((kind, value, m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def _byte(self, char_pos):
        return len(self.text[:char_pos].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def fail(self, expected):
        kind, value, pos = self.peek()
        what = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {what}", self._byte(pos), expected)

    def take(self, value):
        if self.peek()[1] == value and self.peek()[0] != "end":
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.take(value):
            self.fail({repr(value)})

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.peek()[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.peek()[1]
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.take("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.take("^"):
            return BinOp("^", base, self.unary())
        return base

    def signed_number(self):
        sign = -1.0 if self.take("-") else 1.0
        kind, value, _ = self.peek()
        if kind != "num":
            self.fail({"number"})
        self.i += 1
        return sign * float(value)

    def atom(self):
        kind, value, _ = self.peek()
        if kind == "num":
            self.i += 1
            return Num(float(value))
        if kind == "name":
            self.i += 1
            if value == "x":
                return Var()
            if value == "pi":
                return Num(math.pi)
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value == "piecewise":
                return self.piecewise()
            self.i -= 1
            self.fail({"x", "pi", "number", "(", *FUNCTIONS, "piecewise"})
        if self.take("("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"x", "pi", "number", "(", "-", *FUNCTIONS, "piecewise"})

    def piecewise(self):
        self.expect("(")
        pieces, default = [], None
        while True:
            k0, v0, _ = self.peek()
            k1, v1, _ = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else ("end", "", 0)
            if k0 == "name" and v0 == "x" and v1 in ("<", "<="):
                self.i += 2
                at = self._byte(self.peek()[2])
                bound = self.signed_number()
                if pieces and (bound, v1) < (pieces[-1].bound, pieces[-1].op):
                    raise ParseError("piecewise guards must have nondecreasing bounds", at)
                self.expect(":")
                pieces.append(Piece(v1, bound, self.expr()))
            else:
                default = self.expr()
                self.expect(")")
                break
            if self.take(")"):
                break
            self.expect(",")
        if not pieces:
            self.fail({"x <", "x <="})
        return Piecewise(tuple(pieces), default)


def parse(text: str) -> Expr:
    if len(text.encode("utf-8")) > MAX_SOURCE_BYTES:
        raise ParseError("expression longer than 64 KiB", MAX_SOURCE_BYTES)
    p = _Parser(text)
    node = p.expr()
    if p.peek()[0] != "end":
        p.fail({"+", "-", "*", "/", "^", "end of input"})
    return node


def _clean(v):
    v = np.asarray(v, dtype=float)
    return np.where(np.isfinite(v), v, np.nan)


def _pow(a, b):
    ok = (a > 0) | ((a == 0) & (b > 0)) | ((a < 0) & (b == np.round(b)))
    return np.where(ok, np.power(np.where(ok, a, 1.0), np.where(ok, b, 1.0)), np.nan)


_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": lambda a: np.where(a >= 0, np.sqrt(np.abs(a)), np.nan),
    "ln": lambda a: np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), np.nan),
    "abs": np.abs,
    "sign": np.sign,
    "exp": np.exp,
}


def evaluate_array(e: Expr, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return _eval(e, x)


def _eval(e, x):
    if isinstance(e, Num):
        return np.full(x.shape, e.value)
    if isinstance(e, Var):
        return _clean(x)
    if isinstance(e, Neg):
        return -_eval(e.arg, x)
    if isinstance(e, BinOp):
        a, b = _eval(e.left, x), _eval(e.right, x)
        if e.op == "+":
            return _clean(a + b)
        if e.op == "-":
            return _clean(a - b)
        if e.op == "*":
            return _clean(a * b)
        if e.op == "/":
            return _clean(np.where(b != 0, a / np.where(b != 0, b, 1.0), np.nan))
        return _clean(_pow(a, b))
    if isinstance(e, Call):
        return _clean(_UNARY[e.name](_eval(e.arg, x)))
    if isinstance(e, Piecewise):
        out = np.full(x.shape, np.nan)
        todo = np.ones(x.shape, dtype=bool)
        for piece in e.pieces:
            hit = todo & ((x < piece.bound) if piece.op == "<" else (x <= piece.bound))
            if hit.any():
                out[hit] = _eval(piece.expr, x[hit])
            todo &= ~hit
        if e.default is not None and todo.any():
            out[todo] = _eval(e.default, x[todo])
        return out
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, x: float):
    """Scalar evaluation; ``None`` when the value is undefined."""
    v = float(evaluate_array(e, np.array([float(x)]))[0])
    return None if math.isnan(v) else v


def to_text(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"-({to_text(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Piecewise):
        parts = [f"x {p.op} {p.bound!r}: {to_text(p.expr)}" for p in e.pieces]
        if e.default is not None:
            parts.append(to_text(e.default))
        return f"piecewise({', '.join(parts)})"
    raise TypeError(f"not an expression node: {e!r}")


class ExprFunction:
    """Numpy evaluator wrapping a parsed expression."""

    def __init__(self, source):
        self.expr = parse(source) if isinstance(source, str) else source
        self.source = source if isinstance(source, str) else to_text(source)

    def __call__(self, x):
        return evaluate_array(self.expr, x)

    def __repr__(self):
        return f"ExprFunction({self.source!r})"
