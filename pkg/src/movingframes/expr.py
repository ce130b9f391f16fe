"""
Expression language for parametric curves and surfaces.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``* /``, which bind tighter than ``+ -``; ``^`` is right associative and its
exponent must be a constant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'

Evaluation goes through :mod:`movingframes.jets`, so every derivative up to
the jet order is exact up to rounding.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DomainError, ExprSyntaxError
from .jets import Jet

FUNCTIONS = {
    "sin": jets.sin,
    "cos": jets.cos,
    "tan": jets.tan,
    "exp": jets.exp,
    "log": jets.log,
    "sqrt": jets.sqrt,
    "abs": jets.absolute,
}

CONSTANTS = {"pi": math.pi}


# -- AST ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(float(self.value)) if self.value >= 0 else f"({float(self.value)!r})"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    arg: object

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True)
class Call:
    func: str
    arg: object

    def __str__(self):
        return f"{self.func}({self.arg})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float

    def __str__(self):
        return f"({self.base})^({float(self.exponent)!r})"


def Add(a, b):
    return BinOp("+", a, b)


def Sub(a, b):
    return BinOp("-", a, b)


def Mul(a, b):
    return BinOp("*", a, b)


def Div(a, b):
    return BinOp("/", a, b)


def to_source(node):
    """Fully parenthesized source text; ``parse(to_source(ast)) == ast``."""
    return str(node)


def variables_of(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables_of(node.arg)
    if isinstance(node, Pow):
        return variables_of(node.base)
    return variables_of(node.left) | variables_of(node.right)


# -- tokenizer / parser ------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(source):
    toks = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            off = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {source[off]!r}", source, _byte(source, off))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(source)))
    return toks


def _byte(source, char_offset):
    return len(source[:char_offset].encode("utf-8"))


class _Parser:
    def __init__(self, source, variables):
        self.source = source
        self.variables = tuple(variables)
        self.toks = _tokenize(source)
        self.i = 0

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(msg, self.source, _byte(self.source, tok.offset))

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.peek()
        if tok.text != text or tok.kind == "end":
            raise self.error(f"expected {text!r}")
        return self.take()

    def parse(self):
        if self.peek().kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected token {self.peek().text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.take()
            return Neg(self.unary())
        if tok.kind == "op" and tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            start = self.peek()
            exponent = self.unary()
            if variables_of(exponent):
                raise self.error("exponent must be a constant", start)
            value = float(evaluate(exponent, {}))
            return Pow(base, value)
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.take()
            name = tok.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name in self.variables:
                return Var(name)
            if name in CONSTANTS:
                return Num(CONSTANTS[name])
            raise self.error(f"unknown identifier {name!r}", tok)
        if tok.kind == "op" and tok.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            raise self.error("missing operand")
        raise self.error(f"expected operand, found {tok.text!r}")


def parse(source, variables=("t",)):
    """Parse ``source`` into an AST over the declared ``variables``.

    Raises:
        ExprSyntaxError: with the byte offset of the offending token.
    """
    if isinstance(variables, str):
        variables = (variables,)
    return _Parser(source, variables).parse()


# -- evaluation ----------------------------------------------------------------------


def _jet_eval(node, env, order):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_jet_eval(node.arg, env, order)
    if isinstance(node, Call):
        arg = _jet_eval(node.arg, env, order)
        if not isinstance(arg, Jet):
            arg = Jet.constant(arg, order)
        return FUNCTIONS[node.func](arg)
    if isinstance(node, Pow):
        base = _jet_eval(node.base, env, order)
        if not isinstance(base, Jet):
            base = Jet.constant(base, order)
        return jets.power(base, node.exponent)
    left = _jet_eval(node.left, env, order)
    right = _jet_eval(node.right, env, order)
    if not isinstance(left, Jet) and not isinstance(right, Jet):
        left = Jet.constant(left, order)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if not isinstance(right, Jet):
        if np.any(np.asarray(right) == 0):
            raise DomainError("division by zero")
    return left / right


def _finish(result, order, shape):
    if not isinstance(result, Jet):
        result = Jet.constant(np.broadcast_to(result, shape), order)
    if result.coef.shape[1:] != shape:
        result = Jet(result.t0, np.broadcast_to(result.coef, (result.coef.shape[0],) + shape).copy())
    return result


def eval_jet(ast, at, order, frozen=None):
    """Jet of ``ast`` with respect to one active variable.

    Args:
        ast: parsed expression.
        at: ``{name: t0}`` for the active variable; ``t0`` may be an array,
            giving a batch of jets.
        order: highest derivative order (at most 8).
        frozen: values of the remaining variables.

    Returns:
        Jet whose ``d[k]`` is the k-th partial derivative at the base point.
    """
    if len(at) != 1:
        raise ValueError("exactly one active variable is required")
    (name, t0), = at.items()
    direction = {name: 1.0}
    point = dict(frozen or {})
    point[name] = t0
    out = eval_directional(ast, point, direction, order)
    out.t0 = t0
    return out


def eval_directional(ast, point, direction, order):
    """Jet of ``h -> f(point + h * direction)`` at ``h = 0``."""
    if order > jets.MAX_ORDER:
        raise ValueError(f"order {order} exceeds {jets.MAX_ORDER}")
    missing = variables_of(ast) - set(point)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    shape = np.broadcast_shapes(*(np.shape(v) for v in point.values())) if point else ()
    env = {}
    for name, value in point.items():
        slope = direction.get(name, 0.0)
        val = np.broadcast_to(np.asarray(value, dtype=float), shape)
        env[name] = Jet.variable(val, order, slope) if slope else Jet.constant(val, order)
    return _finish(_jet_eval(ast, env, order), order, shape)


def evaluate(ast, point):
    """Plain value of ``ast`` at ``point`` (arrays broadcast)."""
    shape = np.broadcast_shapes(*(np.shape(v) for v in point.values())) if point else ()
    env = {k: Jet.constant(np.broadcast_to(np.asarray(v, dtype=float), shape), 0)
           for k, v in point.items()}
    return _finish(_jet_eval(ast, env, 0), 0, shape).coef[0]
