"""Tiny expression language for surface functions given in config files.

Grammar (usual precedence, ^ binds tightest and is right-associative):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'x' | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'

Expressions evaluate on scalars or numpy arrays and can be differentiated
symbolically, which is what the contact solvers need for exact surface
slopes.  Nodes are plain tuples; the public surface is ``parse_expression``
and the ``Expression`` wrapper.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = ["Expression", "ParseError", "parse_expression"]

_FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    """Raised on malformed expression text; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group("num")), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        self.advance()

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r} after expression", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                node = ("add" if val == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.factor()
                node = ("mul" if val == "*" else "div", node, rhs)
            else:
                return node

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return ("neg", self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            # right-associative: exponent may itself contain a power
            return ("pow", base, self.factor())
        return base

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if val == "x":
                return ("var",)
            if val in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return ("call", val, arg)
            raise ParseError(f"unknown name {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a number, 'x', or '('", pos)


def _evaluate(node, x):
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return x
    if op == "neg":
        return -_evaluate(node[1], x)
    if op == "add":
        return _evaluate(node[1], x) + _evaluate(node[2], x)
    if op == "sub":
        return _evaluate(node[1], x) - _evaluate(node[2], x)
    if op == "mul":
        return _evaluate(node[1], x) * _evaluate(node[2], x)
    if op == "div":
        return _evaluate(node[1], x) / _evaluate(node[2], x)
    if op == "pow":
        return _evaluate(node[1], x) ** _evaluate(node[2], x)
    if op == "call":
        return _FUNCTIONS[node[1]](_evaluate(node[2], x))
    raise AssertionError(f"unhandled node {op!r}")


def _differentiate(node):
    op = node[0]
    if op == "num":
        return ("num", 0.0)
    if op == "var":
        return ("num", 1.0)
    if op == "neg":
        return ("neg", _differentiate(node[1]))
    if op == "add":
        return ("add", _differentiate(node[1]), _differentiate(node[2]))
    if op == "sub":
        return ("sub", _differentiate(node[1]), _differentiate(node[2]))
    if op == "mul":
        u, v = node[1], node[2]
        return ("add", ("mul", _differentiate(u), v), ("mul", u, _differentiate(v)))
    if op == "div":
        u, v = node[1], node[2]
        num = ("sub", ("mul", _differentiate(u), v), ("mul", u, _differentiate(v)))
        return ("div", num, ("mul", v, v))
    if op == "pow":
        base, exponent = node[1], node[2]
        if exponent[0] == "num":
            k = exponent[1]
            inner = ("mul", ("num", k), ("pow", base, ("num", k - 1.0)))
            return ("mul", inner, _differentiate(base))
        if base[0] == "num":
            if base[1] <= 0.0:
                raise ValueError("cannot differentiate c^f(x) with c <= 0")
            scaled = ("mul", ("num", math.log(base[1])), node)
            return ("mul", scaled, _differentiate(exponent))
        raise ValueError("cannot differentiate f(x)^g(x) with both parts varying")
    if op == "call":
        name, arg = node[1], node[2]
        darg = _differentiate(arg)
        if name == "sin":
            return ("mul", ("call", "cos", arg), darg)
        if name == "cos":
            return ("neg", ("mul", ("call", "sin", arg), darg))
        if name == "exp":
            return ("mul", node, darg)
    raise AssertionError(f"unhandled node {op!r}")


def _simplify(node):
    op = node[0]
    if op in ("num", "var"):
        return node
    if op == "neg":
        inner = _simplify(node[1])
        if inner[0] == "num":
            return ("num", -inner[1])
        return ("neg", inner)
    if op == "call":
        return ("call", node[1], _simplify(node[2]))
    left = _simplify(node[1])
    right = _simplify(node[2])
    if left[0] == "num" and right[0] == "num":
        try:
            return ("num", _evaluate((op, left, right), 0.0))
        except (ZeroDivisionError, OverflowError):
            return (op, left, right)
    if op == "add":
        if left == ("num", 0.0):
            return right
        if right == ("num", 0.0):
            return left
    if op == "sub" and right == ("num", 0.0):
        return left
    if op == "mul":
        if left == ("num", 0.0) or right == ("num", 0.0):
            return ("num", 0.0)
        if left == ("num", 1.0):
            return right
        if right == ("num", 1.0):
            return left
    if op == "div" and right == ("num", 1.0):
        return left
    if op == "pow":
        if right == ("num", 1.0):
            return left
        if right == ("num", 0.0):
            return ("num", 1.0)
    return (op, left, right)


def _render(node) -> str:
    op = node[0]
    if op == "num":
        return repr(node[1])
    if op == "var":
        return "x"
    if op == "neg":
        return f"-({_render(node[1])})"
    if op == "call":
        return f"{node[1]}({_render(node[2])})"
    sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[op]
    return f"({_render(node[1])} {sym} {_render(node[2])})"


@dataclass(frozen=True)
class Expression:
    """Parsed expression; callable on floats and numpy arrays."""

    root: tuple
    text: str

    def __call__(self, x):
        # non-finite results are legal here; config validation screens them
        with np.errstate(all="ignore"):
            out = _evaluate(self.root, np.asarray(x, dtype=float) + 0.0)
        if np.ndim(x) == 0:
            return float(out)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy()

    def derivative(self) -> "Expression":
        root = _simplify(_differentiate(self.root))
        return Expression(root=root, text=_render(root))

    def __str__(self) -> str:
        return self.text


def parse_expression(text: str) -> Expression:
    """Parse expression text; raises ParseError with a character position."""
    if not text.strip():
        raise ParseError("empty expression", 0)
    root = _parse_root(text)
    return Expression(root=root, text=text.strip())


def _parse_root(text: str):
    return _Parser(text).parse()
