"""A small arithmetic expression language for the CLI.

Grammar (conventional precedence, ``^`` right-associative, unary minus
binds tighter than a ``^`` base):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' factor)?
    base   := number | 'pi' | variable | function '(' expr ')'
              | '(' expr ')' | '-' base

Variables are named x1..xm (x, y, z are accepted as aliases when m <= 3).
Functions: sin, cos, exp, sqrt, abs.  No implicit multiplication.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import InterpolationError


class ExprSyntaxError(ValueError):
    """Parse failure with a character offset into the source text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"at offset {offset}: {message}")
        self.offset = offset
        self.reason = message


class ExprEvalError(InterpolationError):
    """Evaluation failure (division by zero, domain error, overflow)."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Unary:
    op: str  # neg | sin | cos | exp | sqrt | abs
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: object
    right: object


_UNARY_FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")

_TOKEN_RE = re.compile(r"""
    (?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^−()])
""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    length = len(text)
    while pos < length:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if match.lastgroup == "number":
            end = match.end()
            if end < length and (text[end].isalnum() or text[end] == "."):
                raise ExprSyntaxError("malformed number", pos)
            tokens.append(("number", float(match.group()), pos))
        elif match.lastgroup == "ident":
            tokens.append(("ident", match.group(), pos))
        else:
            op = match.group()
            if op == "−":  # unicode minus
                op = "-"
            tokens.append(("op", op, pos))
        pos = match.end()
    tokens.append(("end", "", length))
    return tokens


class _Parser:
    def __init__(self, text: str, m: int):
        self.text = text
        self.m = m
        self.tokens = _tokenize(text)
        self.pos = 0
        self.paren_depth = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def fail(self, message: str, offset=None):
        if offset is None:
            offset = self.peek()[2]
        raise ExprSyntaxError(message, offset)

    def parse(self):
        ast = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            if kind == "op" and value == ")":
                self.fail("unbalanced parentheses")
            self.fail(f"expected operator or end of input, found {value!r}")
        return ast

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = Binary(value, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = Binary(value, node, self.factor())
            else:
                return node

    def factor(self):
        node = self.base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            node = Binary("^", node, self.factor())  # right-associative
        return node

    def base(self):
        kind, value, offset = self.advance()
        if kind == "number":
            return Const(value)
        if kind == "op" and value == "-":
            return Unary("neg", self.base())
        if kind == "op" and value == "(":
            self.paren_depth += 1
            node = self.expr()
            kind, value, offset = self.advance()
            if not (kind == "op" and value == ")"):
                self.fail("unbalanced parentheses", offset)
            self.paren_depth -= 1
            return node
        if kind == "ident":
            return self.identifier(value, offset)
        if kind == "end":
            if self.paren_depth > 0:
                self.fail("unbalanced parentheses", offset)
            self.fail("unexpected end of input", offset)
        self.fail(f"expected a value, found {value!r}", offset)

    def identifier(self, name: str, offset: int):
        if name == "pi":
            return Const(math.pi)
        if name in _UNARY_FUNCTIONS:
            kind, value, off = self.advance()
            if not (kind == "op" and value == "("):
                self.fail(f"expected '(' after function {name!r}", off)
            self.paren_depth += 1
            node = self.expr()
            kind, value, off = self.advance()
            if not (kind == "op" and value == ")"):
                self.fail("unbalanced parentheses", off)
            self.paren_depth -= 1
            return Unary(name, node)
        match = re.fullmatch(r"x(\d+)", name)
        if match:
            index = int(match.group(1))
            if index < 1 or index > self.m:
                self.fail(f"variable index exceeds dimension m={self.m}",
                          offset)
            return Var(index - 1)
        if self.m <= 3 and name in ("x", "y", "z"):
            index = {"x": 1, "y": 2, "z": 3}[name]
            if index > self.m:
                self.fail(f"variable {name!r} needs m >= {index}, m={self.m}",
                          offset)
            return Var(index - 1)
        self.fail(f"unknown identifier {name!r}", offset)


def parse(text: str, m: int):
    """Parse an expression over x1..xm into an AST.

    Raises ``ExprSyntaxError`` (with ``.offset``) on malformed input.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    if m < 1:
        raise ValueError(f"dimension m must be >= 1, got {m}")
    return _Parser(text, m).parse()


def eval_expr(ast, x) -> float:
    """Evaluate an AST at a point; non-finite results raise ExprEvalError."""
    result = _eval(ast, x)
    if not math.isfinite(result):
        raise ExprEvalError(f"expression evaluated to {result}")
    return result


def _eval(ast, x) -> float:
    if isinstance(ast, Const):
        return ast.value
    if isinstance(ast, Var):
        return float(x[ast.index])
    if isinstance(ast, Unary):
        value = _eval(ast.operand, x)
        if ast.op == "neg":
            return -value
        if ast.op == "sin":
            return math.sin(value)
        if ast.op == "cos":
            return math.cos(value)
        if ast.op == "exp":
            try:
                return math.exp(value)
            except OverflowError:
                raise ExprEvalError("exp overflow") from None
        if ast.op == "sqrt":
            if value < 0:
                raise ExprEvalError(f"sqrt of negative value {value}")
            return math.sqrt(value)
        if ast.op == "abs":
            return abs(value)
        raise ValueError(f"unknown unary operator {ast.op!r}")
    if isinstance(ast, Binary):
        left = _eval(ast.left, x)
        right = _eval(ast.right, x)
        if ast.op == "+":
            return left + right
        if ast.op == "-":
            return left - right
        if ast.op == "*":
            return left * right
        if ast.op == "/":
            if right == 0.0:
                raise ExprEvalError("division by zero")
            return left / right
        if ast.op == "^":
            return _power(left, right)
        raise ValueError(f"unknown binary operator {ast.op!r}")
    raise TypeError(f"not an expression node: {ast!r}")


def _power(base: float, exponent: float) -> float:
    # polynomial-friendly: integer exponents >= 0 work for any base,
    # otherwise fall back to the real power for positive bases
    if exponent >= 0 and exponent == int(exponent):
        try:
            return base ** int(exponent)
        except OverflowError:
            raise ExprEvalError("power overflow") from None
    if base > 0:
        return base ** exponent
    raise ExprEvalError(
        f"{base} ^ {exponent}: non-integer exponent needs a positive base")


def to_string(ast) -> str:
    """Render an AST; the output reparses to a structurally equal AST."""
    if isinstance(ast, Const):
        return repr(float(ast.value))
    if isinstance(ast, Var):
        return f"x{ast.index + 1}"
    if isinstance(ast, Unary):
        if ast.op == "neg":
            return f"(-{to_string(ast.operand)})"
        return f"{ast.op}({to_string(ast.operand)})"
    if isinstance(ast, Binary):
        return f"({to_string(ast.left)}{ast.op}{to_string(ast.right)})"
    raise TypeError(f"not an expression node: {ast!r}")


def compile_expr(text: str, m: int):
    """Parse once, return a point -> float callable."""
    ast = parse(text, m)
    return lambda x: eval_expr(ast, x)


def runge_function(m: int):
    """The classic steep rational bump 1 / (1 + 25 ||x||^2) on R^m."""
    def f(x):
        total = 0.0
        for i in range(m):
            total += x[i] * x[i]
        return 1.0 / (1.0 + 25.0 * total)
    return f


def builtin_function(name: str, m: int):
    """Resolve a builtin name: 'runge', 'const:VALUE', or 'coslak'.

    Every builtin is total on [-1, 1]^m.
    """
    parts = name.split(":")
    key = parts[0].strip().lower()
    if key == "runge":
        return runge_function(m)
    if key == "const":
        if len(parts) != 2:
            raise ValueError("builtin const needs a value: 'const:3.5'")
        value = float(parts[1])
        return lambda x: value
    if key == "coslak":
        def f(x):
            total = 1.0
            for i in range(m):
                total *= math.cos(x[i])
            return total
        return f
    raise ValueError(f"unknown builtin {name!r}; expected runge, "
                     f"const:VALUE, or coslak")


def resolve_function(spec: str, m: int):
    """Map a CLI --fn argument to a callable: 'builtin:NAME' or expression."""
    if spec.startswith("builtin:"):
        return builtin_function(spec[len("builtin:"):], m)
    return compile_expr(spec, m)
