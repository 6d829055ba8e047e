"""A small arithmetic language for sequences ``k -> Q`` and matrices ``(n, k) -> Q``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

Builtins: ``e``, ``zero``, ``harmonic``, ``enumerate``, ``geometric(r)``,
``unit(j)``. Builtins are evaluated at the column variable ``k``. Two bare
integer literals joined by ``/`` fold into one rational literal, so ``3/4``
is a literal while ``3/(4)`` is a division.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from gmpy2 import mpq

from .sequence import ONE, ZERO, EvaluationError, Rational, Sequence

__all__ = [
    "DSLSyntaxError", "UnknownBuiltinError", "Num", "Var", "Name", "Call", "Neg",
    "BinOp", "Pow", "parse_expr", "pretty", "compile_expr", "sequence_from_expr",
    "free_variables",
]

CONSTANT_BUILTINS = ("e", "zero", "harmonic", "enumerate")
FUNCTION_BUILTINS = {"geometric": 1, "unit": 1}


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UnknownBuiltinError(DSLSyntaxError):
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("literals are non-negative; use Neg")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"


Node = Union[Num, Var, Name, Call, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|([A-Za-z_]\w*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        dec, integer, ident, sym = m.groups()
        start = m.start(m.lastindex)
        if dec is not None:
            tokens.append(("dec", dec, start))
        elif integer is not None:
            tokens.append(("int", integer, start))
        elif ident is not None:
            tokens.append(("name", ident, start))
        else:
            if sym not in "+-*/^(),":
                raise DSLSyntaxError(f"unexpected character {sym!r}", start, text)
            tokens.append(("sym", sym, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, sym: str):
        kind, value, pos = self.take()
        if kind != "sym" or value != sym:
            raise DSLSyntaxError(f"expected {sym!r}, found {value or 'end of input'!r}", pos, self.text)

    def error(self, message: str):
        raise DSLSyntaxError(message, self.peek()[2], self.text)

    def parse(self) -> Node:
        node, _ = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise DSLSyntaxError(f"unexpected {value!r}", pos, self.text)
        return node

    # each rule returns (node, bare_int) where bare_int marks a lone integer token
    def expr(self):
        node, bare = self.term()
        while self.peek()[0] == "sym" and self.peek()[1] in "+-":
            op = self.take()[1]
            right, _ = self.term()
            node, bare = BinOp(op, node, right), False
        return node, bare

    def term(self):
        node, bare = self.unary()
        while self.peek()[0] == "sym" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            right, right_bare = self.unary()
            if op == "/" and bare and right_bare:
                if right.value == 0:
                    raise DSLSyntaxError("division by zero literal", pos, self.text)
                node = Num(Fraction(node.value, right.value))
            else:
                node = BinOp(op, node, right)
            bare = False
        return node, bare

    def unary(self):
        if self.peek()[0] == "sym" and self.peek()[1] == "-":
            self.take()
            operand, _ = self.unary()
            return Neg(operand), False
        return self.power()

    def power(self):
        base, bare = self.atom()
        if self.peek()[0] == "sym" and self.peek()[1] == "^":
            self.take()
            exponent, _ = self.unary()
            return Pow(base, exponent), False
        return base, bare

    def atom(self):
        kind, value, pos = self.take()
        if kind == "int":
            return Num(Fraction(int(value))), True
        if kind == "dec":
            return Num(Fraction(value)), False
        if kind == "name":
            if value in self.variables:
                return Var(value), False
            if self.peek()[0] == "sym" and self.peek()[1] == "(":
                if value not in FUNCTION_BUILTINS:
                    raise UnknownBuiltinError(f"unknown builtin {value!r}", pos, self.text)
                self.take()
                args = [self.expr()[0]]
                while self.peek()[0] == "sym" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr()[0])
                self.expect(")")
                if len(args) != FUNCTION_BUILTINS[value]:
                    raise DSLSyntaxError(f"{value} takes {FUNCTION_BUILTINS[value]} argument(s)", pos, self.text)
                return Call(value, tuple(args)), False
            if value in CONSTANT_BUILTINS:
                return Name(value), False
            if value in FUNCTION_BUILTINS:
                raise DSLSyntaxError(f"{value} needs an argument list", pos, self.text)
            raise UnknownBuiltinError(f"unknown builtin {value!r}", pos, self.text)
        if kind == "sym" and value == "(":
            node, _ = self.expr()
            self.expect(")")
            return node, False
        raise DSLSyntaxError(f"unexpected {value or 'end of input'!r}", pos, self.text)


def parse_expr(text: str, variables: tuple[str, ...] = ("k",)) -> Node:
    """Parse DSL text into an AST. Raises DSLSyntaxError with a character position."""
    return _Parser(text, variables).parse()


# pretty printing: precedence levels 1 (+ -), 2 (* /), 3 (unary -), 4 (^), 5 (atom)

def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return 1 if node.op in "+-" else 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Num) and node.value.denominator != 1:
        return 2
    return 5


def _wrap(node: Node, needs: bool) -> str:
    text = pretty(node)
    return f"({text})" if needs else text


def _is_int_literal(node: Node) -> bool:
    return isinstance(node, Num) and node.value.denominator == 1


def pretty(node: Node) -> str:
    """Render an AST back to DSL text; ``parse_expr(pretty(t)) == t``."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, (Var, Name)):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({', '.join(pretty(a) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _prec(node.operand) <= 3)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _prec(node.base) <= 4)}^{_wrap(node.exponent, _prec(node.exponent) < 5)}"
    if isinstance(node, BinOp):
        level = 1 if node.op in "+-" else 2
        left = _wrap(node.left, _prec(node.left) < level)
        right_needs = _prec(node.right) <= level
        if node.op == "/" and _is_int_literal(node.left) and _is_int_literal(node.right):
            right_needs = True  # keep "a / (b)" from folding into a literal
        return f"{left} {node.op} {_wrap(node.right, right_needs)}"
    raise TypeError(f"not a DSL node: {node!r}")


def free_variables(node: Node) -> frozenset:
    """Index variables the expression depends on (builtins count as ``k``)."""
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, (Name, Call)):
        return frozenset(["k"])
    if isinstance(node, Num):
        return frozenset()
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Pow):
        return free_variables(node.base) | free_variables(node.exponent)
    return free_variables(node.left) | free_variables(node.right)


# compilation to closures over an environment dict {variable: int}

Env = dict
Fn = Callable[[Env], Rational]


def _power(base: Rational, exponent: Rational) -> Rational:
    if exponent.denominator != 1:
        raise EvaluationError(f"non-integer exponent {exponent}")
    n = int(exponent)
    if n < 0:
        if base == 0:
            raise ZeroDivisionError("zero to a negative power")
        return 1 / base ** (-n)
    return base**n


def _constant_arg(node: Node, label: str) -> Rational:
    if free_variables(node):
        raise EvaluationError(f"argument of {label} must be constant")
    return _compile(node)({})


def _compile(node: Node) -> Fn:
    if isinstance(node, Num):
        value = mpq(node.value)
        return lambda env: value
    if isinstance(node, Var):
        name = node.name
        return lambda env: mpq(env[name])
    if isinstance(node, Name):
        if node.name == "e":
            return lambda env: ONE
        if node.name == "zero":
            return lambda env: ZERO
        if node.name == "harmonic":
            return lambda env: mpq(1, env["k"] + 1)
        if node.name == "enumerate":
            return lambda env: mpq(env["k"] + 1)
    if isinstance(node, Call):
        if node.name == "geometric":
            r = _constant_arg(node.args[0], "geometric")
            return lambda env: _power(r, mpq(env["k"]))
        if node.name == "unit":
            j = _constant_arg(node.args[0], "unit")
            if j.denominator != 1 or j < 0:
                raise EvaluationError("unit(j) needs a non-negative integer j")
            j = int(j)
            return lambda env: ONE if env["k"] == j else ZERO
    if isinstance(node, Neg):
        inner = _compile(node.operand)
        return lambda env: -inner(env)
    if isinstance(node, Pow):
        base, exponent = _compile(node.base), _compile(node.exponent)
        return lambda env: _power(base(env), exponent(env))
    if isinstance(node, BinOp):
        left, right = _compile(node.left), _compile(node.right)
        if node.op == "+":
            return lambda env: left(env) + right(env)
        if node.op == "-":
            return lambda env: left(env) - right(env)
        if node.op == "*":
            return lambda env: left(env) * right(env)
        return lambda env: left(env) / right(env)
    raise TypeError(f"not a DSL node: {node!r}")


def compile_expr(node: Node) -> Fn:
    """Compile an AST to a function of an environment ``{"k": 3}`` or ``{"n": 4, "k": 1}``.

    Constant subexpressions are evaluated once, up front.
    """
    if not free_variables(node):
        try:
            value = _compile(node)({})
        except ZeroDivisionError:
            def fail(env):
                raise ZeroDivisionError("constant expression divides by zero")
            return fail
        return lambda env: value
    return _compile(node)


def sequence_from_expr(text_or_node, *, name: str | None = None) -> Sequence:
    """Build a memoized Sequence from DSL text (or a parsed AST) in the variable ``k``."""
    node = parse_expr(text_or_node) if isinstance(text_or_node, str) else text_or_node
    fn = compile_expr(node)
    return Sequence(lambda k: fn({"k": k}), node, name=name or pretty(node))
