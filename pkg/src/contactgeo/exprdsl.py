"""Scalar expression DSL with exact forward-mode derivatives.

Expressions are parsed from text into immutable ASTs and evaluated with
plain floats, first-order dual numbers (gradients) or hyper-dual numbers
(Hessians).  All geometric data in this package -- metric entries,
structure tensors, immersion components -- is expressed through this
module, so derivatives of geometry are exact to machine precision.

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := ["-"] atom ["^" factor]
    atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"

"^" is right-associative and binds tighter than unary minus.  "pi" is a
built-in constant.  Powers require a positive base unless the exponent is
a constant integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "Expr",
    "ExprError",
    "SyntaxError_",
    "DomainError",
    "parse",
    "evaluate",
    "gradient",
    "hessian",
]


class ExprError(ValueError):
    """Base class for DSL errors."""


class SyntaxError_(ExprError):
    """Parse-time error, carries the source position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class DomainError(ExprError):
    """Evaluation hit a point outside an operation's domain."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (expression position {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# dual / hyper-dual scalars
# ---------------------------------------------------------------------------


class Dual:
    """First-order dual number a + b*eps with eps^2 = 0."""

    __slots__ = ("a", "b")

    def __init__(self, a: float, b: float = 0.0):
        self.a = float(a)
        self.b = float(b)

    def __add__(self, o):
        o = _dual(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _dual(o)
        return Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _dual(o).__sub__(self)

    def __mul__(self, o):
        o = _dual(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _dual(o)
        inv = 1.0 / o.a
        return Dual(self.a * inv, (self.b * o.a - self.a * o.b) * inv * inv)

    def __rtruediv__(self, o):
        return _dual(o).__truediv__(self)

    def __neg__(self):
        return Dual(-self.a, -self.b)


def _dual(x) -> Dual:
    return x if isinstance(x, Dual) else Dual(x)


class HyperDual:
    """Hyper-dual number f + f1*e1 + f2*e2 + f12*e1*e2 (e1^2 = e2^2 = 0).

    Carries one second derivative per evaluation pass: seeding e1 along
    parameter i and e2 along parameter j makes ``f12`` equal d2f/didj.
    """

    __slots__ = ("f", "f1", "f2", "f12")

    def __init__(self, f, f1=0.0, f2=0.0, f12=0.0):
        self.f = float(f)
        self.f1 = float(f1)
        self.f2 = float(f2)
        self.f12 = float(f12)

    def __add__(self, o):
        o = _hyper(o)
        return HyperDual(self.f + o.f, self.f1 + o.f1, self.f2 + o.f2, self.f12 + o.f12)

    __radd__ = __add__

    def __sub__(self, o):
        o = _hyper(o)
        return HyperDual(self.f - o.f, self.f1 - o.f1, self.f2 - o.f2, self.f12 - o.f12)

    def __rsub__(self, o):
        return _hyper(o).__sub__(self)

    def __mul__(self, o):
        o = _hyper(o)
        return HyperDual(
            self.f * o.f,
            self.f1 * o.f + self.f * o.f1,
            self.f2 * o.f + self.f * o.f2,
            self.f12 * o.f + self.f1 * o.f2 + self.f2 * o.f1 + self.f * o.f12,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _hyper(o)
        return self * o._recip()

    def __rtruediv__(self, o):
        return _hyper(o).__truediv__(self)

    def _recip(self):
        inv = 1.0 / self.f
        inv2 = inv * inv
        return HyperDual(
            inv,
            -self.f1 * inv2,
            -self.f2 * inv2,
            -self.f12 * inv2 + 2.0 * self.f1 * self.f2 * inv2 * inv,
        )

    def __neg__(self):
        return HyperDual(-self.f, -self.f1, -self.f2, -self.f12)


def _hyper(x) -> HyperDual:
    return x if isinstance(x, HyperDual) else HyperDual(x)


def _lift(fn, dfn, d2fn):
    """Lift a scalar function with known first/second derivative to duals."""

    def apply(x):
        if isinstance(x, HyperDual):
            v, d, d2 = fn(x.f), dfn(x.f), d2fn(x.f)
            return HyperDual(
                v,
                d * x.f1,
                d * x.f2,
                d * x.f12 + d2 * x.f1 * x.f2,
            )
        if isinstance(x, Dual):
            return Dual(fn(x.a), dfn(x.a) * x.b)
        return fn(x)

    return apply


_UNARY = {
    "sin": _lift(math.sin, math.cos, lambda v: -math.sin(v)),
    "cos": _lift(math.cos, lambda v: -math.sin(v), lambda v: -math.cos(v)),
    "tan": _lift(
        math.tan,
        lambda v: 1.0 + math.tan(v) ** 2,
        lambda v: 2.0 * math.tan(v) * (1.0 + math.tan(v) ** 2),
    ),
    "sinh": _lift(math.sinh, math.cosh, math.sinh),
    "cosh": _lift(math.cosh, math.sinh, math.cosh),
    "exp": _lift(math.exp, math.exp, math.exp),
    "log": _lift(math.log, lambda v: 1.0 / v, lambda v: -1.0 / (v * v)),
    "sqrt": _lift(
        math.sqrt,
        lambda v: 0.5 / math.sqrt(v),
        lambda v: -0.25 / (v * math.sqrt(v)),
    ),
    "neg": lambda x: -x,
}


def _value_of(x) -> float:
    if isinstance(x, HyperDual):
        return x.f
    if isinstance(x, Dual):
        return x.a
    return x


def _pow(base, expo, pos: int):
    """Power with the DSL's domain rules (positive base or integer exponent)."""
    if isinstance(expo, (int, float)) and float(expo) == int(expo):
        n = int(expo)
        if n == 0:
            return base * 0 + 1.0
        if n < 0:
            if _value_of(base) == 0.0:
                raise DomainError("zero base with negative exponent", pos)
            return 1.0 / _pow(base, -n, pos)
        acc = base
        for _ in range(n - 1):
            acc = acc * base
        return acc
    if _value_of(base) <= 0.0:
        raise DomainError("non-integer power of non-positive base", pos)
    if isinstance(expo, (Dual, HyperDual)):
        return _UNARY["exp"](expo * _UNARY["log"](base))
    # constant non-integer exponent: x^p via exp(p log x), still exact for duals
    return _UNARY["exp"](_UNARY["log"](base) * expo)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    pos: int = field(compare=False)


@dataclass(frozen=True)
class Const(Node):
    value: float = 0.0


@dataclass(frozen=True)
class Param(Node):
    name: str = ""


@dataclass(frozen=True)
class Unary(Node):
    fn: str = ""
    arg: "Node" = None


@dataclass(frozen=True)
class Binary(Node):
    op: str = ""
    left: "Node" = None
    right: "Node" = None


@dataclass(frozen=True)
class Expr:
    """Parsed expression: immutable AST plus its free parameter names."""

    root: Node
    params: Tuple[str, ...]  # declared parameter order
    source: str = field(compare=False, default="")

    @property
    def free_params(self) -> Tuple[str, ...]:
        used = set()
        _collect_params(self.root, used)
        return tuple(p for p in self.params if p in used)


def _collect_params(node: Node, out: set) -> None:
    if isinstance(node, Param):
        out.add(node.name)
    elif isinstance(node, Unary):
        _collect_params(node.arg, out)
    elif isinstance(node, Binary):
        _collect_params(node.left, out)
        _collect_params(node.right, out)


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_SYMBOLS = set("+-*/^(),")


def _tokenize(src: str) -> List[Tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _SYMBOLS:
            tokens.append(("sym", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise SyntaxError_(f"malformed number {text!r}", i)
            tokens.append(("num", text, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("ident", src[i:j], i))
            i = j
            continue
        raise SyntaxError_(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str, params: Sequence[str], constants: Dict[str, float]):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.params = list(params)
        self.constants = dict(constants)

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.next()
        if kind != "sym" or text != value:
            raise SyntaxError_(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise SyntaxError_(f"unexpected trailing input {text!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, pos = self.peek()
            if kind == "sym" and text in "+-":
                self.next()
                node = Binary(pos, text, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, text, pos = self.peek()
            if kind == "sym" and text in "*/":
                self.next()
                node = Binary(pos, text, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, text, pos = self.peek()
        negate = False
        if kind == "sym" and text == "-":
            self.next()
            negate = True
        node = self.atom()
        kind, text, ppos = self.peek()
        if kind == "sym" and text == "^":
            self.next()
            node = Binary(ppos, "^", node, self.factor())
        if negate:
            node = Unary(pos, "neg", node)
        return node

    def atom(self) -> Node:
        kind, text, pos = self.next()
        if kind == "num":
            return Const(pos, float(text))
        if kind == "ident":
            nk, nt, _ = self.peek()
            if nk == "sym" and nt == "(":
                return self.call(text, pos)
            if text == "pi":
                return Const(pos, math.pi)
            if text in self.constants:
                return Const(pos, float(self.constants[text]))
            if text in self.params:
                return Param(pos, text)
            raise SyntaxError_(f"unknown identifier {text!r}", pos)
        if kind == "sym" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise SyntaxError_(f"unexpected token {text or 'end of input'!r}", pos)

    def call(self, name: str, pos: int) -> Node:
        if name not in _UNARY:
            raise SyntaxError_(f"unknown function {name!r}", pos)
        self.expect("(")
        args = [self.expr()]
        while True:
            kind, text, cpos = self.peek()
            if kind == "sym" and text == ",":
                self.next()
                args.append(self.expr())
            else:
                break
        self.expect(")")
        if len(args) != 1:
            raise SyntaxError_(f"{name} takes 1 argument, got {len(args)}", pos)
        return Unary(pos, name, args[0])


def parse(source: str, params: Sequence[str], constants: Dict[str, float] | None = None) -> Expr:
    """Parse ``source`` over the declared parameters and named constants.

    Constants are folded into the AST at parse time, so constant-only
    expressions have no free parameters.
    """
    constants = constants or {}
    if not source.strip():
        raise SyntaxError_("empty expression", 0)
    overlap = set(params) & set(constants)
    if overlap:
        raise ExprError(f"names declared both parameter and constant: {sorted(overlap)}")
    root = _Parser(source, params, constants).parse()
    return Expr(root=root, params=tuple(params), source=source)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def to_source(e: Expr) -> str:
    """Canonical, fully parenthesized rendering; reparses to an equal AST."""
    return _print(e.root)


def _print(node: Node) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Unary):
        if node.fn == "neg":
            return f"(-{_print(node.arg)})"
        return f"{node.fn}({_print(node.arg)})"
    if isinstance(node, Binary):
        return f"({_print(node.left)} {node.op} {_print(node.right)})"
    raise TypeError(node)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _eval_node(node: Node, env: Dict[str, object]):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Param):
        try:
            return env[node.name]
        except KeyError:
            raise DomainError(f"parameter {node.name!r} missing from point", node.pos)
    if isinstance(node, Unary):
        arg = _eval_node(node.arg, env)
        try:
            return _UNARY[node.fn](arg)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"{node.fn}: {exc}", node.pos)
    if isinstance(node, Binary):
        left = _eval_node(node.left, env)
        if node.op == "^":
            # constant exponents take the integer-power fast path
            if isinstance(node.right, Const):
                return _pow(left, node.right.value, node.pos)
            right = _eval_node(node.right, env)
            return _pow(left, right, node.pos)
        right = _eval_node(node.right, env)
        try:
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                return left / right
        except ZeroDivisionError:
            raise DomainError("division by zero", node.pos)
    raise TypeError(node)


PointLike = Dict[str, float]


def evaluate(e: Expr, point: PointLike) -> float:
    """Value of ``e`` at the given parameter point."""
    return float(_value_of(_eval_node(e.root, dict(point))))


def gradient(e: Expr, point: PointLike) -> np.ndarray:
    """Exact partial derivatives along the declared parameter order.

    One first-order dual pass per parameter.
    """
    out = np.zeros(len(e.params))
    for k, name in enumerate(e.params):
        env = {n: Dual(v) for n, v in point.items()}
        if name not in env:
            raise DomainError(f"parameter {name!r} missing from point", 0)
        env[name] = Dual(point[name], 1.0)
        r = _eval_node(e.root, env)
        out[k] = r.b if isinstance(r, Dual) else 0.0
    return out


def hessian(e: Expr, point: PointLike) -> np.ndarray:
    """Exact second partials via hyper-dual passes; symmetric by construction."""
    n = len(e.params)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            env = {name: HyperDual(v) for name, v in point.items()}
            ni, nj = e.params[i], e.params[j]
            vi = point[ni]
            env[ni] = HyperDual(vi, 1.0, 1.0 if i == j else 0.0, 0.0)
            if i != j:
                env[nj] = HyperDual(point[nj], 0.0, 1.0, 0.0)
            r = _eval_node(e.root, env)
            d2 = r.f12 if isinstance(r, HyperDual) else 0.0
            out[i, j] = d2
            out[j, i] = d2
    return out
