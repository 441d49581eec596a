"""Symbolic expression kernel: parse, evaluate, differentiate, simplify.

Expression trees are immutable dataclasses over a small node set (arithmetic,
ln, sqrt, abs, sin, cos, atan/atan2).  They carry every scalar field in the
package: vector-field components, generator coefficients, lifting right-hand
sides.  Deliberately not a CAS: no factoring, no trig identities, no equation
solving.  Residual checks downstream are numerical, so a canonical form is
never needed.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "Constant",
    "Variable",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Neg",
    "Ln",
    "Sqrt",
    "Abs",
    "Sin",
    "Cos",
    "Atan",
    "ParseError",
    "UndeclaredVariableError",
    "UnboundVariableError",
    "DomainError",
    "parse",
    "eval",
    "diff",
    "simplify",
    "substitute",
    "rename",
    "variables_of",
    "to_string",
]


class ParseError(ValueError):
    """Syntax error in expression text, with a character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class UndeclaredVariableError(ParseError):
    """An identifier in the text is not in the declared variable set."""

    def __init__(self, name: str, position: int):
        ParseError.__init__(self, f"undeclared identifier '{name}'", position)
        self.name = name


class UnboundVariableError(LookupError):
    """Evaluation met a variable with no binding."""

    def __init__(self, name: str):
        super().__init__(f"no binding for variable '{name}'")
        self.name = name


class DomainError(ArithmeticError):
    """Evaluation left the real domain (log/sqrt argument, zero division, power)."""

    def __init__(self, message: str, expression: "Expr | None" = None):
        if expression is not None:
            message = f"{message} in '{to_string(expression)}'"
        super().__init__(message)
        self.expression = expression


class Expr:
    """Base class for expression nodes.

    Instances are immutable values: safe to share, hash, and use as cache
    keys.  Arithmetic operators build new trees; plain numbers are coerced
    to Constant.
    """

    def __add__(self, other):
        return _binary(Add, self, other)

    def __radd__(self, other):
        return _binary(Add, other, self)

    def __sub__(self, other):
        return _binary(Sub, self, other)

    def __rsub__(self, other):
        return _binary(Sub, other, self)

    def __mul__(self, other):
        return _binary(Mul, self, other)

    def __rmul__(self, other):
        return _binary(Mul, other, self)

    def __truediv__(self, other):
        return _binary(Div, self, other)

    def __rtruediv__(self, other):
        return _binary(Div, other, self)

    def __pow__(self, other):
        return _binary(Pow, self, other)

    def __rpow__(self, other):
        return _binary(Pow, other, self)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_string(self)


def _coerce(value) -> "Expr":
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)):
        return Constant(float(value))
    raise TypeError(f"cannot use {value!r} as an expression")


def _binary(cls, left, right):
    if not isinstance(left, (Expr, int, float)) or not isinstance(right, (Expr, int, float)):
        return NotImplemented
    return cls(_coerce(left), _coerce(right))


@dataclass(frozen=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class Variable(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Ln(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Atan(Expr):
    """One-argument arctangent, or two-argument (y, x) quadrant-aware form."""

    arg: Expr
    x: "Expr | None" = None


def _children(e: Expr) -> tuple:
    match e:
        case Constant() | Variable():
            return ()
        case Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r) | Pow(l, r):
            return (l, r)
        case Neg(a) | Ln(a) | Sqrt(a) | Abs(a) | Sin(a) | Cos(a):
            return (a,)
        case Atan(y, None):
            return (y,)
        case Atan(y, x):
            return (y, x)
    raise TypeError(f"not an expression node: {e!r}")


def _rebuild(e: Expr, kids: tuple) -> Expr:
    return type(e)(*kids)


# ---------------------------------------------------------------------------
# Parsing


_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)

_UNARY_FUNCTIONS = {"ln": Ln, "sqrt": Sqrt, "abs": Abs, "sin": Sin, "cos": Cos}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive-descent parser for the expression grammar.

    expr := term (("+"|"-") term)*
    term := factor (("*"|"/") factor)*
    factor := base ("^" factor)?
    base := number | ident | ident "(" expr ("," expr)? ")" | "(" expr ")" | "-" base

    Note the unary minus lives at base level, so "-u^2" is (-u)^2.
    """

    def __init__(self, tokens, length: int, variables):
        self.tokens = tokens
        self.length = length
        self.variables = variables
        self.pos = 0

    def _peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return (None, "", self.length)

    def _next(self):
        tok = self._peek()
        if tok[0] is None:
            raise ParseError("unexpected end of input", tok[2])
        self.pos += 1
        return tok

    def _peek_op(self, text: str) -> bool:
        kind, tok, _ = self._peek()
        return kind == "op" and tok == text

    def _expect(self, text: str):
        kind, tok, pos = self._peek()
        if kind != "op" or tok != text:
            found = repr(tok) if kind is not None else "end of input"
            raise ParseError(f"expected '{text}', found {found}", pos)
        self.pos += 1

    def expr(self) -> Expr:
        node = self.term()
        while self._peek_op("+") or self._peek_op("-"):
            _, op, _ = self._next()
            right = self.term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self._peek_op("*") or self._peek_op("/"):
            _, op, _ = self._next()
            right = self.factor()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def factor(self) -> Expr:
        node = self.base()
        if self._peek_op("^"):
            self._next()
            return Pow(node, self.factor())
        return node

    def base(self) -> Expr:
        kind, tok, pos = self._next()
        if kind == "num":
            return Constant(float(tok))
        if kind == "op" and tok == "-":
            inner = self.base()
            if isinstance(inner, Constant):
                # fold negated literals so printed trees re-parse unchanged
                return Constant(-inner.value)
            return Neg(inner)
        if kind == "op" and tok == "(":
            node = self.expr()
            self._expect(")")
            return node
        if kind == "ident":
            if self._peek_op("("):
                return self.call(tok, pos)
            if tok not in self.variables:
                raise UndeclaredVariableError(tok, pos)
            return Variable(tok)
        raise ParseError(f"unexpected token {tok!r}", pos)

    def call(self, name: str, pos: int) -> Expr:
        self._expect("(")
        first = self.expr()
        second = None
        if self._peek_op(","):
            self._next()
            second = self.expr()
        self._expect(")")
        if name in ("atan", "atan2"):
            if name == "atan2" and second is None:
                raise ParseError("atan2 takes two arguments", pos)
            return Atan(first, second)
        if name in _UNARY_FUNCTIONS:
            if second is not None:
                raise ParseError(f"{name} takes one argument", pos)
            return _UNARY_FUNCTIONS[name](first)
        raise ParseError(f"unknown function '{name}'", pos)


def parse(text: str, variables) -> Expr:
    """Parse expression text over a declared variable set.

    Grammar: infix + - * / ^ with conventional precedence, ^ right
    associative, unary minus, calls ln/sqrt/abs/sin/cos/atan/atan2.

    Raises ParseError with a character position for syntax errors and
    UndeclaredVariableError (naming the offender) for unknown identifiers.
    """
    parser = _Parser(_tokenize(text), len(text), frozenset(variables))
    node = parser.expr()
    kind, tok, pos = parser._peek()
    if kind is not None:
        raise ParseError(f"unexpected trailing input {tok!r}", pos)
    return node


# ---------------------------------------------------------------------------
# Evaluation


def eval(e: Expr, bindings) -> float:  # noqa: A001 - deliberate API name
    """Evaluate an expression at the given variable bindings.

    Reference tree-walk interpreter; identical tree and bindings give a
    bit-identical result.  Raises DomainError carrying the offending
    subexpression for log/sqrt of invalid arguments, division by zero, and
    invalid powers; UnboundVariableError for a variable with no binding.
    """
    match e:
        case Constant(c):
            return c
        case Variable(name):
            try:
                return float(bindings[name])
            except KeyError:
                raise UnboundVariableError(name) from None
        case Add(l, r):
            return eval(l, bindings) + eval(r, bindings)
        case Sub(l, r):
            return eval(l, bindings) - eval(r, bindings)
        case Mul(l, r):
            return eval(l, bindings) * eval(r, bindings)
        case Div(l, r):
            denom = eval(r, bindings)
            if denom == 0.0:
                raise DomainError("division by zero", e)
            return eval(l, bindings) / denom
        case Pow(b, x):
            bv = eval(b, bindings)
            xv = eval(x, bindings)
            try:
                return math.pow(bv, xv)
            except (ValueError, OverflowError) as exc:
                raise DomainError(f"invalid power {bv!r}^{xv!r}", e) from exc
        case Neg(a):
            return -eval(a, bindings)
        case Ln(a):
            value = eval(a, bindings)
            if value <= 0.0:
                raise DomainError(f"ln of non-positive value {value!r}", e)
            return math.log(value)
        case Sqrt(a):
            value = eval(a, bindings)
            if value < 0.0:
                raise DomainError(f"sqrt of negative value {value!r}", e)
            return math.sqrt(value)
        case Abs(a):
            return abs(eval(a, bindings))
        case Sin(a):
            return math.sin(eval(a, bindings))
        case Cos(a):
            return math.cos(eval(a, bindings))
        case Atan(y, None):
            return math.atan(eval(y, bindings))
        case Atan(y, x):
            return math.atan2(eval(y, bindings), eval(x, bindings))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Differentiation


def diff(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative with respect to var.

    Returns an unsimplified tree; pass through simplify() when size matters.
    abs differentiates to sign (written a/|a|), so evaluating the derivative
    at a zero of the argument raises DomainError rather than guessing.
    """
    match e:
        case Constant():
            return Constant(0.0)
        case Variable(name):
            return Constant(1.0 if name == var else 0.0)
        case Add(l, r):
            return Add(diff(l, var), diff(r, var))
        case Sub(l, r):
            return Sub(diff(l, var), diff(r, var))
        case Mul(l, r):
            return Add(Mul(diff(l, var), r), Mul(l, diff(r, var)))
        case Div(n, d):
            return Div(Sub(Mul(diff(n, var), d), Mul(n, diff(d, var))), Mul(d, d))
        case Pow(b, Constant(c)):
            if c == 0.0:
                return Constant(0.0)
            if c == 1.0:
                return diff(b, var)
            return Mul(Mul(Constant(c), Pow(b, Constant(c - 1.0))), diff(b, var))
        case Pow(b, x):
            # f^g (g' ln f + g f'/f), valid where f > 0
            return Mul(e, Add(Mul(diff(x, var), Ln(b)), Div(Mul(x, diff(b, var)), b)))
        case Neg(a):
            return Neg(diff(a, var))
        case Ln(a):
            return Div(diff(a, var), a)
        case Sqrt(a):
            return Div(diff(a, var), Mul(Constant(2.0), Sqrt(a)))
        case Abs(a):
            return Mul(Div(a, Abs(a)), diff(a, var))
        case Sin(a):
            return Mul(Cos(a), diff(a, var))
        case Cos(a):
            return Neg(Mul(Sin(a), diff(a, var)))
        case Atan(y, None):
            return Div(diff(y, var), Add(Constant(1.0), Mul(y, y)))
        case Atan(y, x):
            num = Sub(Mul(x, diff(y, var)), Mul(y, diff(x, var)))
            return Div(num, Add(Mul(x, x), Mul(y, y)))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Simplification


def simplify(e: Expr) -> Expr:
    """Light normalization: constant folding plus 0/1/negation identities.

    Value-preserving on the shared domain and idempotent.  No factoring or
    trig identities; downstream residual checks are numerical.
    """
    kids = _children(e)
    if kids:
        e = _rebuild(e, tuple(simplify(k) for k in kids))
    while True:
        out = _rewrite(e)
        if out == e:
            return e
        e = out


def _rewrite(e: Expr) -> Expr:
    kids = _children(e)
    if kids and all(isinstance(k, Constant) for k in kids):
        try:
            return Constant(eval(e, {}))
        except DomainError:
            return e
    match e:
        case Add(Constant(0.0), x) | Add(x, Constant(0.0)):
            return x
        case Sub(x, Constant(0.0)):
            return x
        case Sub(Constant(0.0), x):
            return Neg(x)
        case Sub(x, y) if x == y:
            return Constant(0.0)
        case Mul(Constant(1.0), x) | Mul(x, Constant(1.0)):
            return x
        case Mul(Constant(-1.0), x) | Mul(x, Constant(-1.0)):
            return Neg(x)
        case Mul(Constant(0.0), _) | Mul(_, Constant(0.0)):
            return Constant(0.0)
        case Div(x, Constant(1.0)):
            return x
        case Div(Constant(0.0), d) if d != Constant(0.0):
            return Constant(0.0)
        case Pow(x, Constant(1.0)):
            return x
        case Pow(_, Constant(0.0)):
            return Constant(1.0)
        case Neg(Neg(x)):
            return x
    return e


# ---------------------------------------------------------------------------
# Structure helpers


def substitute(e: Expr, replacements) -> Expr:
    """Replace variables by expressions, by name."""
    match e:
        case Variable(name) if name in replacements:
            return _coerce(replacements[name])
        case Constant() | Variable():
            return e
    return _rebuild(e, tuple(substitute(k, replacements) for k in _children(e)))


def rename(e: Expr, names) -> Expr:
    """Rename variables according to an old-name to new-name mapping."""
    return substitute(e, {old: Variable(new) for old, new in names.items()})


def variables_of(e: Expr) -> frozenset:
    """The set of variable names appearing in the tree."""
    match e:
        case Variable(name):
            return frozenset((name,))
        case Constant():
            return frozenset()
    out = frozenset()
    for k in _children(e):
        out |= variables_of(k)
    return out


# ---------------------------------------------------------------------------
# Printing

_ADD, _MUL, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def to_string(e: Expr) -> str:
    """Render to grammar-conformant text; parses back to the same tree.

    (The one normalization: a top-level Neg of a literal prints as a negative
    literal, which re-parses to the folded constant, matching simplify.)
    """
    text, _ = _render(e)
    return text


def _wrap(child: Expr, floor: int) -> str:
    text, level = _render(child)
    if level < floor:
        return f"({text})"
    return text


def _wrap_right(child: Expr, floor: int) -> str:
    # parenthesize right operands that would start with a bare minus
    text = _wrap(child, floor)
    if text.startswith("-"):
        return f"({text})"
    return text


def _render(e: Expr) -> tuple[str, int]:
    match e:
        case Constant(c):
            return _format_number(c), (_UNARY if c < 0 else _ATOM)
        case Variable(name):
            return name, _ATOM
        case Add(l, r):
            return f"{_wrap(l, _ADD)}+{_wrap_right(r, _MUL)}", _ADD
        case Sub(l, r):
            return f"{_wrap(l, _ADD)}-{_wrap_right(r, _MUL)}", _ADD
        case Mul(l, r):
            return f"{_wrap(l, _MUL)}*{_wrap_right(r, _UNARY)}", _MUL
        case Div(l, r):
            return f"{_wrap(l, _MUL)}/{_wrap_right(r, _UNARY)}", _MUL
        case Pow(b, x):
            return f"{_wrap(b, _ATOM)}^{_wrap(x, _POW)}", _POW
        case Neg(a):
            return f"-{_wrap(a, _ATOM)}", _UNARY
        case Ln(a):
            return f"ln({to_string(a)})", _ATOM
        case Sqrt(a):
            return f"sqrt({to_string(a)})", _ATOM
        case Abs(a):
            return f"abs({to_string(a)})", _ATOM
        case Sin(a):
            return f"sin({to_string(a)})", _ATOM
        case Cos(a):
            return f"cos({to_string(a)})", _ATOM
        case Atan(y, None):
            return f"atan({to_string(y)})", _ATOM
        case Atan(y, x):
            return f"atan2({to_string(y)}, {to_string(x)})", _ATOM
    raise TypeError(f"not an expression node: {e!r}")


def _format_number(value: float) -> str:
    if math.isfinite(value) and value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


# ---------------------------------------------------------------------------
# Compilation (internal)
#
# The public eval() stays the reference interpreter; integration loops and
# grid sweeps go through compiled closures for speed.  Scalar code mirrors
# eval operation for operation (math.pow and friends), so results agree
# bitwise with the interpreter.


def _codegen(e: Expr, vec: bool) -> str:
    match e:
        case Constant(c):
            return f"({c!r})"
        case Variable(name):
            return f"_b_{name}"
        case Add(l, r):
            return f"({_codegen(l, vec)}+{_codegen(r, vec)})"
        case Sub(l, r):
            return f"({_codegen(l, vec)}-{_codegen(r, vec)})"
        case Mul(l, r):
            return f"({_codegen(l, vec)}*{_codegen(r, vec)})"
        case Div(l, r):
            return f"({_codegen(l, vec)}/{_codegen(r, vec)})"
        case Pow(b, x):
            fn = "np.power" if vec else "math.pow"
            return f"{fn}({_codegen(b, vec)}, {_codegen(x, vec)})"
        case Neg(a):
            return f"(-{_codegen(a, vec)})"
        case Ln(a):
            return f"{'np.log' if vec else 'math.log'}({_codegen(a, vec)})"
        case Sqrt(a):
            return f"{'np.sqrt' if vec else 'math.sqrt'}({_codegen(a, vec)})"
        case Abs(a):
            return f"{'np.abs' if vec else 'abs'}({_codegen(a, vec)})"
        case Sin(a):
            return f"{'np.sin' if vec else 'math.sin'}({_codegen(a, vec)})"
        case Cos(a):
            return f"{'np.cos' if vec else 'math.cos'}({_codegen(a, vec)})"
        case Atan(y, None):
            return f"{'np.arctan' if vec else 'math.atan'}({_codegen(y, vec)})"
        case Atan(y, x):
            fn = "np.arctan2" if vec else "math.atan2"
            return f"{fn}({_codegen(y, vec)}, {_codegen(x, vec)})"
    raise TypeError(f"not an expression node: {e!r}")


@functools.lru_cache(maxsize=None)
def _compiled(e: Expr, argnames: tuple, vec: bool):
    params = ", ".join(f"_b_{n}" for n in argnames)
    src = f"def _f({params}):\n    return {_codegen(e, vec)}\n"
    namespace = {"np": np} if vec else {"math": math}
    exec(compile(src, "<phasesym-expr>", "exec"), namespace)
    return namespace["_f"]


def compile_scalar(e: Expr, argnames):
    """Compile to a scalar float function of the given positional arguments.

    Raises the underlying ValueError/ZeroDivisionError/OverflowError on
    domain violations; callers translate to DomainError with context.
    """
    return _compiled(e, tuple(argnames), False)


@functools.lru_cache(maxsize=None)
def _vector_wrapper(e: Expr, argnames: tuple):
    raw = _compiled(e, argnames, True)

    def call(*arrays):
        arrays = [np.asarray(a, dtype=float) for a in arrays]
        with np.errstate(all="ignore"):
            out = raw(*arrays)
        if arrays and np.shape(out) != np.shape(arrays[0]):
            out = np.broadcast_to(out, np.shape(arrays[0]))
        return np.asarray(out, dtype=float)

    return call


def compile_vector(e: Expr, argnames):
    """Compile to a numpy elementwise function of the given arguments.

    Domain violations produce non-finite entries (warnings suppressed);
    callers are responsible for isfinite checks.
    """
    return _vector_wrapper(e, tuple(argnames))
