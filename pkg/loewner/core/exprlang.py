"""Expression language for real functions of k real variables."""

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
import pyparsing as pp

from .errors import (
    DomainError,
    ExpressionError,
    ExpressionSyntaxError,
    SpectrumOutsideDomainError,
    UnknownFunctionError,
    UnknownVariableError,
)

Value = Union[float, np.ndarray]


def _finite_scalar(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise DomainError(f"{what} is not finite")
    return value


def _finite_array(value: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{what} is not finite")
    return value


def _scalar_call(fn: Callable[[float], float], name: str) -> Callable[[float], float]:
    def call(x: float) -> float:
        try:
            return fn(x)
        except (ValueError, OverflowError) as e:
            raise DomainError(f"{name}({x!r}) is undefined") from e
    return call


FUNCTIONS: Dict[str, Tuple[Callable[[float], float], Callable[[np.ndarray], np.ndarray]]] = {
    "sqrt": (_scalar_call(math.sqrt, "sqrt"), np.sqrt),
    "exp": (_scalar_call(math.exp, "exp"), np.exp),
    "log": (_scalar_call(math.log, "log"), np.log),
}


class Node:
    """Expression tree node."""

    def scalar(self, point: Sequence[float]) -> float:
        raise NotImplementedError

    def array(self, columns: Sequence[np.ndarray]) -> Value:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def children(self) -> Tuple["Node", ...]:
        return ()

    def substitute(self, mapping: Dict[int, "Node"]) -> "Node":
        return self

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children():
            yield from child.walk()


@dataclass(frozen=True)
class Number(Node):
    value: float

    def scalar(self, point):
        return self.value

    def array(self, columns):
        return self.value

    def render(self):
        text = repr(float(self.value))
        return f"({text})" if self.value < 0 else text


@dataclass(frozen=True)
class Variable(Node):
    index: int

    def scalar(self, point):
        return float(point[self.index - 1])

    def array(self, columns):
        return columns[self.index - 1]

    def render(self):
        return f"r{self.index}"

    def substitute(self, mapping):
        return mapping.get(self.index, self)


@dataclass(frozen=True)
class Neg(Node):
    operand: Node

    def scalar(self, point):
        return -self.operand.scalar(point)

    def array(self, columns):
        return -self.operand.array(columns)

    def render(self):
        return f"(-{self.operand.render()})"

    def children(self):
        return (self.operand,)

    def substitute(self, mapping):
        return Neg(self.operand.substitute(mapping))


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def scalar(self, point):
        a = self.left.scalar(point)
        b = self.right.scalar(point)
        if self.op == "+":
            result = a + b
        elif self.op == "-":
            result = a - b
        elif self.op == "*":
            result = a * b
        elif self.op == "/":
            if b == 0.0:
                raise DomainError("division by zero")
            result = a / b
        else:
            try:
                result = math.pow(a, b)
            except (ValueError, OverflowError, ZeroDivisionError) as e:
                raise DomainError(f"{a!r}^{b!r} is undefined") from e
        return _finite_scalar(result, self.render())

    def array(self, columns):
        a = self.left.array(columns)
        b = self.right.array(columns)
        with np.errstate(all="ignore"):
            if self.op == "+":
                result = np.add(a, b)
            elif self.op == "-":
                result = np.subtract(a, b)
            elif self.op == "*":
                result = np.multiply(a, b)
            elif self.op == "/":
                result = np.divide(a, b)
            else:
                result = np.power(np.asarray(a, dtype=float), b)
        return _finite_array(result, self.render())

    def render(self):
        return f"({self.left.render()} {self.op} {self.right.render()})"

    def children(self):
        return (self.left, self.right)

    def substitute(self, mapping):
        return BinOp(self.op, self.left.substitute(mapping), self.right.substitute(mapping))


@dataclass(frozen=True)
class Call(Node):
    name: str
    argument: Node

    def scalar(self, point):
        fn = FUNCTIONS[self.name][0]
        return _finite_scalar(fn(self.argument.scalar(point)), self.render())

    def array(self, columns):
        fn = FUNCTIONS[self.name][1]
        with np.errstate(all="ignore"):
            result = fn(self.argument.array(columns))
        return _finite_array(result, self.render())

    def render(self):
        return f"{self.name}({self.argument.render()})"

    def children(self):
        return (self.argument,)

    def substitute(self, mapping):
        return Call(self.name, self.argument.substitute(mapping))


# Grammar

def _fold_left(tokens) -> Node:
    tokens = list(tokens)
    node = tokens[0]
    for op, right in zip(tokens[1::2], tokens[2::2]):
        node = BinOp(op, node, right)
    return node


_LITERAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def _finite_literal(s: str, loc: int, tokens) -> float:
    value = float(tokens[0])
    if not math.isfinite(value):
        raise pp.ParseFatalException(s, loc, f"literal {tokens[0]} is not finite")
    return value


def _build_grammar() -> pp.ParserElement:
    number = pp.Regex(_LITERAL).set_name("number")
    number.set_parse_action(lambda s, loc, t: Number(_finite_literal(s, loc, t)))
    variable = pp.Regex(r"r\d+").set_name("variable")
    variable.set_parse_action(lambda t: Variable(int(t[0][1:])))
    name = pp.Word(pp.alphas, pp.alphanums + "_")
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")

    expr = pp.Forward().set_name("expression")
    factor = pp.Forward()

    call = (name + lpar + expr + rpar).set_parse_action(lambda t: Call(t[0], t[1]))
    atom = number | call | variable | (lpar + expr + rpar)
    power = (atom + pp.Optional(pp.Literal("^") + factor)).set_parse_action(
        lambda t: BinOp("^", t[0], t[2]) if len(t) == 3 else t[0]
    )
    negation = (pp.Literal("-") + factor).set_parse_action(lambda t: Neg(t[1]))
    factor <<= negation | power
    term = (factor + pp.ZeroOrMore(pp.one_of("* /") + factor)).set_parse_action(_fold_left)
    expr <<= (term + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(_fold_left)
    return expr


_GRAMMAR = _build_grammar()


def _build_interval_grammar() -> pp.ParserElement:
    endpoint = pp.Regex(r"[+-]?(?:inf|" + _LITERAL + ")").set_name("endpoint")
    endpoint.set_parse_action(lambda t: float(t[0]))
    return (
        pp.one_of("[ ] (")("left")
        + endpoint("lower")
        + pp.Suppress(",")
        + endpoint("upper")
        + pp.one_of("] [ )")("right")
    )


def _build_constant_grammar() -> pp.ParserElement:
    value = pp.Regex(r"[+-]?" + _LITERAL).set_name("constant value")
    value.set_parse_action(_finite_literal)
    return pp.Suppress(pp.Keyword("constant")) + pp.Suppress("(") + value + pp.Suppress(")")


_INTERVAL = _build_interval_grammar()
_CONSTANT = _build_constant_grammar()


def parse_constant(text: str) -> Optional[float]:
    """The value c of the name "constant(c)", or None when text has another shape."""
    try:
        return _CONSTANT.parse_string(text, parse_all=True)[0]
    except pp.ParseFatalException as e:
        raise ExpressionSyntaxError(e.msg, e.loc, e.col) from e
    except pp.ParseBaseException:
        return None


# Domains


@dataclass(frozen=True)
class Interval:
    """A real interval; infinite endpoints are always open."""
    lower: float = 0.0
    upper: float = math.inf
    lower_closed: bool = False
    upper_closed: bool = False

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse "(0,inf)", "[0,1)" or the ]0,1[ notation."""
        try:
            parsed = _INTERVAL.parse_string(text, parse_all=True)
        except pp.ParseBaseException as e:
            raise ExpressionError(f"cannot parse interval '{text}'") from e
        left, right = parsed["left"], parsed["right"]
        lower, upper = parsed["lower"], parsed["upper"]
        if not lower < upper:
            raise ExpressionError(f"empty interval '{text}'")
        return cls(
            lower=lower,
            upper=upper,
            lower_closed=left == "[" and math.isfinite(lower),
            upper_closed=right == "]" and math.isfinite(upper),
        )

    def __str__(self) -> str:
        def fmt(v: float) -> str:
            return "inf" if v == math.inf else "-inf" if v == -math.inf else repr(v)
        return (
            f"{'[' if self.lower_closed else '('}{fmt(self.lower)},"
            f"{fmt(self.upper)}{']' if self.upper_closed else ')'}"
        )

    def contains(self, x: float) -> bool:
        above = x >= self.lower if self.lower_closed else x > self.lower
        below = x <= self.upper if self.upper_closed else x < self.upper
        return above and below

    def admit(self, values: np.ndarray, variable: int, slack: float = 0.0) -> np.ndarray:
        """
        Return values clamped onto closed endpoints within slack.

        Raises:
            SpectrumOutsideDomainError: a value lies outside the interval.
        """
        values = np.array(values, dtype=float)
        if slack > 0.0:
            if self.lower_closed:
                near = (values < self.lower) & (values >= self.lower - slack)
                values[near] = self.lower
            if self.upper_closed:
                near = (values > self.upper) & (values <= self.upper + slack)
                values[near] = self.upper
        for value in values:
            if not self.contains(float(value)):
                raise SpectrumOutsideDomainError(variable, float(value), str(self))
        return values


POSITIVE = Interval(0.0, math.inf, False, False)
NONNEGATIVE = Interval(0.0, math.inf, True, False)
REAL_LINE = Interval(-math.inf, math.inf, False, False)


def parse_domain(text: Optional[str], k: int, default: Interval = POSITIVE) -> Tuple[Interval, ...]:
    """One interval for every variable, or k intervals separated by ';'."""
    if text is None or not text.strip():
        return (default,) * k
    parts = [part for part in text.split(";") if part.strip()]
    if len(parts) == 1:
        return (Interval.parse(parts[0]),) * k
    if len(parts) != k:
        raise ExpressionError(f"domain lists {len(parts)} intervals for {k} variables")
    return tuple(Interval.parse(part) for part in parts)


# Functions

@dataclass(frozen=True)
class ScalarFunction:
    """A real function of `arity` real variables with a declared domain."""
    arity: int
    body: Node
    domain: Tuple[Interval, ...]
    source: str

    def evaluate(self, point: Sequence[float]) -> float:
        """IEEE evaluation at one point."""
        if len(point) != self.arity:
            raise ExpressionError(f"expected {self.arity} coordinates, got {len(point)}")
        return float(self.body.scalar(point))

    def evaluate_grid(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        """Vectorized evaluation on broadcastable coordinate arrays."""
        if len(columns) != self.arity:
            raise ExpressionError(f"expected {self.arity} coordinate arrays, got {len(columns)}")
        columns = [np.asarray(c, dtype=float) for c in columns]
        shape = np.broadcast_shapes(*(c.shape for c in columns))
        result = self.body.array(columns)
        return np.array(np.broadcast_to(result, shape), dtype=float)

    def canonical(self) -> str:
        return self.body.render()

    def with_domain(self, domain: Sequence[Interval]) -> "ScalarFunction":
        if len(domain) != self.arity:
            raise ExpressionError(f"domain lists {len(domain)} intervals for {self.arity} variables")
        return replace(self, domain=tuple(domain))

    def domain_text(self) -> Tuple[str, ...]:
        return tuple(str(interval) for interval in self.domain)

    def freeze(self, variable: int, point: Sequence[float]) -> "ScalarFunction":
        """
        One-variable slice: every variable but `variable` (1-based) is fixed at point.

        The free variable becomes r1 of the returned function.
        """
        if not 1 <= variable <= self.arity:
            raise UnknownVariableError(variable, self.arity)
        mapping: Dict[int, Node] = {
            i: Number(float(point[i - 1])) for i in range(1, self.arity + 1) if i != variable
        }
        mapping[variable] = Variable(1)
        body = self.body.substitute(mapping)
        return ScalarFunction(1, body, (self.domain[variable - 1],), body.render())


def _validate(body: Node, k: int):
    for node in body.walk():
        if isinstance(node, Variable) and not 1 <= node.index <= k:
            raise UnknownVariableError(node.index, k)
        if isinstance(node, Call) and node.name not in FUNCTIONS:
            raise UnknownFunctionError(node.name)


def parse(source: str, k: int, domain: Optional[Sequence[Interval]] = None) -> ScalarFunction:
    """
    Parse source into a function of k variables r1..rk.

    Raises:
        ExpressionSyntaxError: text does not match the grammar (with position).
        UnknownVariableError: a variable index is outside 1..k.
        UnknownFunctionError: a call to a name other than sqrt, exp, log.
    """
    if k < 1:
        raise ExpressionError(f"arity must be positive, got {k}")
    if not source or not source.strip():
        raise ExpressionSyntaxError("empty expression", 0, 1)
    try:
        body = _GRAMMAR.parse_string(source, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise ExpressionSyntaxError(e.msg, e.loc, e.col) from e
    _validate(body, k)
    if domain is None:
        domain = (POSITIVE,) * k
    elif len(domain) != k:
        raise ExpressionError(f"domain lists {len(domain)} intervals for {k} variables")
    return ScalarFunction(arity=k, body=body, domain=tuple(domain), source=source)
