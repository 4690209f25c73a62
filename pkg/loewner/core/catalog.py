"""Built-in functions used by the verification battery."""

from typing import Callable, Dict, Optional, Sequence, Tuple

from .errors import ExpressionError
from .exprlang import (
    NONNEGATIVE,
    POSITIVE,
    REAL_LINE,
    Interval,
    ScalarFunction,
    parse,
    parse_constant,
)


def _product(k: int) -> str:
    return "*".join(f"r{i}" for i in range(1, k + 1))


# name -> (source builder for arity k, default domain, fixed arity or None)
BUILTINS: Dict[str, Tuple[Callable[[int], str], Interval, Optional[int]]] = {
    "neg_inv_product": (lambda k: f"-1/({_product(k)})", POSITIVE, None),
    "product": (_product, NONNEGATIVE, None),
    "koranyi_g": (lambda k: "r1*r2/((1+r1)*(1+r2))", Interval(0.0, 1.0), 2),
    "koranyi_f": (lambda k: "r1^2*r2^2/((1+r1)*(1+r2))", Interval(0.0, 1.0, True, False), 2),
    "sqrt1": (lambda k: "sqrt(r1)", NONNEGATIVE, None),
    "square1": (lambda k: "r1^2", REAL_LINE, None),
    "neg_sqrt1": (lambda k: "-sqrt(r1)", NONNEGATIVE, None),
    "neg_inv_sqrt1": (lambda k: "-1/sqrt(r1)", POSITIVE, None),
}


def is_builtin(name: str) -> bool:
    return name.strip() in BUILTINS or parse_constant(name) is not None


def builtin(name: str, k: Optional[int] = None) -> ScalarFunction:
    """
    Look up a catalog entry.

    One-variable entries accept a larger arity; the extra variables are unused.
    """
    name = name.strip()
    value = parse_constant(name)
    if value is not None:
        arity = k or 1
        source = repr(value) if value >= 0 else f"-{repr(-value)}"
        return parse(source, arity, (REAL_LINE,) * arity)

    if name not in BUILTINS:
        raise ExpressionError(f"unknown built-in '{name}'")
    make_source, interval, fixed = BUILTINS[name]
    arity = k or fixed or 1
    if fixed is not None and arity != fixed:
        raise ExpressionError(f"built-in '{name}' takes exactly {fixed} variables, got {arity}")
    return parse(make_source(arity), arity, (interval,) * arity)


def resolve_function(
    text: str, k: int, domain: Optional[Sequence[Interval]] = None
) -> ScalarFunction:
    """Resolve a catalog name or parse an expression, optionally overriding the domain."""
    if is_builtin(text):
        function = builtin(text, k)
        return function.with_domain(domain) if domain is not None else function
    return parse(text, k, domain)
