"""Tests for the expression language and domains."""

import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner.core.errors import (
    DomainError,
    ExpressionError,
    ExpressionSyntaxError,
    SpectrumOutsideDomainError,
    UnknownFunctionError,
    UnknownVariableError,
)
from loewner.core.exprlang import (
    NONNEGATIVE,
    POSITIVE,
    REAL_LINE,
    BinOp,
    Interval,
    Variable,
    parse,
    parse_constant,
    parse_domain,
)

KORANYI_G = "r1*r2/((1+r1)*(1+r2))"
KORANYI_F = "r1^2*r2^2/((1+r1)*(1+r2))"


def test_parse_product_tree():
    f = parse("r1*r2", 2)
    assert f.body == BinOp("*", Variable(1), Variable(2))
    assert f.arity == 2
    assert f.domain == (POSITIVE, POSITIVE)


@pytest.mark.parametrize(
    "source, k, point, expected",
    [
        ("-1/(r1*r2)", 2, (2.0, 4.0), -0.125),
        (KORANYI_G, 2, (1.0, 1.0), 0.25),
        (KORANYI_F, 2, (1.0, 1.0), 0.25),
        ("2^3^2", 1, (0.0,), 512.0),
        ("-2^2", 1, (0.0,), -4.0),
        ("2^-1", 1, (0.0,), 0.5),
        ("1-2-3", 1, (0.0,), -4.0),
        ("8/4/2", 1, (0.0,), 1.0),
        ("sqrt(r1) + exp(0) + log(1)", 1, (4.0,), 3.0),
        ("1.5e1 * .5", 1, (0.0,), 7.5),
    ],
)
def test_evaluate(source, k, point, expected):
    assert parse(source, k).evaluate(point) == pytest.approx(expected, abs=1e-15)


def test_evaluation_is_bitwise_deterministic():
    f = parse("sqrt(r1)*exp(r2)/(1+r1^2)", 2)
    first = struct.pack("d", f.evaluate((0.37, 1.9)))
    assert all(struct.pack("d", f.evaluate((0.37, 1.9))) == first for _ in range(10))


def test_unknown_variable():
    with pytest.raises(UnknownVariableError) as info:
        parse("r1 + r3", 2)
    assert info.value.index == 3
    with pytest.raises(UnknownVariableError):
        parse("r0", 1)


def test_unknown_function():
    with pytest.raises(UnknownFunctionError) as info:
        parse("sin(r1)", 1)
    assert info.value.name == "sin"


@pytest.mark.parametrize("source", ["r1 +", "(r1", "r1 ** 2", "2 r1", "1e", ""])
def test_syntax_errors_carry_position(source):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(source, 1)
    assert isinstance(info.value.position, int)
    assert info.value.position >= 0


@pytest.mark.parametrize("source", ["1e999", "r1 + 2e400", "-1e309*r1"])
def test_non_finite_literals_are_rejected(source):
    with pytest.raises(ExpressionSyntaxError, match="not finite"):
        parse(source, 1)


@pytest.mark.parametrize(
    "source, point",
    [
        ("sqrt(r1)", (-1.0,)),
        ("1/r1", (0.0,)),
        ("log(r1)", (0.0,)),
        ("r1^(-1)", (0.0,)),
        ("r1^0.5", (-1.0,)),
        ("exp(r1)", (1e4,)),
    ],
)
def test_domain_errors(source, point):
    with pytest.raises(DomainError):
        parse(source, 1, (REAL_LINE,)).evaluate(point)


def test_grid_evaluation_matches_pointwise():
    f = parse(KORANYI_G, 2)
    a, b = np.meshgrid([0.1, 0.5, 0.9], [0.2, 0.7], indexing="ij")
    grid = f.evaluate_grid([a, b])
    for index in np.ndindex(grid.shape):
        assert grid[index] == pytest.approx(f.evaluate((a[index], b[index])), rel=1e-15)


def test_grid_evaluation_broadcasts_constants():
    f = parse("2", 2)
    np.testing.assert_array_equal(f.evaluate_grid([np.ones(3), np.ones(3)]), [2.0, 2.0, 2.0])


def test_grid_evaluation_domain_error():
    with pytest.raises(DomainError):
        parse("log(r1)", 1).evaluate_grid([np.array([1.0, 0.0])])


SOURCES = [
    "-1/(r1*r2)",
    KORANYI_G,
    KORANYI_F,
    "sqrt(r1)*log(1+r2) - exp(-r1)",
    "-(r1 - 2.5e-1)^2",
    "2^3^2 - r1/r2/r1",
]


@pytest.mark.parametrize("source", SOURCES)
def test_canonical_text_reparses_to_the_same_function(source):
    f = parse(source, 2)
    g = parse(f.canonical(), 2)
    assert g.body == f.body
    assert g.canonical() == f.canonical()
    rng = np.random.default_rng(0)
    for point in rng.uniform(0.1, 3.0, size=(20, 2)):
        assert g.evaluate(point) == f.evaluate(point)


leaves = st.sampled_from(["r1", "r2", "2", "0.5", "3e-1"])
expressions = st.recursive(
    leaves,
    lambda inner: st.one_of(
        st.tuples(inner, st.sampled_from(["+", "-", "*", "/", "^"]), inner).map(
            lambda t: f"({t[0]}{t[1]}{t[2]})"
        ),
        inner.map(lambda e: f"-{e}"),
        inner.map(lambda e: f"sqrt({e})"),
    ),
    max_leaves=8,
)


@settings(max_examples=100, deadline=None)
@given(expressions)
def test_render_is_a_fixpoint(source):
    rendered = parse(source, 2).canonical()
    assert parse(rendered, 2).canonical() == rendered


def test_freeze_fixes_other_variables():
    f = parse("r1*r2 + r3", 3, (POSITIVE, NONNEGATIVE, POSITIVE))
    section = f.freeze(2, (1.0, 5.0, 2.0))
    assert section.arity == 1
    assert section.domain == (NONNEGATIVE,)
    assert section.evaluate((3.0,)) == pytest.approx(5.0)
    assert parse(section.source, 1).evaluate((3.0,)) == pytest.approx(5.0)
    with pytest.raises(UnknownVariableError):
        f.freeze(4, (1.0, 1.0, 1.0))


@pytest.mark.parametrize(
    "text, interval",
    [
        ("(0,inf)", POSITIVE),
        ("[0, inf)", NONNEGATIVE),
        ("(-inf,inf)", REAL_LINE),
        ("[0,1)", Interval(0.0, 1.0, True, False)),
        ("]0,1[", Interval(0.0, 1.0, False, False)),
        ("[0,inf]", NONNEGATIVE),
    ],
)
def test_interval_parse(text, interval):
    assert Interval.parse(text) == interval


def test_interval_parse_errors():
    with pytest.raises(ExpressionError):
        Interval.parse("0,1")
    with pytest.raises(ExpressionError):
        Interval.parse("(1,0)")
    with pytest.raises(ExpressionError):
        Interval.parse("(nan,1)")
    with pytest.raises(ExpressionError):
        Interval.parse("(0;1)")


def test_interval_parse_signed_endpoints():
    assert Interval.parse(" ( -1e-3 , 2.5 ] ") == Interval(-1e-3, 2.5, False, True)
    assert Interval.parse("[-inf,+inf]") == REAL_LINE


@pytest.mark.parametrize(
    "text, value",
    [("constant(2.5)", 2.5), (" constant( -1 ) ", -1.0), ("constant(1e-3)", 1e-3)],
)
def test_parse_constant(text, value):
    assert parse_constant(text) == value


@pytest.mark.parametrize("text", ["constant(abc)", "constant()", "r1", "constants(1)"])
def test_parse_constant_other_shapes(text):
    assert parse_constant(text) is None


def test_parse_constant_rejects_overflow():
    with pytest.raises(ExpressionSyntaxError):
        parse_constant("constant(1e999)")


def test_interval_text_round_trip():
    for interval in (POSITIVE, NONNEGATIVE, REAL_LINE, Interval(0.0, 1.0, True, False)):
        assert Interval.parse(str(interval)) == interval


def test_interval_admit_clamps_closed_endpoints():
    values = NONNEGATIVE.admit(np.array([-1e-12, 1.0]), 1, slack=1e-9)
    np.testing.assert_array_equal(values, [0.0, 1.0])
    with pytest.raises(SpectrumOutsideDomainError) as info:
        POSITIVE.admit(np.array([-1e-12, 1.0]), 2, slack=1e-9)
    assert info.value.variable == 2
    assert not Interval(0.0, 1.0).contains(1.0)
    assert math.isinf(REAL_LINE.upper)


def test_parse_domain():
    assert parse_domain(None, 2) == (POSITIVE, POSITIVE)
    assert parse_domain("[0,inf)", 3) == (NONNEGATIVE,) * 3
    assert parse_domain("(0,inf);[0,1)", 2) == (POSITIVE, Interval(0.0, 1.0, True, False))
    with pytest.raises(ExpressionError):
        parse_domain("(0,1);(0,2);(0,3)", 2)
