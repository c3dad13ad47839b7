# =============================================================================
# Linopen Expression Parser Unit Tests
# =============================================================================
import numpy as np
from pytest import raises

from linopen.exceptions import (
    ExpressionSyntaxError,
    NonConstantExponentError,
    UnknownIdentifierError,
)
from linopen.expr import (
    parse_expr,
    Constant,
    StateVariable,
    ControlVariable,
    Negation,
    Addition,
    Subtraction,
    Multiplication,
    Power,
    FunctionCall,
)
from test.utils import random_expression


class TestParseExpr(object):
    def test_errors(self):
        with raises(TypeError):
            parse_expr(45)

        with raises(ExpressionSyntaxError, match="empty"):
            parse_expr("   ")

    def test_precedence(self):
        assert parse_expr("x1 + x2 * u1") == Addition(
            StateVariable(1), Multiplication(StateVariable(2), ControlVariable(1))
        )

        assert parse_expr("x1 - x2 - x3") == Subtraction(
            Subtraction(StateVariable(1), StateVariable(2)), StateVariable(3)
        )

        assert parse_expr("2 * x1^3") == Multiplication(
            Constant(2), Power(StateVariable(1), 3)
        )

    def test_unary_minus_binds_tighter_than_power(self):
        assert parse_expr("-x1^2") == Power(Negation(StateVariable(1)), 2)
        assert parse_expr("-x1^2").evaluate([3.0], []) == 9.0

    def test_functions(self):
        node = parse_expr("sin(x1) + tanh(u2)")

        assert node == Addition(
            FunctionCall("sin", StateVariable(1)),
            FunctionCall("tanh", ControlVariable(2)),
        )

        assert node.max_state_index() == 1
        assert node.max_control_index() == 2
        assert node.depends_on_control()

    def test_numbers(self):
        assert parse_expr("1.5e-3") == Constant(0.0015)
        assert parse_expr(".5") == Constant(0.5)
        assert parse_expr("x1^(-1)") == Power(StateVariable(1), -1)

    def test_syntax_errors(self):
        with raises(ExpressionSyntaxError) as info:
            parse_expr("x1 + * x2")

        assert info.value.offset == 5
        assert "found \"*\"" in str(info.value)

        with raises(ExpressionSyntaxError, match="end of input"):
            parse_expr("x1 +")

        with raises(ExpressionSyntaxError, match="expected \"\\)\""):
            parse_expr("(x1 + x2")

        with raises(ExpressionSyntaxError, match="expected an operator"):
            parse_expr("x1 x2")

        with raises(ExpressionSyntaxError, match="unexpected character"):
            parse_expr("x1 % 2")

    def test_unknown_identifiers(self):
        with raises(UnknownIdentifierError) as info:
            parse_expr("x1 + y2")

        assert info.value.offset == 5

        with raises(UnknownIdentifierError):
            parse_expr("x0")

        with raises(UnknownIdentifierError):
            parse_expr("log(x1)")

    def test_offsets(self):
        with raises(ExpressionSyntaxError) as info:
            parse_expr("x1 + é")

        assert info.value.offset == 5

        with raises(UnknownIdentifierError) as info:
            parse_expr("x1 + sin(x1) + z")

        assert info.value.offset == 15

    def test_non_constant_exponent(self):
        with raises(NonConstantExponentError) as info:
            parse_expr("x1^x2")

        assert info.value.offset == 3

    def test_unparse_round_trip(self):
        expressions = [
            "x1^3 + x2",
            "-x1^2",
            "x1 - (x2 - x3)",
            "(x1 + x2) * u1",
            "x1 / (x2 * x3)",
            "exp(-x1) * cos(x2 + 1)",
            "x1^(-0.5)",
            "-(x1 + x2)",
        ]

        for text in expressions:
            node = parse_expr(text)
            assert parse_expr(node.unparse()) == node

    def test_unparse_round_trip_random_trees(self):
        rng = np.random.default_rng(7)

        for _ in range(500):
            node = random_expression(rng, 3, 2, depth=4)
            assert parse_expr(node.unparse()) == node

    def test_negative_literals(self):
        assert parse_expr("-2") == Constant(-2)
        assert parse_expr("x1 * -2") == Multiplication(StateVariable(1), Constant(-2))
        assert parse_expr("-(2)") == Negation(Constant(2))

        assert Constant(-2).unparse() == "-2.0"
        assert Negation(Constant(2)).unparse() == "-(2.0)"

        for node in [
            Constant(-2),
            Negation(Constant(2)),
            Power(Constant(-2), 2),
            Power(StateVariable(1), -1),
            Subtraction(StateVariable(1), Constant(-3)),
        ]:
            assert parse_expr(node.unparse()) == node

    def test_out_of_range_numbers(self):
        with raises(ExpressionSyntaxError, match="out of range") as info:
            parse_expr("1e400 * 0 + x1")

        assert info.value.offset == 0

        with raises(ExpressionSyntaxError) as info:
            parse_expr("x1 - 1e999")

        assert info.value.offset == 5

        with raises(ValueError, match="finite"):
            Constant(float("inf"))
