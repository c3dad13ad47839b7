# =============================================================================
# Linopen Expression Nodes Unit Tests
# =============================================================================
import numpy as np
from pytest import raises, approx

from linopen.exceptions import DivisionByZeroError, FunctionDomainError
from linopen.expr import (
    parse_expr,
    compile_components,
    vectorize_components,
    FunctionCall,
    StateVariable,
)

SMOOTH_EXPRESSIONS = [
    "x1^3 + x2",
    "sin(x1) * cos(x2) + u1",
    "exp(0.5 * x1) - tanh(x2 * u1)",
    "x1 / (2 + x2^2) + u1^2",
    "-x2^2 + 0.1 * x1 * u1",
    "(x1 + 3)^0.5",
]


def finite_difference(node, x, u, h=1e-6):
    z = np.concatenate([x, u])
    n = len(x)
    gradient = np.zeros(len(z))

    for i in range(len(z)):
        plus, minus = z.copy(), z.copy()
        plus[i] += h
        minus[i] -= h

        gradient[i] = (
            node.evaluate(plus[:n], plus[n:]) - node.evaluate(minus[:n], minus[n:])
        ) / (2 * h)

    return gradient


class TestExprNodes(object):
    def test_evaluate(self):
        assert parse_expr("x1^3 + x2").evaluate([2.0, 1.0], []) == 9.0
        assert parse_expr("x1 * u1 - 4 / x2").evaluate([3.0, 2.0], [2.0]) == 4.0
        assert parse_expr("exp(0)").evaluate([], []) == 1.0

    def test_evaluation_errors(self):
        with raises(DivisionByZeroError):
            parse_expr("1 / x1").evaluate([0.0], [])

        with raises(DivisionByZeroError):
            parse_expr("x1^(-2)").evaluate([0.0], [])

        with raises(FunctionDomainError, match="real domain"):
            parse_expr("x1^0.5").evaluate([-1.0], [])

        with raises(FunctionDomainError):
            parse_expr("exp(x1)").evaluate([1000.0], [])

    def test_forward_matches_finite_differences(self):
        rng = np.random.default_rng(7)

        for text in SMOOTH_EXPRESSIONS:
            node = parse_expr(text)

            for _ in range(10):
                x = rng.uniform(-1, 1, 2)
                u = rng.uniform(-1, 1, 1)

                value, gradient = node.forward(x, u)

                assert value == approx(node.evaluate(x, u))
                assert gradient == approx(finite_difference(node, x, u), abs=1e-6)

    def test_forward_power_at_zero(self):
        value, gradient = parse_expr("x1^3").forward([0.0], [])

        assert value == 0.0
        assert list(gradient) == [0.0]

        with raises(DivisionByZeroError, match="not differentiable"):
            parse_expr("x1^0.5").forward([0.0], [])

    def test_compile_and_vectorize(self):
        nodes = [parse_expr(text) for text in SMOOTH_EXPRESSIONS]

        field = compile_components(nodes)
        batch = vectorize_components(nodes)

        X = np.array([[0.1, -0.3, 0.7], [0.2, 0.5, -0.4]])
        U = np.array([[1.0, -0.5, 0.0]])

        values = batch(X, U)

        assert values.shape == (len(nodes), 3)

        for k in range(3):
            assert values[:, k] == approx(field(X[:, k], U[:, k]))

            for i, node in enumerate(nodes):
                assert values[i, k] == approx(node.evaluate(X[:, k], U[:, k]))

    def test_vectorize_constants_broadcast(self):
        batch = vectorize_components([parse_expr("1.5"), parse_expr("x1")])
        values = batch(np.array([[1.0, 2.0]]), np.zeros((0, 2)))

        assert values.tolist() == [[1.5, 1.5], [1.0, 2.0]]

    def test_vectorize_singularities_do_not_raise(self):
        batch = vectorize_components([parse_expr("1 / x1")])
        values = batch(np.array([[0.0, 2.0]]), np.zeros((0, 2)))

        assert not np.isfinite(values[0, 0])
        assert values[0, 1] == 0.5

    def test_equality_and_walk(self):
        assert parse_expr("x1 + x2") == parse_expr("x1+x2")
        assert parse_expr("x1 + x2") != parse_expr("x2 + x1")
        assert len({parse_expr("sin(x1)"), parse_expr("sin( x1 )")}) == 1

        kinds = [node.kind for node in parse_expr("sin(x1) * 2").walk()]

        assert kinds == ["mul", "function", "state", "constant"]

    def test_unknown_function(self):
        with raises(ValueError, match="unknown function"):
            FunctionCall("log", StateVariable(1))
