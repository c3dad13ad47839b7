# =============================================================================
# Linopen Feedback Laws Unit Tests
# =============================================================================
import numpy as np
from pytest import raises, approx

from test.utils import load_system

from linopen.exceptions import UnknownIdentifierError, ExpressionSyntaxError
from linopen.expr import parse_expr
from linopen.feedback import (
    LinearFeedback,
    ExpressionFeedback,
    parse_feedback,
    gain_to_expressions,
    is_recognizably_smooth,
)


class TestLinearFeedback(object):
    def test_errors(self):
        with raises(ValueError, match="1 x 2"):
            LinearFeedback([[1.0, 2.0, 3.0]], [0, 0], [0])

    def test_control(self):
        feedback = LinearFeedback([[-1.0, -2.0]], [1.0, 0.0], [0.5])
        X = np.array([[1.0, 2.0], [0.0, 1.0]])

        assert feedback.control(X).tolist() == [[0.5, -2.5]]
        assert feedback.n == 2
        assert feedback.m == 1
        assert feedback.is_smooth

    def test_for_system(self):
        feedback = LinearFeedback.for_system(load_system("planar"), [-1, -1])

        assert feedback.K.tolist() == [[-1, -1]]
        assert "K = [[-1.0, -1.0]]" in feedback.describe()


class TestExpressionFeedback(object):
    def test_parse(self):
        feedback = parse_feedback("-x1 - x2", 2, 1)

        assert feedback.describe() == "u1 = -x1 - x2"
        assert feedback.m == 1
        assert feedback.n == 2
        assert feedback.is_smooth

        X = np.array([[1.0, 0.5], [2.0, -0.5]])

        assert feedback.control(X).tolist() == [[-3.0, 0.0]]

    def test_multiple_components(self):
        feedback = parse_feedback("-x1; -x2^3", 2, 2)

        assert feedback.m == 2
        assert feedback.describe() == "u1 = -x1; u2 = (-x2)^3.0"

    def test_errors(self):
        with raises(ValueError, match="2 components"):
            parse_feedback("-x1", 2, 2)

        with raises(UnknownIdentifierError) as info:
            parse_feedback("-x1 + u1", 1, 1)

        assert info.value.offset == 6

        with raises(ExpressionSyntaxError):
            parse_feedback("-x1 +", 1, 1)

        with raises(ValueError, match="only has 1 states"):
            parse_feedback("-x2", 1, 1)

        with raises(ValueError, match="uses a control"):
            ExpressionFeedback([parse_expr("u1")])

        with raises(ValueError, match="at least one"):
            ExpressionFeedback([])

    def test_smoothness(self):
        assert is_recognizably_smooth(parse_expr("-x1^3 + sin(x2)"))
        assert is_recognizably_smooth(parse_expr("x1^0"))
        assert not is_recognizably_smooth(parse_expr("x1 / (1 + x2^2)"))
        assert not is_recognizably_smooth(parse_expr("-x1^0.5"))

        assert not parse_feedback("-x1^0.3333", 1, 1).is_smooth


class TestGainToExpressions(object):
    def test_at_origin(self):
        expressions = gain_to_expressions([[-2.0, -3.0]], [0, 0], [0])

        assert expressions == ["-2.0*x1 + -3.0*x2"]

        feedback = parse_feedback(expressions[0], 2, 1)
        X = np.array([[0.3], [-0.2]])

        assert feedback.control(X) == approx(np.array([[-2.0 * 0.3 + 3.0 * 0.2]]))

    def test_shifted_equilibrium(self):
        expressions = gain_to_expressions([[1.0, 0.0], [0.0, 2.0]], [1.0, -0.5], [0.25, 0])

        assert expressions == ["0.25 + 1.0*(x1 - 1.0)", "2.0*(x2 + 0.5)"]

    def test_zero_gain(self):
        assert gain_to_expressions([[0.0]], [0.0], [0.0]) == ["0"]

    def test_matches_linear_feedback(self):
        K = np.array([[-1.5, 0.25, 2.0]])
        x_eq, u_eq = [0.5, 0.0, -1.0], [3.0]

        linear = LinearFeedback(K, x_eq, u_eq)
        expression = parse_feedback(gain_to_expressions(K, x_eq, u_eq)[0], 3, 1)

        X = np.array([[0.1, 1.0], [0.2, -2.0], [0.3, 0.5]])

        assert expression.control(X) == approx(linear.control(X))
