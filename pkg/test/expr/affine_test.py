# =============================================================================
# Linopen Control-Affine Structure Unit Tests
# =============================================================================
import numpy as np
from pytest import raises, approx

from linopen.expr import parse_expr, detect_control_affine, span_dimension_estimate
from linopen.expr.affine import reconstructs
from linopen.read import parse_system
from linopen.utils import halton_ball_points


def make_system(*components, n=None, m=1):
    n = len(components) if n is None else n

    lines = [
        "mode continuous",
        "states %i" % n,
        "controls %i" % m,
        "eq x = %s" % " ".join(["0"] * n),
        "eq u = %s" % " ".join(["0"] * m),
    ]

    lines.extend("f%i = %s" % (i + 1, c) for i, c in enumerate(components))

    return parse_system("\n".join(lines))


def field_values(field, x):
    return [node.evaluate(x, ()) for node in field]


class TestDetectControlAffine(object):
    def test_affine(self):
        system = make_system("x1^3 + x2 * u1", "sin(x1) - 2 * u1 + u2 / 4", m=2)
        fields = detect_control_affine(system)

        assert len(fields) == 3

        for node in (n for field in fields for n in field):
            assert not node.depends_on_control()

        x = np.array([0.3, -0.7])

        assert field_values(fields[0], x) == approx([0.3**3, np.sin(0.3)])
        assert field_values(fields[1], x) == approx([-0.7, -2.0])
        assert field_values(fields[2], x) == approx([0.0, 0.25])

    def test_reconstruction(self):
        system = make_system("(x1 + u1) * x2 - u2", "-(x2 - u1 * x1^2)", m=2)
        fields = detect_control_affine(system)

        assert reconstructs(system, fields)

        for point in halton_ball_points(np.zeros(4), 1.0, 100):
            x, u = point[:2], point[2:]

            expected = [c.evaluate(x, u) for c in system.components]
            rebuilt = np.array(field_values(fields[0], x))

            for i in range(2):
                rebuilt = rebuilt + u[i] * np.array(field_values(fields[i + 1], x))

            assert list(rebuilt) == approx(expected, rel=1e-12, abs=1e-12)

    def test_reconstruction_mismatch(self):
        system = make_system("x1 + x2 * u1", "u1", m=1)
        fields = detect_control_affine(system)

        wrong = [fields[0], [parse_expr("x1"), parse_expr("1")]]

        assert not reconstructs(system, wrong)

    def test_not_affine(self):
        assert detect_control_affine(make_system("u1^3")) is None
        assert detect_control_affine(make_system("x1 + sin(u1)")) is None
        assert detect_control_affine(make_system("u1 * u2", m=2)) is None
        assert detect_control_affine(make_system("x1 / (1 + u1)")) is None

        # No symbolic simplification
        assert detect_control_affine(make_system("u1 * u1 - u1 * u1")) is None

    def test_unit_power(self):
        fields = detect_control_affine(make_system("(x1 * u1)^1"))

        assert field_values(fields[1], [2.0]) == [2.0]


class TestSpanDimensionEstimate(object):
    def test_errors(self):
        fields = [[parse_expr("1")]]

        with raises(ValueError, match="radius"):
            span_dimension_estimate(fields, [0.0], radius=0)

        with raises(ValueError, match="samples"):
            span_dimension_estimate(
                [[parse_expr("1"), parse_expr("0")]], [0, 0], samples=1
            )

        assert span_dimension_estimate([], [0.0, 0.0]) == 0

    def test_constant_fields(self):
        one, zero = parse_expr("1"), parse_expr("0")

        assert span_dimension_estimate([[one, zero], [zero, one]], [0, 0]) == 2
        assert span_dimension_estimate([[one, zero], [one, zero]], [0, 0]) == 1

    def test_nonholonomic_integrator(self):
        system = make_system("u1", "u2", "x2 * u1 - x1 * u2", m=2)
        fields = detect_control_affine(system)

        # Drift vanishes, g1 and g2 vary with the state so their sampled
        # values fill the whole space
        assert span_dimension_estimate(fields[1:], system.equilibrium_x) == 3
        assert span_dimension_estimate(fields[:1], system.equilibrium_x) == 0
