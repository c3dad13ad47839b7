# =============================================================================
# Linopen Control-Affine Structure
# =============================================================================
#
# Structural detection of control-affine vector fields
# f(x, u) = g0(x) + sum_i gi(x) ui, and numerical estimation of the dimension
# of the span of such a family of fields around the equilibrium.
#
import logging
import numpy as np

from linopen.exceptions import EvaluationError
from linopen.expr.nodes import (
    Constant,
    ControlVariable,
    Negation,
    Addition,
    Subtraction,
    Multiplication,
    Division,
    Power,
)
from linopen.numlin import numerical_rank
from linopen.utils import halton_ball_points

logger = logging.getLogger(__name__)

ZERO = Constant(0.0)

RECONSTRUCTION_SAMPLES = 100
RECONSTRUCTION_RADIUS = 1.0
RECONSTRUCTION_TOLERANCE = 1e-12

# Coefficients are kept as None when identically zero and as ONE when the
# control appears bare, so that no spurious nodes are created.
ONE = object()


def add(a, b):
    if a is None:
        return b

    if b is None:
        return a

    return Addition(materialize(a), materialize(b))


def subtract(a, b):
    if b is None:
        return a

    if a is None:
        return negate(b)

    return Subtraction(materialize(a), materialize(b))


def negate(a):
    if a is None:
        return None

    return Negation(materialize(a))


def scale(coefficient, factor, divide=False):
    """
    Multiplies (or divides) a coefficient by a control-free node.
    """
    if coefficient is None:
        return None

    if coefficient is ONE:
        return Division(Constant(1.0), factor) if divide else factor

    if divide:
        return Division(coefficient, factor)

    return Multiplication(coefficient, factor)


def materialize(a):
    if a is ONE:
        return Constant(1.0)

    return a


def split(node, m: int):
    """
    Returns (drift, coefficients) where coefficients[i] multiplies u(i+1), or
    None when the node is not affine in the controls.
    """
    if not node.depends_on_control():
        return node, [None] * m

    if isinstance(node, ControlVariable):
        coefficients = [None] * m
        coefficients[node.index - 1] = ONE
        return None, coefficients

    if isinstance(node, Negation):
        inner = split(node.operand, m)

        if inner is None:
            return None

        return negate(inner[0]), [negate(c) for c in inner[1]]

    if isinstance(node, (Addition, Subtraction)):
        left = split(node.left, m)
        right = split(node.right, m)

        if left is None or right is None:
            return None

        combine = add if isinstance(node, Addition) else subtract

        return (
            combine(left[0], right[0]),
            [combine(a, b) for a, b in zip(left[1], right[1])],
        )

    if isinstance(node, Multiplication):
        if node.left.depends_on_control() and node.right.depends_on_control():
            return None

        if node.left.depends_on_control():
            controlled, factor = node.left, node.right
        else:
            controlled, factor = node.right, node.left

        inner = split(controlled, m)

        if inner is None:
            return None

        drift = None if inner[0] is None else Multiplication(inner[0], factor)

        return drift, [scale(c, factor) for c in inner[1]]

    if isinstance(node, Division):
        if node.right.depends_on_control():
            return None

        inner = split(node.left, m)

        if inner is None:
            return None

        drift = None if inner[0] is None else Division(inner[0], node.right)

        return drift, [scale(c, node.right, divide=True) for c in inner[1]]

    if isinstance(node, Power) and node.exponent == 1:
        return split(node.left, m)

    # Controls inside functions or non-unit powers
    return None


def detect_control_affine(system):
    """
    Function detecting whether the given system is control-affine, i.e. of
    the form `f(x, u) = g0(x) + sum(gi(x) * ui)`, by reading the structure of
    its expressions. Controls must appear linearly, never multiplied together
    nor inside a function or a non-unit power.

    No symbolic simplification is attempted, so an expression like
    `u1 * u1 - u1 * u1` is reported as not affine.

    Args:
        system (SystemSpec): target system.

    Returns:
        list or None: m + 1 vector fields (g0, g1, ..., gm), each one being a
            list of n expression nodes depending on the state only, or None
            if the system is not control-affine.
    """
    m = system.m
    fields = [[] for _ in range(m + 1)]

    for component in system.components:
        result = split(component, m)

        if result is None:
            return None

        drift, coefficients = result

        fields[0].append(ZERO if drift is None else materialize(drift))

        for i, coefficient in enumerate(coefficients):
            fields[i + 1].append(ZERO if coefficient is None else materialize(coefficient))

    if not reconstructs(system, fields):
        logger.warning("control-affine split of %r does not reconstruct f", system)
        return None

    return fields


def reconstructs(system, fields) -> bool:
    """
    Checks f(x, u) = g0(x) + sum(gi(x) * ui) at deterministic points of the
    ball around the equilibrium, skipping points where f cannot be evaluated.
    """
    n, m = system.n, system.m
    center = np.concatenate([system.equilibrium_x, system.equilibrium_u])
    points = halton_ball_points(center, RECONSTRUCTION_RADIUS, RECONSTRUCTION_SAMPLES)

    for point in points:
        x, u = point[:n], point[n:]

        try:
            expected = np.array([c.evaluate(x, u) for c in system.components])
            terms = [evaluate_field(fields[0], x)] + [
                u[i] * evaluate_field(fields[i + 1], x) for i in range(m)
            ]
        except EvaluationError:
            continue

        with np.errstate(all="ignore"):
            rebuilt = np.sum(terms, axis=0)
            magnitude = np.sum(np.abs(terms), axis=0)
            scale = np.maximum(1.0, np.maximum(np.abs(expected), magnitude))

        if not (np.all(np.isfinite(expected)) and np.all(np.isfinite(rebuilt))):
            continue

        if np.any(np.abs(expected - rebuilt) > RECONSTRUCTION_TOLERANCE * scale):
            return False

    return True


def evaluate_field(field, x):
    return np.array([node.evaluate(x, ()) for node in field], dtype=float)


def span_dimension_estimate(fields, center, radius: float = 0.1, samples=None, tol=None):
    """
    Function estimating the dimension of the span of the given vector fields
    around a point, as the numerical rank of the matrix stacking the values of
    every field at deterministic sample points of the ball.

    Args:
        fields (list): vector fields, each one a list of n expression nodes
            depending on the state only.
        center (array_like): center of the sampled ball, typically the
            equilibrium state.
        radius (float, optional): radius of the sampled ball. Defaults to 0.1.
        samples (int, optional): number of sampled points, at least n.
            Defaults to 4 * n.
        tol (float, optional): rank tolerance. Defaults to the scaled default
            of `numerical_rank`.

    Returns:
        int: estimated dimension, never more than n.
    """
    center = np.asarray(center, dtype=float)
    n = center.shape[0]

    if radius <= 0:
        raise ValueError("radius should be > 0")

    if samples is None:
        samples = 4 * n

    if samples < n:
        raise ValueError("samples should be >= n")

    if not fields:
        return 0

    points = [center] + list(halton_ball_points(center, radius, samples - 1))

    columns = [evaluate_field(field, x) for x in points for field in fields]

    return numerical_rank(np.column_stack(columns), tol=tol)
