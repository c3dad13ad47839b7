# =============================================================================
# Linopen Control Systems
# =============================================================================
#
# Parsed control systems x' = f(x, u) (continuous mode) or
# x_{k+1} = f(x_k, u_k) (discrete mode), their evaluation and their
# linearization at the equilibrium by forward-mode differentiation.
#
import logging
import numpy as np
from collections import namedtuple

from linopen.exceptions import (
    SystemValidationError,
    DimensionError,
    DivisionByZeroError,
    EvaluationError,
)
from linopen.expr.nodes import Division, compile_components, vectorize_components
from linopen.numlin import MAX_DIMENSION
from linopen.utils import halton_ball_points

logger = logging.getLogger(__name__)

CONTINUOUS = "continuous"
DISCRETE = "discrete"
MODES = (CONTINUOUS, DISCRETE)

EQUILIBRIUM_TOLERANCE = 1e-9
SINGULARITY_TOLERANCE = 1e-6

# Radius of the ball around the equilibrium where local behavior is probed
DEFAULT_DELTA = 0.05


class SystemSpec(object):
    """
    Immutable control system built from n expressions in the state
    variables x1..xn and the control variables u1..um.

    Args:
        mode (str): either "continuous" or "discrete".
        components (list): n expression nodes, one per state equation.
        equilibrium_x (array_like): equilibrium state, of length n.
        equilibrium_u (array_like): equilibrium control, of length m.
        m (int, optional): control dimension. Defaults to the length of
            `equilibrium_u`.
    """

    __slots__ = (
        "n",
        "m",
        "mode",
        "components",
        "equilibrium_x",
        "equilibrium_u",
        "__field",
        "__batch_field",
    )

    def __init__(self, mode, components, equilibrium_x, equilibrium_u, m=None):
        if mode not in MODES:
            raise SystemValidationError(
                'unknown mode "%s", expecting one of %s'
                % (mode, ", ".join('"%s"' % name for name in MODES))
            )

        components = tuple(components)
        equilibrium_x = np.array(equilibrium_x, dtype=float).reshape(-1)
        equilibrium_u = np.array(equilibrium_u, dtype=float).reshape(-1)

        n = len(components)

        if m is None:
            m = equilibrium_u.shape[0]

        if n < 1:
            raise SystemValidationError("a system needs at least one state")

        if m < 1:
            raise SystemValidationError("a system needs at least one control")

        if n > MAX_DIMENSION:
            raise DimensionError(
                "systems are limited to %i states but got %i" % (MAX_DIMENSION, n)
            )

        if equilibrium_x.shape[0] != n:
            raise SystemValidationError(
                "equilibrium state has %i entries but the system has %i states"
                % (equilibrium_x.shape[0], n)
            )

        if equilibrium_u.shape[0] != m:
            raise SystemValidationError(
                "equilibrium control has %i entries but the system has %i controls"
                % (equilibrium_u.shape[0], m)
            )

        if not np.all(np.isfinite(np.concatenate([equilibrium_x, equilibrium_u]))):
            raise SystemValidationError("equilibrium should only hold finite values")

        for i, component in enumerate(components):
            if component.max_state_index() > n:
                raise SystemValidationError(
                    "f%i uses x%i but the system only has %i states"
                    % (i + 1, component.max_state_index(), n)
                )

            if component.max_control_index() > m:
                raise SystemValidationError(
                    "f%i uses u%i but the system only has %i controls"
                    % (i + 1, component.max_control_index(), m)
                )

        equilibrium_x.setflags(write=False)
        equilibrium_u.setflags(write=False)

        self.n = n
        self.m = m
        self.mode = mode
        self.components = components
        self.equilibrium_x = equilibrium_x
        self.equilibrium_u = equilibrium_u
        self.__field = compile_components(components)
        self.__batch_field = vectorize_components(components)

        residual = self.equilibrium_residual()

        if not residual <= EQUILIBRIUM_TOLERANCE:
            raise SystemValidationError(
                "(x*, u*) is not %s: residual is %g"
                % (
                    "an equilibrium" if mode == CONTINUOUS else "a fixed point",
                    residual,
                )
            )

    def __repr__(self) -> str:
        return "<SystemSpec mode={mode!r} n={n!r} m={m!r}>".format(
            mode=self.mode, n=self.n, m=self.m
        )

    @property
    def is_continuous(self) -> bool:
        return self.mode == CONTINUOUS

    def field(self, x, u):
        """
        Compiled evaluation of f, used by simulation loops.
        """
        return self.__field(x, u)

    def batch_field(self, X, U):
        """
        Evaluation of f on batches: X is (n, k), U is (m, k) and the result
        is (n, k), with non-finite entries where f is singular.
        """
        return self.__batch_field(X, U)

    def equilibrium_residual(self) -> float:
        value = evaluate(self, self.equilibrium_x, self.equilibrium_u)

        if self.mode == DISCRETE:
            value = value - self.equilibrium_x

        return float(np.linalg.norm(value))

    def unparse(self):
        return [component.unparse() for component in self.components]


def evaluate(system: SystemSpec, x, u):
    """
    Function evaluating the vector field f of the given system at (x, u).

    Args:
        system (SystemSpec): target system.
        x (array_like): state, of length n.
        u (array_like): control, of length m.

    Returns:
        np.ndarray: f(x, u).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)

    if x.shape[0] != system.n:
        raise ValueError("x should have %i entries but has %i" % (system.n, x.shape[0]))

    if u.shape[0] != system.m:
        raise ValueError("u should have %i entries but has %i" % (system.m, u.shape[0]))

    return np.array([c.evaluate(x, u) for c in system.components], dtype=float)


class Linearization(namedtuple("Linearization", ("A", "B"))):
    __slots__ = ()

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def stacked(self):
        """
        The n x (n + m) matrix [A | B].
        """
        return np.hstack([self.A, self.B])


def jacobian(system: SystemSpec, x=None, u=None) -> Linearization:
    """
    Function returning the partial Jacobians A = df/dx and B = df/du of the
    given system, by forward-mode derivative propagation through each
    expression.

    Args:
        system (SystemSpec): target system.
        x (array_like, optional): state at which to differentiate. Defaults
            to the equilibrium state.
        u (array_like, optional): control at which to differentiate. Defaults
            to the equilibrium control.

    Returns:
        Linearization: the (A, B) pair.
    """
    x = system.equilibrium_x if x is None else np.asarray(x, dtype=float)
    u = system.equilibrium_u if u is None else np.asarray(u, dtype=float)

    n, m = system.n, system.m

    rows = []

    for i, component in enumerate(system.components):
        try:
            _, gradient = component.forward(x, u)
        except DivisionByZeroError as e:
            raise DivisionByZeroError(
                "f%i is not differentiable at the requested point: %s" % (i + 1, e)
            )

        rows.append(gradient)

    J = np.vstack(rows)

    A = J[:, :n].copy()
    B = J[:, n : n + m].copy()

    logger.debug("linearized %r: A=%s B=%s", system, A.tolist(), B.tolist())

    return Linearization(A, B)


def is_linear(system: SystemSpec, radius: float = 1.0, samples: int = 16) -> bool:
    """
    Function returning whether the Jacobian of the given system is constant on
    sampled points around the equilibrium, i.e. whether f is affine.
    """
    reference = jacobian(system)
    center = np.concatenate([system.equilibrium_x, system.equilibrium_u])

    for point in halton_ball_points(center, radius, samples):
        try:
            other = jacobian(system, point[: system.n], point[system.n :])
        except DivisionByZeroError:
            return False

        scale = 1 + np.max(np.abs(reference.stacked))

        if np.max(np.abs(other.stacked - reference.stacked)) > 1e-9 * scale:
            return False

    return True


def singularity_warnings(
    system: SystemSpec, radius: float = DEFAULT_DELTA, samples: int = 64
):
    """
    Function returning warnings for every division whose denominator vanishes
    in the ball of given radius around the equilibrium pair, i.e. comes close
    to zero or changes sign on its sampled points.

    Args:
        system (SystemSpec): target system.
        radius (float, optional): radius of the inspected ball. Defaults to
            0.05.
        samples (int, optional): number of sampled points. Defaults to 64.

    Returns:
        list: warning messages.
    """
    center = np.concatenate([system.equilibrium_x, system.equilibrium_u])
    points = [center] + list(halton_ball_points(center, radius, samples))

    warnings = []

    for i, component in enumerate(system.components):
        for node in component.walk():
            if not isinstance(node, Division):
                continue

            denominator = node.right

            try:
                values = np.array(
                    [denominator.evaluate(p[: system.n], p[system.n :]) for p in points]
                )
            except EvaluationError:
                values = np.zeros(1)

            # A continuous denominator changing sign vanishes in between
            vanishes = np.min(np.abs(values)) < SINGULARITY_TOLERANCE or (
                np.min(values) < 0 < np.max(values)
            )

            if vanishes:
                message = (
                    'f%i divides by "%s", which vanishes near the equilibrium '
                    "(within radius %g)" % (i + 1, denominator.unparse(), radius)
                )
                logger.warning(message)
                warnings.append(message)

    return warnings
