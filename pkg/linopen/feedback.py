# =============================================================================
# Linopen Feedback Laws
# =============================================================================
#
# Stationary feedback laws u = u(x) driving closed-loop simulations: either a
# linear gain around the equilibrium, or m expressions in the state variables
# written in the system-definition language.
#
import numpy as np

from linopen.exceptions import UnknownIdentifierError
from linopen.expr.nodes import Division, Power, vectorize_components
from linopen.expr.parser import parse_expr, tokenize, VARIABLE_RE


class LinearFeedback(object):
    """
    Linear feedback u = u* + K (x - x*), K being an m x n gain with the
    u = Kx sign convention.

    Args:
        K (array_like): m x n gain.
        equilibrium_x (array_like): equilibrium state x*.
        equilibrium_u (array_like): equilibrium control u*.
    """

    __slots__ = ("K", "equilibrium_x", "equilibrium_u")

    is_smooth = True

    def __init__(self, K, equilibrium_x, equilibrium_u) -> None:
        K = np.array(K, dtype=float)

        if K.ndim == 1:
            K = K.reshape(1, -1)

        equilibrium_x = np.asarray(equilibrium_x, dtype=float).reshape(-1)
        equilibrium_u = np.asarray(equilibrium_u, dtype=float).reshape(-1)

        if K.shape != (equilibrium_u.shape[0], equilibrium_x.shape[0]):
            raise ValueError(
                "gain should be %i x %i but is %i x %i"
                % (equilibrium_u.shape[0], equilibrium_x.shape[0], *K.shape)
            )

        self.K = K
        self.equilibrium_x = equilibrium_x
        self.equilibrium_u = equilibrium_u

    @classmethod
    def for_system(cls, system, K):
        return cls(K, system.equilibrium_x, system.equilibrium_u)

    @property
    def n(self) -> int:
        return self.K.shape[1]

    @property
    def m(self) -> int:
        return self.K.shape[0]

    def control(self, X):
        """
        Method returning the controls of a (n, k) batch of states as a
        (m, k) array.
        """
        return self.equilibrium_u[:, None] + self.K @ (X - self.equilibrium_x[:, None])

    def describe(self) -> str:
        return "u = u* + K(x - x*), K = %s" % repr(self.K.tolist())

    def __repr__(self) -> str:
        return "<LinearFeedback K=%s>" % repr(self.K.tolist())


def is_recognizably_smooth(node) -> bool:
    for child in node.walk():
        if isinstance(child, Division):
            return False

        if isinstance(child, Power):
            c = child.exponent

            if c < 1 and c != 0:
                return False

    return True


class ExpressionFeedback(object):
    """
    Feedback given by m expressions in the state variables x1..xn, each one
    being the value of a control.

    Args:
        components (list): m expression nodes free of control variables.
        n (int, optional): state dimension. Defaults to the largest state
            index used.
    """

    __slots__ = ("components", "n", "is_smooth", "__control")

    def __init__(self, components, n=None) -> None:
        components = tuple(components)

        if not components:
            raise ValueError("a feedback needs at least one component")

        for i, component in enumerate(components):
            if component.depends_on_control():
                raise ValueError("feedback component %i uses a control" % (i + 1))

        used = max(c.max_state_index() for c in components)

        if n is None:
            n = max(used, 1)
        elif used > n:
            raise ValueError(
                "feedback uses x%i but the system only has %i states" % (used, n)
            )

        self.components = components
        self.n = n

        # Division and fractional powers may break C1 at some point
        self.is_smooth = all(is_recognizably_smooth(c) for c in components)

        self.__control = vectorize_components(components)

    @property
    def m(self) -> int:
        return len(self.components)

    def control(self, X):
        # Expressions index their variables as u1.., unused here
        return self.__control(X, np.zeros((0,) + np.shape(X)[1:]))

    def describe(self) -> str:
        return "; ".join(
            "u%i = %s" % (i + 1, c.unparse()) for i, c in enumerate(self.components)
        )

    def __repr__(self) -> str:
        return "<ExpressionFeedback %s>" % self.describe()


def parse_feedback(text: str, n: int, m: int) -> ExpressionFeedback:
    """
    Function parsing a feedback law written as m expressions in x1..xn
    separated by semicolons, e.g. "-x1 - x2".

    Args:
        text (str): feedback expressions.
        n (int): state dimension of the target system.
        m (int): control dimension of the target system.

    Returns:
        ExpressionFeedback: the parsed feedback.

    Example:
        from linopen import parse_feedback

        parse_feedback("-x1 - x2", 2, 1).describe()
        >>> "u1 = -x1 - x2"
    """
    parts = text.split(";")

    if len(parts) != m:
        raise ValueError(
            "feedback should have %i components separated by ';' but has %i"
            % (m, len(parts))
        )

    components = []

    for part in parts:
        for token in tokenize(part):
            match = VARIABLE_RE.match(token.text) if token.kind == "name" else None

            if match is not None and match.group(1) == "u":
                raise UnknownIdentifierError(
                    'feedback cannot depend on control "%s"' % token.text,
                    offset=token.offset,
                )

        components.append(parse_expr(part))

    return ExpressionFeedback(components, n=n)


def gain_to_expressions(K, equilibrium_x, equilibrium_u):
    """
    Function rendering a linear gain as feedback expressions, e.g.
    "-2.0*x1 + -3.0*x2", which `parse_feedback` reads back.

    Args:
        K (array_like): m x n gain.
        equilibrium_x (array_like): equilibrium state.
        equilibrium_u (array_like): equilibrium control.

    Returns:
        list: m expression strings.
    """
    feedback = LinearFeedback(K, equilibrium_x, equilibrium_u)
    expressions = []

    for i, row in enumerate(feedback.K):
        terms = []

        if feedback.equilibrium_u[i] != 0:
            terms.append(repr(float(feedback.equilibrium_u[i])))

        for j, k in enumerate(row):
            if k == 0:
                continue

            offset = feedback.equilibrium_x[j]

            if offset == 0:
                variable = "x%i" % (j + 1)
            elif offset > 0:
                variable = "(x%i - %r)" % (j + 1, float(offset))
            else:
                variable = "(x%i + %r)" % (j + 1, float(-offset))

            terms.append("%r*%s" % (float(k), variable))

        expressions.append(" + ".join(terms) if terms else "0")

    return expressions
