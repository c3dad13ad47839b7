# =============================================================================
# Linopen Expression Nodes
# =============================================================================
#
# Immutable AST nodes of the system-definition expression language. Each node
# knows how to evaluate itself, how to propagate forward-mode derivatives (a
# value and its gradient with respect to the stacked (x, u) inputs) and how
# to print itself back into the grammar.
#
import math
import numpy as np

from linopen.exceptions import DivisionByZeroError, FunctionDomainError

ATOM_PRECEDENCE = 5
POWER_PRECEDENCE = 4
UNARY_PRECEDENCE = 3
PRODUCT_PRECEDENCE = 2
SUM_PRECEDENCE = 1


def unit_gradient(size: int, index: int):
    g = np.zeros(size)
    g[index] = 1.0
    return g


def checked_float(value) -> float:
    if isinstance(value, complex):
        raise FunctionDomainError("expression left the real domain")

    if not math.isfinite(value):
        raise FunctionDomainError("expression evaluated to a non-finite value")

    return float(value)


class ExprNode(object):
    """
    Abstract expression node.
    """

    __slots__ = ("children",)

    kind = None
    precedence = ATOM_PRECEDENCE

    def __init__(self, *children) -> None:
        self.children = tuple(children)

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self._key() == other._key()
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key(), self.children))

    def __repr__(self) -> str:
        return "<%s %s>" % (type(self).__name__, self.unparse())

    def _key(self):
        return None

    def walk(self):
        yield self

        for child in self.children:
            yield from child.walk()

    def max_state_index(self) -> int:
        return max(
            (n.index for n in self.walk() if isinstance(n, StateVariable)), default=0
        )

    def max_control_index(self) -> int:
        return max(
            (n.index for n in self.walk() if isinstance(n, ControlVariable)),
            default=0,
        )

    def depends_on_control(self) -> bool:
        return any(isinstance(n, ControlVariable) for n in self.walk())

    def evaluate(self, x, u) -> float:
        raise NotImplementedError

    def forward(self, x, u):
        """
        Method returning the value of the node along with its gradient with
        respect to the stacked (x, u) variables.
        """
        raise NotImplementedError

    def compile(self):
        """
        Method returning a closure `(x, u) -> float` equivalent to `evaluate`
        but without the tree dispatch cost, used in integration loops.
        """
        raise NotImplementedError

    def vectorize(self):
        """
        Method returning a closure evaluating the node on batches, where `x`
        and `u` are arrays whose rows are the variables and whose columns are
        the samples. Numpy semantics apply: singular points yield non-finite
        values instead of raising.
        """
        raise NotImplementedError

    def unparse(self) -> str:
        raise NotImplementedError

    def unparse_as_operand(self, minimum_precedence: int) -> str:
        text = self.unparse()

        if self.precedence < minimum_precedence:
            return "(" + text + ")"

        return text


class Constant(ExprNode):
    __slots__ = ("value",)

    kind = "constant"

    def __init__(self, value: float) -> None:
        super().__init__()
        value = float(value)

        if not math.isfinite(value):
            raise ValueError("constants should be finite, got %r" % value)

        self.value = value

    @property
    def precedence(self):
        return ATOM_PRECEDENCE if self.value >= 0 else UNARY_PRECEDENCE

    def _key(self):
        return self.value

    def evaluate(self, x, u) -> float:
        return self.value

    def forward(self, x, u):
        return self.value, np.zeros(len(x) + len(u))

    def compile(self):
        value = self.value
        return lambda x, u: value

    def vectorize(self):
        return self.compile()

    def unparse(self) -> str:
        return repr(self.value)


class StateVariable(ExprNode):
    __slots__ = ("index",)

    kind = "state"

    def __init__(self, index: int) -> None:
        super().__init__()
        self.index = index

    def _key(self):
        return self.index

    def evaluate(self, x, u) -> float:
        return float(x[self.index - 1])

    def forward(self, x, u):
        return float(x[self.index - 1]), unit_gradient(len(x) + len(u), self.index - 1)

    def compile(self):
        i = self.index - 1
        return lambda x, u: x[i]

    def vectorize(self):
        return self.compile()

    def unparse(self) -> str:
        return "x%i" % self.index


class ControlVariable(ExprNode):
    __slots__ = ("index",)

    kind = "control"

    def __init__(self, index: int) -> None:
        super().__init__()
        self.index = index

    def _key(self):
        return self.index

    def evaluate(self, x, u) -> float:
        return float(u[self.index - 1])

    def forward(self, x, u):
        return float(u[self.index - 1]), unit_gradient(
            len(x) + len(u), len(x) + self.index - 1
        )

    def compile(self):
        i = self.index - 1
        return lambda x, u: u[i]

    def vectorize(self):
        return self.compile()

    def unparse(self) -> str:
        return "u%i" % self.index


class Negation(ExprNode):
    __slots__ = ()

    kind = "neg"
    precedence = UNARY_PRECEDENCE

    def __init__(self, operand: ExprNode) -> None:
        super().__init__(operand)

    @property
    def operand(self):
        return self.children[0]

    def evaluate(self, x, u) -> float:
        return -self.operand.evaluate(x, u)

    def forward(self, x, u):
        value, gradient = self.operand.forward(x, u)
        return -value, -gradient

    def compile(self):
        operand = self.operand.compile()
        return lambda x, u: -operand(x, u)

    def vectorize(self):
        operand = self.operand.vectorize()
        return lambda x, u: -operand(x, u)

    def unparse(self) -> str:
        # "-2.0" reads back as a negative constant
        if isinstance(self.operand, Constant):
            return "-(%s)" % self.operand.unparse()

        return "-" + self.operand.unparse_as_operand(ATOM_PRECEDENCE)


class BinaryOperation(ExprNode):
    __slots__ = ()

    symbol = None

    def __init__(self, left: ExprNode, right: ExprNode) -> None:
        super().__init__(left, right)

    @property
    def left(self):
        return self.children[0]

    @property
    def right(self):
        return self.children[1]

    def unparse(self) -> str:
        # Left associative: only the right operand needs parentheses on ties
        return "%s %s %s" % (
            self.left.unparse_as_operand(self.precedence),
            self.symbol,
            self.right.unparse_as_operand(self.precedence + 1),
        )


class Addition(BinaryOperation):
    __slots__ = ()

    kind = "add"
    symbol = "+"
    precedence = SUM_PRECEDENCE

    def evaluate(self, x, u) -> float:
        return self.left.evaluate(x, u) + self.right.evaluate(x, u)

    def forward(self, x, u):
        a, da = self.left.forward(x, u)
        b, db = self.right.forward(x, u)
        return a + b, da + db

    def compile(self):
        left, right = self.left.compile(), self.right.compile()
        return lambda x, u: left(x, u) + right(x, u)

    def vectorize(self):
        left, right = self.left.vectorize(), self.right.vectorize()
        return lambda x, u: left(x, u) + right(x, u)


class Subtraction(BinaryOperation):
    __slots__ = ()

    kind = "sub"
    symbol = "-"
    precedence = SUM_PRECEDENCE

    def evaluate(self, x, u) -> float:
        return self.left.evaluate(x, u) - self.right.evaluate(x, u)

    def forward(self, x, u):
        a, da = self.left.forward(x, u)
        b, db = self.right.forward(x, u)
        return a - b, da - db

    def compile(self):
        left, right = self.left.compile(), self.right.compile()
        return lambda x, u: left(x, u) - right(x, u)

    def vectorize(self):
        left, right = self.left.vectorize(), self.right.vectorize()
        return lambda x, u: left(x, u) - right(x, u)


class Multiplication(BinaryOperation):
    __slots__ = ()

    kind = "mul"
    symbol = "*"
    precedence = PRODUCT_PRECEDENCE

    def evaluate(self, x, u) -> float:
        return self.left.evaluate(x, u) * self.right.evaluate(x, u)

    def forward(self, x, u):
        a, da = self.left.forward(x, u)
        b, db = self.right.forward(x, u)
        return a * b, b * da + a * db

    def compile(self):
        left, right = self.left.compile(), self.right.compile()
        return lambda x, u: left(x, u) * right(x, u)

    def vectorize(self):
        left, right = self.left.vectorize(), self.right.vectorize()
        return lambda x, u: left(x, u) * right(x, u)


def checked_division(a: float, b: float) -> float:
    if b == 0:
        raise DivisionByZeroError("division by zero")

    return a / b


class Division(BinaryOperation):
    __slots__ = ()

    kind = "div"
    symbol = "/"
    precedence = PRODUCT_PRECEDENCE

    def evaluate(self, x, u) -> float:
        return checked_division(self.left.evaluate(x, u), self.right.evaluate(x, u))

    def forward(self, x, u):
        a, da = self.left.forward(x, u)
        b, db = self.right.forward(x, u)

        if b == 0:
            raise DivisionByZeroError("division by zero")

        return a / b, (da * b - a * db) / (b * b)

    def compile(self):
        left, right = self.left.compile(), self.right.compile()
        return lambda x, u: checked_division(left(x, u), right(x, u))

    def vectorize(self):
        left, right = self.left.vectorize(), self.right.vectorize()
        return lambda x, u: np.true_divide(left(x, u), right(x, u))


def checked_power(base: float, exponent: float) -> float:
    if base == 0 and exponent < 0:
        raise DivisionByZeroError("zero raised to a negative power")

    try:
        return checked_float(base**exponent)
    except OverflowError:
        raise FunctionDomainError("power overflowed")


class Power(BinaryOperation):
    """
    Power node. The exponent is always a Constant node, which keeps the field
    smooth away from the origin of the base.
    """

    __slots__ = ()

    kind = "pow"
    symbol = "^"
    precedence = POWER_PRECEDENCE

    def __init__(self, base: ExprNode, exponent) -> None:
        if not isinstance(exponent, Constant):
            exponent = Constant(exponent)

        super().__init__(base, exponent)

    @property
    def exponent(self) -> float:
        return self.right.value

    def evaluate(self, x, u) -> float:
        return checked_power(self.left.evaluate(x, u), self.exponent)

    def forward(self, x, u):
        a, da = self.left.forward(x, u)
        c = self.exponent

        value = checked_power(a, c)

        if c == 0:
            return value, np.zeros_like(da)

        if c == 1:
            return value, da

        if a == 0 and c < 1:
            raise DivisionByZeroError(
                "power with exponent %s is not differentiable at zero" % repr(c)
            )

        return value, c * checked_power(a, c - 1) * da

    def compile(self):
        base = self.left.compile()
        c = self.exponent

        if c == 2:
            return lambda x, u: base(x, u) ** 2

        return lambda x, u: checked_power(base(x, u), c)

    def vectorize(self):
        base = self.left.vectorize()
        c = self.exponent

        if c == 2:
            return lambda x, u: base(x, u) ** 2

        return lambda x, u: np.power(base(x, u), c)

    def unparse(self) -> str:
        exponent = self.right.unparse_as_operand(ATOM_PRECEDENCE)
        return "%s^%s" % (self.left.unparse_as_operand(ATOM_PRECEDENCE), exponent)


def safe_exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        raise FunctionDomainError("exp overflowed")


# name -> (function, derivative)
FUNCTIONS = {
    "sin": (math.sin, math.cos),
    "cos": (math.cos, lambda v: -math.sin(v)),
    "exp": (safe_exp, safe_exp),
    "tanh": (math.tanh, lambda v: 1.0 - math.tanh(v) ** 2),
}

NUMPY_FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "tanh": np.tanh}


class FunctionCall(ExprNode):
    __slots__ = ("name",)

    kind = "function"

    def __init__(self, name: str, argument: ExprNode) -> None:
        if name not in FUNCTIONS:
            raise ValueError('unknown function "%s"' % name)

        super().__init__(argument)
        self.name = name

    @property
    def argument(self):
        return self.children[0]

    def _key(self):
        return self.name

    def evaluate(self, x, u) -> float:
        fn, _ = FUNCTIONS[self.name]
        return fn(self.argument.evaluate(x, u))

    def forward(self, x, u):
        fn, derivative = FUNCTIONS[self.name]
        a, da = self.argument.forward(x, u)
        return fn(a), derivative(a) * da

    def compile(self):
        fn, _ = FUNCTIONS[self.name]
        argument = self.argument.compile()
        return lambda x, u: fn(argument(x, u))

    def vectorize(self):
        fn = NUMPY_FUNCTIONS[self.name]
        argument = self.argument.vectorize()
        return lambda x, u: fn(argument(x, u))

    def unparse(self) -> str:
        return "%s(%s)" % (self.name, self.argument.unparse())


def compile_components(nodes):
    """
    Function compiling a list of expressions into a single callable returning
    a numpy vector.
    """
    compiled = [node.compile() for node in nodes]

    def field(x, u):
        return np.array([fn(x, u) for fn in compiled], dtype=float)

    return field


def vectorize_components(nodes):
    """
    Function vectorizing a list of expressions into a single callable taking
    (n, k) and (m, k) arrays and returning a (len(nodes), k) array. Overflows
    and singularities silently yield non-finite entries.
    """
    vectorized = [node.vectorize() for node in nodes]

    def field(x, u):
        shape = np.shape(x[0])

        with np.errstate(all="ignore"):
            return np.array(
                [np.broadcast_to(fn(x, u), shape) for fn in vectorized], dtype=float
            )

    return field
