# =============================================================================
# Linopen Unit Test Utilities
# =============================================================================
import numpy as np
from os.path import join, dirname

from linopen.expr import (
    FUNCTIONS,
    Constant,
    StateVariable,
    ControlVariable,
    Negation,
    Addition,
    Subtraction,
    Multiplication,
    Division,
    Power,
    FunctionCall,
)
from linopen.read import read_system, parse_system

RESOURCES_DIR = join(dirname(__file__), "resources")


def get_resource_path(name: str) -> str:
    return join(RESOURCES_DIR, name)


def load_system(name: str):
    return read_system(get_resource_path(name + ".stab"))


def random_controllable_pair(rng, n: int, m: int):
    while True:
        A = rng.standard_normal((n, n))
        B = rng.standard_normal((n, m))

        blocks = [B]

        for _ in range(n - 1):
            blocks.append(A @ blocks[-1])

        C = np.hstack(blocks)
        sigma = np.linalg.svd(C, compute_uv=False)

        if sigma[n - 1] > 1e-3 * sigma[0]:
            return A, B


def linear_system(A, B, mode: str = "continuous"):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n, m = B.shape

    lines = [
        "mode %s" % mode,
        "states %i" % n,
        "controls %i" % m,
        "eq x = %s" % " ".join(["0"] * n),
        "eq u = %s" % " ".join(["0"] * m),
    ]

    for i in range(n):
        terms = ["%r * x%i" % (float(a), j + 1) for j, a in enumerate(A[i])]
        terms += ["%r * u%i" % (float(b), j + 1) for j, b in enumerate(B[i])]
        lines.append("f%i = %s" % (i + 1, " + ".join(terms)))

    return parse_system("\n".join(lines))


def random_expression(rng, n: int, m: int, depth: int, smooth: bool = False):
    """
    Random AST over x1..xn and u1..um. Smooth trees only divide by
    2 + g^2 and use integer exponents, so they are C1 everywhere.
    """
    if depth == 0 or rng.random() < 0.2:
        leaf = rng.integers(3)

        if leaf == 0:
            return Constant(round(float(rng.uniform(-3, 3)), 3))

        if leaf == 1:
            return StateVariable(int(rng.integers(1, n + 1)))

        return ControlVariable(int(rng.integers(1, m + 1)))

    def child():
        return random_expression(rng, n, m, depth - 1, smooth)

    kind = rng.integers(7)

    if kind == 0:
        return Negation(child())

    if kind == 1:
        return Addition(child(), child())

    if kind == 2:
        return Subtraction(child(), child())

    if kind == 3:
        return Multiplication(child(), child())

    if kind == 4:
        if smooth:
            return Division(child(), Addition(Constant(2.0), Power(child(), 2)))

        return Division(child(), child())

    if kind == 5:
        exponents = [2.0, 3.0] if smooth else [2.0, 3.0, 1.0, -1.0, 0.5, -0.5]
        return Power(child(), exponents[int(rng.integers(len(exponents)))])

    names = sorted(FUNCTIONS)

    return FunctionCall(names[int(rng.integers(len(names)))], child())
