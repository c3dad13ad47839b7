# =============================================================================
# Linopen Utilities
# =============================================================================
#
# Miscellaneous utility functions used throughout the library.
#
import math
import numpy as np
from collections import namedtuple
from scipy.optimize import linear_sum_assignment
from scipy.stats import norm
from scipy.stats.qmc import Halton

SIGNIFICANT_DIGITS = 12


class Unbounded(object):
    """
    Tagged infinite value, used instead of floating overflow for quantities
    such as an absent regularity bound or the supremum of an empty set.
    """

    __slots__ = ("sign",)

    def __init__(self, sign: int) -> None:
        self.sign = 1 if sign > 0 else -1

    def __repr__(self) -> str:
        return "+inf" if self.sign > 0 else "-inf"

    __str__ = __repr__

    def __float__(self) -> float:
        return self.sign * math.inf

    def __neg__(self):
        return INFINITY if self.sign < 0 else NEGATIVE_INFINITY

    def __eq__(self, other) -> bool:
        return isinstance(other, Unbounded) and other.sign == self.sign

    def __hash__(self) -> int:
        return hash(("Unbounded", self.sign))

    def __lt__(self, other) -> bool:
        if isinstance(other, Unbounded):
            return self.sign < other.sign

        return self.sign < 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __gt__(self, other) -> bool:
        if isinstance(other, Unbounded):
            return self.sign > other.sign

        return self.sign > 0

    def __ge__(self, other) -> bool:
        return self == other or self > other


INFINITY = Unbounded(1)
NEGATIVE_INFINITY = Unbounded(-1)


def is_unbounded(value) -> bool:
    return isinstance(value, Unbounded)


Tolerances = namedtuple("Tolerances", ("rank", "classification", "margin"))

DEFAULT_CLASSIFICATION_TOLERANCE = 1e-8

DEFAULT_TOLERANCES = Tolerances(
    rank=None, classification=DEFAULT_CLASSIFICATION_TOLERANCE, margin=0.0
)


def make_tolerances(rank=None, classification=None, margin=None) -> Tolerances:
    """
    Function returning a set of tolerances where every omitted value falls
    back to its default.

    Args:
        rank (float, optional): absolute rank threshold. Defaults to None,
            meaning the scaled default `1e-9 * sigma_max * max(rows, cols)`.
        classification (float, optional): width of the band around the
            stability boundary. Defaults to 1e-8.
        margin (float, optional): extra margin required above the threshold
            in the sufficiency tests. Defaults to 0.

    Returns:
        Tolerances: the tolerances.
    """
    if rank is not None and rank < 0:
        raise ValueError("rank tolerance should be >= 0")

    if classification is not None and classification < 0:
        raise ValueError("classification tolerance should be >= 0")

    if margin is not None and margin < 0:
        raise ValueError("margin should be >= 0")

    return Tolerances(
        rank=rank,
        classification=DEFAULT_CLASSIFICATION_TOLERANCE
        if classification is None
        else classification,
        margin=0.0 if margin is None else margin,
    )


def sort_eigenvalues(values):
    return tuple(sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag)))


def format_number(value) -> str:
    if is_unbounded(value):
        return repr(value)

    return "%.*g" % (SIGNIFICANT_DIGITS, value)


def format_complex(value) -> str:
    value = complex(value)

    if value.imag == 0:
        return format_number(value.real)

    return "%s%s%si" % (
        format_number(value.real),
        "+" if value.imag > 0 else "-",
        format_number(abs(value.imag)),
    )


def match_poles(achieved, desired) -> float:
    """
    Function returning the largest distance between two multisets of complex
    values once paired by minimal-cost assignment.
    """
    achieved = np.asarray(achieved, dtype=complex)
    desired = np.asarray(desired, dtype=complex)

    if achieved.shape != desired.shape:
        raise ValueError("cannot match pole sets of different sizes")

    if achieved.size == 0:
        return 0.0

    cost = np.abs(achieved[:, None] - desired[None, :])
    rows, cols = linear_sum_assignment(cost)

    return float(cost[rows, cols].max())


def halton_directions(dimension: int, count: int):
    """
    Function returning `count` deterministic unit vectors of the given
    dimension, spread using a Halton sequence pushed through the gaussian
    inverse cdf.
    """
    if dimension == 1:
        return np.array([[1.0 if i % 2 == 0 else -1.0] for i in range(count)])

    sampler = Halton(d=dimension, scramble=False)

    # First Halton point is the origin of the cube
    sampler.fast_forward(1)

    directions = norm.ppf(sampler.random(count))
    norms = np.linalg.norm(directions, axis=1)

    for i in range(count):
        if norms[i] < 1e-12:
            directions[i] = 0.0
            directions[i, 0] = 1.0
            norms[i] = 1.0

    return directions / norms[:, None]


def halton_ball_points(center, radius: float, count: int):
    """
    Function returning `count` deterministic points spread inside the ball of
    given center and radius.
    """
    center = np.asarray(center, dtype=float)
    dimension = center.shape[0]

    sampler = Halton(d=dimension + 1, scramble=False)
    sampler.fast_forward(1)

    raw = sampler.random(count)

    directions = norm.ppf(np.clip(raw[:, :dimension], 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(directions, axis=1)
    norms[norms < 1e-12] = 1.0

    radii = radius * raw[:, dimension] ** (1.0 / dimension)

    return center + directions / norms[:, None] * radii[:, None]


def grid_ball_points(center, radius: float, points_per_axis: int):
    """
    Function returning the points of a regular cartesian grid falling inside
    the closed ball of given center and radius.
    """
    center = np.asarray(center, dtype=float)
    dimension = center.shape[0]

    axis = np.linspace(-radius, radius, points_per_axis)
    mesh = np.stack(np.meshgrid(*([axis] * dimension), indexing="ij"), axis=-1)
    offsets = mesh.reshape(-1, dimension)

    inside = np.linalg.norm(offsets, axis=1) <= radius * (1 + 1e-12)

    return center + offsets[inside]


def sphere_grid(dimension: int, count: int):
    """
    Function returning a dense set of unit vectors: both signs in dimension 1,
    evenly spaced angles in dimension 2 and a Fibonacci lattice above.
    """
    if dimension == 1:
        return np.array([[1.0], [-1.0]])

    if dimension == 2:
        angles = 2 * math.pi * np.arange(count) / count
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)

    if dimension == 3:
        golden = math.pi * (3 - math.sqrt(5))
        i = np.arange(count)
        z = 1 - 2 * (i + 0.5) / count
        r = np.sqrt(1 - z * z)
        return np.stack([r * np.cos(golden * i), r * np.sin(golden * i), z], axis=1)

    return halton_directions(dimension, count)
