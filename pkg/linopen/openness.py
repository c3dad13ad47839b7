# =============================================================================
# Linopen Openness Bounds
# =============================================================================
#
# Exact covering, regularity and Lipschitz bounds of a smooth map at a point,
# read off the singular values of its Jacobian [A | B], along with a brute
# force estimator of the covering modulus of the nonlinear map itself, usable
# on tiny systems only.
#
import logging
import numpy as np
from collections import namedtuple
from ebbe import with_prev
from scipy.optimize import least_squares

from linopen.exceptions import DimensionError, EvaluationError
from linopen.numlin import numerical_rank, singular_values
from linopen.utils import INFINITY, grid_ball_points, is_unbounded, sphere_grid

logger = logging.getLogger(__name__)

MAX_ORACLE_DIMENSION = 3
ATTAINMENT_TOLERANCE = 1e-6
BISECTION_RESOLUTION = 1e-3
SUSPECT_DROP = 2.0

OpennessReport = namedtuple(
    "OpennessReport",
    ("cov_bound", "reg_bound", "lip_bound", "jacobian_rank", "linearly_open"),
)

CoveringGrid = namedtuple(
    "CoveringGrid",
    ("points_per_axis", "sphere_points", "shells", "resolution"),
    defaults=(21, 32, (0.5,), BISECTION_RESOLUTION),
)

CoveringSample = namedtuple(
    "CoveringSample", ("radius", "modulus", "image_radius", "open_hint")
)

CoveringSweep = namedtuple(
    "CoveringSweep", ("samples", "strictly_decreasing", "drop", "suspect")
)


def covering_bound(lin, tol=None) -> float:
    """
    Function returning the exact covering bound of a smooth map at a point
    from its linearization, i.e. the smallest singular value of the
    n x (n + m) matrix [A | B]. The bound is exactly 0 when [A | B] is not
    of full row rank.

    Args:
        lin (Linearization): the (A, B) pair.
        tol (float, optional): rank tolerance. Defaults to the scaled default
            of `numerical_rank`.

    Returns:
        float: the covering bound.
    """
    M = lin.stacked

    if numerical_rank(M, tol=tol) < M.shape[0]:
        return 0.0

    return float(singular_values(M)[-1])


def regularity_bound(lin, tol=None):
    """
    Function returning the exact regularity bound, reciprocal of the covering
    bound, or `INFINITY` when the map is not metrically regular.

    Args:
        lin (Linearization): the (A, B) pair.
        tol (float, optional): rank tolerance.

    Returns:
        float or Unbounded: the regularity bound.
    """
    cov = covering_bound(lin, tol=tol)

    if cov == 0:
        return INFINITY

    return 1.0 / cov


def lipschitz_bound(lin) -> float:
    """
    Function returning the exact Lipschitz bound of the map at the point, i.e.
    the largest singular value of [A | B].
    """
    return float(singular_values(lin.stacked)[0])


def shifted_covering_lower_bound(cov: float, nu: float) -> float:
    """
    Function returning a lower bound of the covering bound of the map shifted
    by a perturbation whose Lipschitz bound is nu.

    Args:
        cov (float): covering bound of the unperturbed map.
        nu (float): Lipschitz bound of the perturbation, >= 0.

    Returns:
        float: cov - nu.
    """
    if nu < 0:
        raise ValueError("nu should be >= 0")

    return cov - nu


def openness_report(lin, tol=None) -> OpennessReport:
    """
    Function returning every exact openness bound of the given linearization.

    Args:
        lin (Linearization): the (A, B) pair.
        tol (float, optional): rank tolerance. Defaults to the scaled default
            of `numerical_rank`.

    Returns:
        OpennessReport: the bounds.
    """
    M = lin.stacked
    sigma = singular_values(M)
    rank = numerical_rank(M, tol=tol)
    n = M.shape[0]

    linearly_open = rank == n
    cov = float(sigma[-1]) if linearly_open else 0.0

    return OpennessReport(
        cov_bound=cov,
        reg_bound=1.0 / cov if cov > 0 else INFINITY,
        lip_bound=float(sigma[0]),
        jacobian_rank=rank,
        linearly_open=linearly_open,
    )


def ball_map(center, radius: float, p):
    """
    Smooth surjection from the whole space onto the open ball, letting
    unconstrained least squares search inside the ball.
    """
    norm = np.linalg.norm(p)

    if norm < 1e-300:
        return center.copy()

    return center + radius * np.tanh(norm) / norm * p


def ball_map_inverse(center, radius: float, w):
    v = (w - center) / radius
    norm = np.linalg.norm(v)

    if norm < 1e-300:
        return np.zeros_like(v)

    # Saturated tanh would stall the solver on the boundary
    norm_clipped = min(norm, 1 - 1e-3)

    return v / norm * np.arctanh(norm_clipped)


class CoveringOracle(object):
    __slots__ = ("system", "point", "radius", "grid", "domain", "images", "tol")

    def __init__(self, system, point, radius, grid) -> None:
        self.system = system
        self.point = point
        self.radius = radius
        self.grid = grid
        self.tol = ATTAINMENT_TOLERANCE * radius

        domain = grid_ball_points(point, radius, grid.points_per_axis)
        images = []
        kept = []

        for w in domain:
            try:
                images.append(self.apply(w))
            except EvaluationError:
                continue

            kept.append(w)

        self.domain = np.array(kept)
        self.images = np.array(images)

    def apply(self, w):
        n = self.system.n
        return self.system.field(w[:n], w[n:])

    def attains(self, y) -> bool:
        distances = np.linalg.norm(self.images - y, axis=1)
        best = int(np.argmin(distances))

        if distances[best] <= self.tol:
            return True

        point, radius = self.point, self.radius

        def residual(p):
            try:
                return self.apply(ball_map(point, radius, p)) - y
            except EvaluationError:
                return np.full(y.shape, 1e6)

        result = least_squares(
            residual,
            ball_map_inverse(point, radius, self.domain[best]),
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=200,
        )

        return float(np.linalg.norm(result.fun)) <= self.tol

    def covers(self, center, modulus: float, directions) -> bool:
        image_radius = modulus * self.radius

        for shell in (1.0,) + tuple(self.grid.shells):
            for direction in directions:
                if not self.attains(center + shell * image_radius * direction):
                    return False

        return True


def empirical_covering_modulus(system, radius: float, point=None, grid=None):
    """
    Function estimating the covering modulus of the nonlinear map
    (x, u) -> f(x, u) around a point, i.e. the largest κ such that the image
    of the ball of given radius around the point contains the ball of radius
    κ * radius around its image.

    Every target on a dense grid of the sphere (and of some inner shells) of
    the candidate image ball must be attained within 1e-6 * radius, by
    minimizing the distance to the target over the domain ball: first over a
    dense cartesian grid, then by local least squares refinement. The
    modulus is found by bisection.

    This is an estimator restricted to tiny systems (n + m <= 3) and meant to
    be read across several radii: a modulus vanishing with the radius betrays
    a map that is not linearly open.

    Args:
        system (SystemSpec): target system.
        radius (float): radius of the domain ball, > 0.
        point (array_like, optional): stacked (x, u) center. Defaults to the
            equilibrium pair.
        grid (CoveringGrid, optional): sampling configuration.

    Returns:
        float: the estimated modulus.
    """
    if system.n + system.m > MAX_ORACLE_DIMENSION:
        raise DimensionError(
            "empirical covering is limited to n + m <= %i but got %i"
            % (MAX_ORACLE_DIMENSION, system.n + system.m)
        )

    if radius <= 0:
        raise ValueError("radius should be > 0")

    if grid is None:
        grid = CoveringGrid()

    if point is None:
        point = np.concatenate([system.equilibrium_x, system.equilibrium_u])
    else:
        point = np.asarray(point, dtype=float)

    oracle = CoveringOracle(system, point, radius, grid)
    center = oracle.apply(point)
    directions = sphere_grid(system.n, grid.sphere_points)

    # No image ball can stick out of the sampled image
    hi = float(np.max(np.linalg.norm(oracle.images - center, axis=1))) / radius
    lo = 0.0

    if hi == 0:
        return 0.0

    if oracle.covers(center, hi, directions):
        return hi

    while hi - lo > grid.resolution * hi:
        middle = (lo + hi) / 2

        if oracle.covers(center, middle, directions):
            lo = middle
        else:
            hi = middle

    logger.debug("covering modulus at radius %g: %g", radius, lo)

    return lo


def covering_sweep(system, radii, point=None, grid=None) -> CoveringSweep:
    """
    Function running `empirical_covering_modulus` over several radii.

    The sweep is flagged as suspect of not being linearly open when the
    modulus drops by more than a factor 2 from the largest to the smallest
    radius. Every sample also records whether its image still contains a
    neighborhood of the image point (topological openness), which is how the
    cubic z -> z^3 turns out open but not linearly open.

    Args:
        system (SystemSpec): target system.
        radii (list): radii to test.
        point (array_like, optional): stacked (x, u) center.
        grid (CoveringGrid, optional): sampling configuration.

    Returns:
        CoveringSweep: samples ordered by decreasing radius.
    """
    radii = sorted((float(r) for r in radii), reverse=True)

    if not radii:
        raise ValueError("at least one radius is required")

    samples = []

    for r in radii:
        modulus = empirical_covering_modulus(system, r, point=point, grid=grid)
        samples.append(
            CoveringSample(
                radius=r,
                modulus=modulus,
                image_radius=modulus * r,
                open_hint=modulus > 0,
            )
        )

    strictly_decreasing = all(
        previous is None or current.modulus < previous.modulus
        for previous, current in with_prev(samples)
    )

    first, last = samples[0].modulus, samples[-1].modulus

    if last > 0:
        drop = first / last
    elif first > 0:
        drop = INFINITY
    else:
        drop = 1.0

    suspect = is_unbounded(drop) or drop > SUSPECT_DROP

    return CoveringSweep(
        samples=samples,
        strictly_decreasing=strictly_decreasing,
        drop=drop,
        suspect=suspect,
    )
