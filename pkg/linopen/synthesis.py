# =============================================================================
# Linopen Feedback Synthesis
# =============================================================================
#
# Construction of stabilizing linear feedback gains u = Kx for the
# linearization of a system: orthogonal separation of its controllable part,
# pole placement on that part (Ackermann's formula for a single input, a
# Sylvester equation otherwise) and lifting back to the original coordinates.
#
import logging
import numpy as np
from collections import namedtuple
from scipy.linalg import solve_sylvester

from linopen.exceptions import PlacementError, UncontrollableModeError
from linopen.hautus import (
    check_pair,
    controllability_matrix,
    hautus_asymptotic,
    spectral_profile,
)
from linopen.numlin import numerical_rank, spectrum
from linopen.system import CONTINUOUS, jacobian
from linopen.utils import (
    DEFAULT_TOLERANCES,
    format_complex,
    match_poles,
    sort_eigenvalues,
)

logger = logging.getLogger(__name__)

PLACEMENT_TOLERANCE = 1e-6
CONJUGATE_TOLERANCE = 1e-9
OVERLAP_TOLERANCE = 1e-8
MAX_REDRAWS = 5
MAX_CONDITION = 1e12

Staircase = namedtuple("Staircase", ("transform", "controllable_dim"))

FeedbackGain = namedtuple(
    "FeedbackGain",
    ("K", "target_poles", "achieved_poles", "mode", "controllable_dim", "seed"),
)


def staircase_decompose(A, B, tol=None) -> Staircase:
    """
    Function returning an orthogonal change of coordinates separating the
    controllable part of the pair (A, B) from its uncontrollable part.

    In the new coordinates, T' A T is block upper triangular and T' B is
    nonzero only on its first `controllable_dim` rows, that dimension being
    the rank of the Kalman matrix. The first columns of T span the range of
    the Kalman matrix, as given by its singular value decomposition.

    Args:
        A (array_like): n x n matrix.
        B (array_like): n x m matrix.
        tol (float, optional): rank tolerance.

    Returns:
        Staircase: the transform T and the controllable dimension.
    """
    A, B = check_pair(A, B)
    n = A.shape[0]

    C = controllability_matrix(A, B)

    if not np.any(C):
        return Staircase(np.eye(n), 0)

    rank = numerical_rank(C, tol=tol)

    if rank == n:
        return Staircase(np.eye(n), n)

    U, _, _ = np.linalg.svd(C)

    return Staircase(U, rank)


def closed_loop_spectrum(A, B, K):
    """
    Function returning the spectrum of A + BK, i.e. the closed-loop poles of
    x' = Ax + Bu under the feedback u = Kx.
    """
    A, B = check_pair(A, B)
    K = np.asarray(K, dtype=float).reshape(B.shape[1], A.shape[0])

    return spectrum(A + B @ K)


def check_conjugate_closure(poles):
    remaining = list(poles)
    real = []
    pairs = []

    while remaining:
        z = remaining.pop(0)

        if abs(z.imag) <= CONJUGATE_TOLERANCE * max(1.0, abs(z)):
            real.append(z.real)
            continue

        distances = [abs(w - z.conjugate()) for w in remaining]

        if not distances or min(distances) > CONJUGATE_TOLERANCE * max(1.0, abs(z)):
            raise PlacementError(
                "desired poles should be closed under conjugation but %s has no "
                "conjugate" % format_complex(z)
            )

        remaining.pop(int(np.argmin(distances)))
        pairs.append(complex(z.real, abs(z.imag)))

    return real, pairs


def real_block_diagonal(real, pairs):
    """
    Real matrix whose spectrum is the given real values and conjugate pairs.
    """
    size = len(real) + 2 * len(pairs)
    L = np.zeros((size, size))

    for i, value in enumerate(real):
        L[i, i] = value

    offset = len(real)

    for j, z in enumerate(pairs):
        i = offset + 2 * j
        L[i : i + 2, i : i + 2] = [[z.real, z.imag], [-z.imag, z.real]]

    return L


def ackermann(A, B, desired):
    n = A.shape[0]
    coefficients = np.real(np.poly(desired))

    P = np.zeros((n, n))

    for c in coefficients:
        P = P @ A + c * np.eye(n)

    # Ackermann gives A - BK, the sign flips for u = Kx
    return -np.linalg.solve(controllability_matrix(A, B), P)[-1:, :]


def sylvester_placement(A, B, real, pairs, rng):
    n, m = B.shape
    L = real_block_diagonal(real, pairs)

    for attempt in range(MAX_REDRAWS):
        G = rng.standard_normal((m, n))
        X = solve_sylvester(A, -L, -B @ G)

        if np.linalg.cond(X) < MAX_CONDITION:
            return G @ np.linalg.inv(X)

        logger.debug("ill-conditioned sylvester solution, redrawing (%i)", attempt + 1)

    raise PlacementError(
        "sylvester solution stayed ill-conditioned after %i draws" % MAX_REDRAWS
    )


def place_poles(A, B, desired, seed=0, tol=None):
    """
    Function returning a gain K such that the spectrum of A + BK is the
    desired set of poles, with the sign convention u = Kx.

    Single-input pairs use Ackermann's formula. Multi-input pairs solve the
    Sylvester equation A X - X L = -B G, where L is a real matrix with the
    desired spectrum and G a random matrix, and take K = G X^-1, redrawing G
    up to 5 times when X is ill-conditioned.

    Args:
        A (array_like): n x n matrix.
        B (array_like): n x m matrix.
        desired (list): n complex poles, closed under conjugation and
            disjoint from the spectrum of A.
        seed (int or np.random.Generator, optional): seed of the generator
            drawing G. Defaults to 0.
        tol (float, optional): rank tolerance of the controllability check.

    Returns:
        np.ndarray: the m x n gain.

    Example:
        from linopen import place_poles

        place_poles([[0, 1], [0, 0]], [[0], [1]], [-1, -2])
        >>> array([[-2., -3.]])
    """
    A, B = check_pair(A, B)
    n, m = B.shape

    desired = sort_eigenvalues(desired)

    if len(desired) != n:
        raise PlacementError("expected %i desired poles but got %i" % (n, len(desired)))

    if numerical_rank(controllability_matrix(A, B), tol=tol) < n:
        raise PlacementError("cannot place poles of an uncontrollable pair")

    real, pairs = check_conjugate_closure(desired)

    eigenvalues = spectrum(A)

    for z in desired:
        if any(abs(z - w) <= OVERLAP_TOLERANCE * max(1.0, abs(z)) for w in eigenvalues):
            raise PlacementError(
                "desired pole %s is an eigenvalue of A" % format_complex(z)
            )

    if m == 1:
        K = ackermann(A, B, desired)
    else:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        K = sylvester_placement(A, B, real, pairs, rng)

    error = match_poles(closed_loop_spectrum(A, B, K), desired)

    if error > PLACEMENT_TOLERANCE:
        raise PlacementError(
            "placed poles are off by %g, the problem is ill-conditioned" % error
        )

    return K


def is_stable(eigenvalue: complex, mode: str) -> bool:
    if mode == CONTINUOUS:
        return eigenvalue.real < 0

    return abs(eigenvalue) < 1


def default_poles(size: int, mode: str, radius: float):
    """
    Function returning the default real poles of a controllable block:
    -(radius + 1), -(radius + 1.5)... in continuous time, and 0.5, 0.45...
    in discrete time.
    """
    if mode == CONTINUOUS:
        return [-(radius + 1.0 + 0.5 * k) for k in range(size)]

    step = min(0.05, 0.95 / max(size, 1))

    return [0.5 - step * k for k in range(size)]


def avoid_spectrum(poles, eigenvalues, mode: str):
    """
    Nudges default poles away from the eigenvalues of the block, which the
    placement methods do not accept.
    """
    shift = -0.5 if mode == CONTINUOUS else -0.01
    moved = []

    for p in poles:
        while any(abs(p - w) <= 1e-6 for w in eigenvalues) or p in moved:
            p += shift

        moved.append(p)

    return moved


def synthesize(system, seed=0, poles=None, tolerances=DEFAULT_TOLERANCES):
    """
    Function synthesizing a stabilizing linear feedback u = Kx for the
    linearization of the given system at its equilibrium.

    The uncontrollable part of (A, B), stable since the Hautus test must
    hold, is left untouched. Poles of the controllable part are placed,
    by default, at -(r + 1), -(r + 1.5)... in continuous time, r being the
    spectral radius of A, and at 0.5, 0.45... in discrete time.

    Args:
        system (SystemSpec): target system.
        seed (int, optional): seed of the multi-input placement. Defaults to 0.
        poles (list, optional): poles of the controllable part, overriding
            the defaults. Must be stable.
        tolerances (Tolerances, optional): rank and classification
            tolerances.

    Returns:
        FeedbackGain: the gain, with target and achieved closed-loop poles.
    """
    lin = jacobian(system)
    A, B = lin.A, lin.B
    mode = system.mode

    profile = spectral_profile(A, mode, tol_class=tolerances.classification)
    hautus = hautus_asymptotic(A, B, profile, tol=tolerances.rank)

    if not hautus.holds:
        raise UncontrollableModeError(hautus.failures[0])

    T, r = staircase_decompose(A, B, tol=tolerances.rank)

    At = T.T @ A @ T
    Bt = T.T @ B

    uncontrollable = list(spectrum(At[r:, r:])) if r < system.n else []
    Kt = np.zeros((system.m, system.n))

    if r > 0:
        A11, B1 = At[:r, :r], Bt[:r]

        if poles is None:
            radius = max(abs(z) for z in profile.eigenvalues)
            desired = avoid_spectrum(default_poles(r, mode, radius), spectrum(A11), mode)
        else:
            desired = sort_eigenvalues(poles)

            if len(desired) != r:
                raise PlacementError(
                    "expected %i poles for the controllable part but got %i"
                    % (r, len(desired))
                )

            unstable = [z for z in desired if not is_stable(z, mode)]

            if unstable:
                raise PlacementError(
                    "requested pole %s is not stable" % format_complex(unstable[0])
                )

        Kt[:, :r] = place_poles(A11, B1, desired, seed=seed, tol=tolerances.rank)
    else:
        desired = []

    K = Kt @ T.T

    achieved = closed_loop_spectrum(A, B, K)
    unstable = [z for z in achieved if not is_stable(z, mode)]

    if unstable:
        raise PlacementError(
            "closed loop is not stable, pole %s remains" % format_complex(unstable[0])
        )

    logger.debug("synthesized K=%s with poles %s", K.tolist(), achieved)

    return FeedbackGain(
        K=K,
        target_poles=sort_eigenvalues(list(desired) + uncontrollable),
        achieved_poles=achieved,
        mode=mode,
        controllable_dim=r,
        seed=seed,
    )
