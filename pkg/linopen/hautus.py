# =============================================================================
# Linopen Spectral Classification & Hautus Tests
# =============================================================================
#
# Classification of the spectrum of A into its unstable part (closed right
# half-plane in continuous time, on or outside the unit circle in discrete
# time), the thresholds the covering bound is compared against, and the rank
# tests characterizing stabilizability and controllability of (A, B).
#
import logging
import numpy as np
from collections import namedtuple

from linopen.numlin import (
    as_matrix,
    check_square,
    complex_pencil_rank,
    numerical_rank,
    spectrum,
)
from linopen.system import CONTINUOUS, MODES
from linopen.utils import (
    DEFAULT_CLASSIFICATION_TOLERANCE,
    NEGATIVE_INFINITY,
    format_complex,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12


class SpectralProfile(
    namedtuple(
        "SpectralProfile",
        (
            "eigenvalues",
            "mode",
            "unstable_set",
            "unstable_real_only",
            "eta",
            "eta_tilde",
            "boundary_warnings",
            "symmetric",
        ),
    )
):
    """
    Classified spectrum of a square matrix.

    Attributes:
        eigenvalues (tuple): full spectrum, sorted by real then imaginary part.
        mode (str): "continuous" or "discrete".
        unstable_set (tuple): eigenvalues with nonnegative real part
            (continuous) or with modulus at least 1 (discrete), boundary band
            included.
        unstable_real_only (bool): whether every unstable eigenvalue is real.
        eta (float or Unbounded): supremum over the real unstable eigenvalues
            of their real part (continuous) or modulus (discrete), or
            `NEGATIVE_INFINITY` when there is none.
        eta_tilde (float or None): largest modulus over the whole spectrum
            when it is real, None otherwise.
        boundary_warnings (tuple): messages about eigenvalues lying within
            the classification tolerance of the stability boundary.
        symmetric (bool): whether the matrix is symmetric, in which case its
            spectrum is known to be real.
    """

    __slots__ = ()

    @property
    def spectrum_is_real(self) -> bool:
        return self.eta_tilde is not None

    @property
    def unstable_is_empty(self) -> bool:
        return len(self.unstable_set) == 0


def is_unstable(eigenvalue: complex, mode: str, tol: float) -> bool:
    if mode == CONTINUOUS:
        return eigenvalue.real >= -tol

    return abs(eigenvalue) >= 1 - tol


def is_on_boundary(eigenvalue: complex, mode: str, tol: float) -> bool:
    if mode == CONTINUOUS:
        return abs(eigenvalue.real) < tol

    return abs(abs(eigenvalue) - 1) < tol


def spectral_profile(A, mode: str, tol_class=None) -> SpectralProfile:
    """
    Function classifying the spectrum of the given matrix.

    Eigenvalues within `tol_class` of the stability boundary are counted as
    unstable, and reported in the boundary warnings. In discrete mode the
    threshold is the largest modulus of the real unstable eigenvalues, so
    that an eigenvalue like -1.5 is not certified away.

    Args:
        A (array_like): square real matrix.
        mode (str): "continuous" or "discrete".
        tol_class (float, optional): classification tolerance. Defaults to
            1e-8.

    Returns:
        SpectralProfile: the classified spectrum.

    Example:
        from linopen import spectral_profile

        spectral_profile([[1.5]], "discrete").eta
        >>> 1.5
    """
    if mode not in MODES:
        raise TypeError('mode should be "continuous" or "discrete"')

    if tol_class is None:
        tol_class = DEFAULT_CLASSIFICATION_TOLERANCE
    elif tol_class < 0:
        raise ValueError("tol_class should be >= 0")

    A = check_square(A)
    eigenvalues = spectrum(A)

    unstable = tuple(z for z in eigenvalues if is_unstable(z, mode, tol_class))
    real_unstable = [z for z in unstable if abs(z.imag) <= tol_class]

    if not real_unstable:
        eta = NEGATIVE_INFINITY
    elif mode == CONTINUOUS:
        eta = max(z.real for z in real_unstable)
    else:
        eta = max(abs(z.real) for z in real_unstable)

    if all(abs(z.imag) <= tol_class for z in eigenvalues):
        eta_tilde = max(abs(z.real) for z in eigenvalues)
    else:
        eta_tilde = None

    boundary_warnings = []

    for z in eigenvalues:
        if is_on_boundary(z, mode, tol_class):
            message = "eigenvalue %s lies on the %s within %g" % (
                format_complex(z),
                "imaginary axis" if mode == CONTINUOUS else "unit circle",
                tol_class,
            )
            logger.warning(message)
            boundary_warnings.append(message)

    return SpectralProfile(
        eigenvalues=eigenvalues,
        mode=mode,
        unstable_set=unstable,
        unstable_real_only=len(real_unstable) == len(unstable),
        eta=eta,
        eta_tilde=eta_tilde,
        boundary_warnings=tuple(boundary_warnings),
        symmetric=bool(np.allclose(A, A.T, rtol=0, atol=SYMMETRY_TOLERANCE)),
    )


def check_pair(A, B):
    A = check_square(A)
    B = as_matrix(B, "B")

    if B.shape[0] != A.shape[0]:
        raise ValueError("B should have %i rows but has %i" % (A.shape[0], B.shape[0]))

    return A, B


def controllability_matrix(A, B):
    """
    Function returning the Kalman matrix [B, AB, ..., A^(n-1)B].
    """
    A, B = check_pair(A, B)
    blocks = [B]

    for _ in range(A.shape[0] - 1):
        blocks.append(A @ blocks[-1])

    return np.hstack(blocks)


def kalman_controllability_rank(A, B, tol=None) -> int:
    """
    Function returning the rank of the Kalman matrix [B, AB, ..., A^(n-1)B],
    which equals n iff the pair (A, B) is controllable.

    Args:
        A (array_like): n x n matrix.
        B (array_like): n x m matrix.
        tol (float, optional): rank tolerance.

    Returns:
        int: the rank.
    """
    return numerical_rank(controllability_matrix(A, B), tol=tol)


HautusResult = namedtuple("HautusResult", ("holds", "failures"))


def hautus_asymptotic(A, B, profile=None, tol=None, strict=False) -> HautusResult:
    """
    Function running the Hautus stabilizability test, i.e. checking that
    rank [A - λI | B] = n for every unstable eigenvalue λ of A. Since this
    rank can only drop at eigenvalues of A, checking the unstable set is
    enough to decide the test over the whole unstable region.

    Args:
        A (array_like): n x n matrix.
        B (array_like): n x m matrix.
        profile (SpectralProfile, optional): spectral profile of A. Defaults
            to the continuous-time profile.
        tol (float, optional): rank tolerance.
        strict (bool, optional): whether to only test eigenvalues lying
            strictly inside the unstable region, away from the boundary band.
            Defaults to False.

    Returns:
        HautusResult: whether the test holds and the failing eigenvalues.
    """
    A, B = check_pair(A, B)
    n = A.shape[0]

    if profile is None:
        profile = spectral_profile(A, CONTINUOUS)

    tested = profile.unstable_set

    if strict:
        if profile.mode == CONTINUOUS:
            tested = [z for z in tested if z.real > DEFAULT_CLASSIFICATION_TOLERANCE]
        else:
            tested = [z for z in tested if abs(z) > 1 + DEFAULT_CLASSIFICATION_TOLERANCE]

    failures = []

    # Conjugates share the rank, and repeated eigenvalues need one test
    for z in dict.fromkeys(tested):
        if z.imag < 0 and z.conjugate() in tested:
            continue

        if complex_pencil_rank(A, z, B, tol=tol) < n:
            failures.append(z)

    if failures:
        logger.debug(
            "hautus test fails at %s", ", ".join(format_complex(z) for z in failures)
        )

    return HautusResult(holds=not failures, failures=tuple(failures))


def hautus_full_spectrum(A, B, tol=None) -> bool:
    """
    Function running the Hautus controllability test, i.e. checking that
    rank [A - λI | B] = n at every eigenvalue of A. This is equivalent to the
    Kalman rank condition.

    Args:
        A (array_like): n x n matrix.
        B (array_like): n x m matrix.
        tol (float, optional): rank tolerance.

    Returns:
        bool: whether (A, B) is controllable.
    """
    A, B = check_pair(A, B)
    n = A.shape[0]

    return all(
        complex_pencil_rank(A, z, B, tol=tol) == n
        for z in dict.fromkeys(spectrum(A))
    )
