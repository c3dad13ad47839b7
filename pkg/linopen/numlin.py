# =============================================================================
# Linopen Dense Linear Algebra Kernels
# =============================================================================
#
# Thin, checked wrappers over numpy's LAPACK routines: spectra, singular
# values, numerical rank and the complex rank of the Hautus pencil computed
# through its real embedding.
#
import numpy as np

from linopen.exceptions import ConvergenceError, DimensionError
from linopen.utils import sort_eigenvalues


MAX_DIMENSION = 50
RANK_TOLERANCE_FACTOR = 1e-9


def as_matrix(M, name: str = "matrix"):
    """
    Function coercing the given value to a finite 2D float array.
    """
    M = np.array(M, dtype=float)

    if M.ndim == 1:
        M = M.reshape(1, -1)

    if M.ndim != 2:
        raise ValueError("%s should be 2-dimensional" % name)

    if M.size == 0:
        raise ValueError("%s should not be empty" % name)

    if not np.all(np.isfinite(M)):
        raise ValueError("%s has non-finite entries" % name)

    return M


def check_square(A, name: str = "A"):
    A = as_matrix(A, name)

    if A.shape[0] != A.shape[1]:
        raise ValueError("%s should be square but is %ix%i" % (name, *A.shape))

    if A.shape[0] > MAX_DIMENSION:
        raise DimensionError(
            "%s is %ix%i, above the supported size of %i"
            % (name, A.shape[0], A.shape[1], MAX_DIMENSION)
        )

    return A


def spectrum(A):
    """
    Function returning the eigenvalues of the given square matrix, with
    multiplicity, sorted by real then imaginary part.

    Args:
        A (array_like): square real matrix, at most 50x50.

    Returns:
        tuple: complex eigenvalues.
    """
    A = check_square(A)

    try:
        values = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError("eigenvalue computation did not converge: %s" % e)

    return sort_eigenvalues(values)


def singular_values(M):
    """
    Function returning the singular values of the given matrix in descending
    order.

    Args:
        M (array_like): real matrix.

    Returns:
        np.ndarray: min(rows, cols) nonnegative values.
    """
    M = as_matrix(M)

    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise ConvergenceError("singular value computation did not converge: %s" % e)


def default_rank_tolerance(M, sigma=None) -> float:
    M = np.asarray(M)

    if sigma is None:
        sigma = singular_values(M)

    sigma_max = sigma[0] if len(sigma) else 0.0

    return RANK_TOLERANCE_FACTOR * sigma_max * max(M.shape)


def numerical_rank(M, tol=None) -> int:
    """
    Function returning the numerical rank of the given matrix, i.e. the
    number of its singular values strictly above the tolerance.

    Args:
        M (array_like): real matrix.
        tol (float, optional): absolute threshold. Defaults to
            `1e-9 * sigma_max * max(rows, cols)`.

    Returns:
        int: the rank.
    """
    M = as_matrix(M)
    sigma = singular_values(M)

    if tol is None:
        tol = default_rank_tolerance(M, sigma)
    elif tol < 0:
        raise ValueError("tol should be >= 0")

    return int(np.sum(sigma > tol))


def real_embedding(C):
    """
    Function returning the real 2r x 2c embedding [[Re, -Im], [Im, Re]] of the
    given complex matrix.
    """
    C = np.asarray(C, dtype=complex)

    return np.block([[C.real, -C.imag], [C.imag, C.real]])


def complex_pencil_rank(A, eigenvalue, B, tol=None) -> int:
    """
    Function returning the complex rank of the pencil [A - λI | B], computed
    as half of the real rank of its real embedding.

    Args:
        A (array_like): n x n real matrix.
        eigenvalue (complex): the value λ.
        B (array_like): n x m real matrix.
        tol (float, optional): rank tolerance applied to the embedding.
            Defaults to the scaled default of `numerical_rank`.

    Returns:
        int: the rank, between 0 and n.
    """
    A = check_square(A)
    B = as_matrix(B, "B")
    n = A.shape[0]

    if B.shape[0] != n:
        raise ValueError("B should have %i rows but has %i" % (n, B.shape[0]))

    pencil = np.hstack([A - complex(eigenvalue) * np.eye(n), B])

    # Singular values of the embedding are those of the pencil, each doubled
    return numerical_rank(real_embedding(pencil), tol=tol) // 2
