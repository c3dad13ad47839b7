# =============================================================================
# Linopen Linear Algebra Unit Tests
# =============================================================================
import numpy as np
from pytest import raises, approx

from linopen.exceptions import DimensionError
from linopen.numlin import (
    spectrum,
    singular_values,
    numerical_rank,
    complex_pencil_rank,
    real_embedding,
)


class TestSpectrum(object):
    def test_errors(self):
        with raises(ValueError, match="square"):
            spectrum([[1, 2, 3], [4, 5, 6]])

        with raises(ValueError, match="non-finite"):
            spectrum([[np.nan]])

        with raises(DimensionError):
            spectrum(np.eye(51))

    def test_sorted(self):
        values = spectrum([[0, 1], [-1, 0]])

        assert values == approx((-1j, 1j))

        values = spectrum(np.diag([3.0, -2.0, 0.5]))

        assert values == (-2, 0.5, 3)

    def test_multiplicity(self):
        assert spectrum([[0, 1], [0, 0]]) == (0, 0)

    def test_random_matrices(self):
        rng = np.random.default_rng(3)

        for _ in range(50):
            n = int(rng.integers(1, 7))
            A = rng.standard_normal((n, n))
            values = np.array(spectrum(A))

            for value in values:
                assert np.min(np.abs(values - np.conj(value))) < 1e-8

            assert complex(values.sum()) == approx(np.trace(A), rel=1e-8, abs=1e-8)
            assert complex(np.prod(values)) == approx(
                np.linalg.det(A), rel=1e-8, abs=1e-8
            )


class TestRank(object):
    def test_singular_values(self):
        assert list(singular_values(np.diag([1.0, 3.0]))) == [3.0, 1.0]

    def test_numerical_rank(self):
        assert numerical_rank(np.eye(3)) == 3
        assert numerical_rank([[1, 2], [2, 4]]) == 1
        assert numerical_rank(np.zeros((2, 3))) == 0
        assert numerical_rank(np.diag([1.0, 1e-12])) == 1
        assert numerical_rank(np.diag([1.0, 1e-12]), tol=0) == 2

        with raises(ValueError):
            numerical_rank(np.eye(2), tol=-1)

    def test_real_embedding(self):
        C = np.array([[1 + 2j, 3j]])
        E = real_embedding(C)

        assert E.shape == (2, 4)
        assert singular_values(E) == approx([np.sqrt(14), np.sqrt(14)])

    def test_complex_pencil_rank(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])

        assert complex_pencil_rank(A, 1j, np.zeros((2, 1))) == 1
        assert complex_pencil_rank(A, 1j, np.array([[0.0], [1.0]])) == 2
        assert complex_pencil_rank(A, 2.0, np.zeros((2, 1))) == 2

        with raises(ValueError, match="rows"):
            complex_pencil_rank(A, 1j, np.zeros((3, 1)))

    def test_full_rank_away_from_spectrum(self):
        rng = np.random.default_rng(5)

        for _ in range(50):
            n = int(rng.integers(1, 7))
            A = rng.standard_normal((n, n))
            values = np.array(spectrum(A))

            while True:
                eigenvalue = complex(*rng.uniform(-4, 4, 2))

                if np.min(np.abs(values - eigenvalue)) > 0.5:
                    break

            assert complex_pencil_rank(A, eigenvalue, np.zeros((n, 1))) == n
