# =============================================================================
# Linopen Utilities Unit Tests
# =============================================================================
import math
import numpy as np
from pytest import raises, approx

from linopen.utils import (
    INFINITY,
    NEGATIVE_INFINITY,
    is_unbounded,
    make_tolerances,
    sort_eigenvalues,
    format_number,
    format_complex,
    match_poles,
    halton_directions,
    halton_ball_points,
    grid_ball_points,
    sphere_grid,
)


class TestUtils(object):
    def test_unbounded(self):
        assert is_unbounded(INFINITY)
        assert not is_unbounded(math.inf)

        assert INFINITY > 1e300
        assert 5 < INFINITY
        assert NEGATIVE_INFINITY < -1e300
        assert NEGATIVE_INFINITY < INFINITY
        assert INFINITY >= INFINITY

        assert -INFINITY == NEGATIVE_INFINITY
        assert -NEGATIVE_INFINITY == INFINITY
        assert float(INFINITY) == math.inf
        assert repr(INFINITY) == "+inf"
        assert str(NEGATIVE_INFINITY) == "-inf"

        assert len({INFINITY, -NEGATIVE_INFINITY}) == 1

    def test_make_tolerances(self):
        tolerances = make_tolerances()

        assert tolerances.rank is None
        assert tolerances.classification == 1e-8
        assert tolerances.margin == 0.0

        tolerances = make_tolerances(rank=1e-6, margin=0.5)

        assert tolerances.rank == 1e-6
        assert tolerances.classification == 1e-8
        assert tolerances.margin == 0.5

        with raises(ValueError, match="rank"):
            make_tolerances(rank=-1)

        with raises(ValueError, match="classification"):
            make_tolerances(classification=-1e-3)

        with raises(ValueError, match="margin"):
            make_tolerances(margin=-1)

    def test_sort_eigenvalues(self):
        assert sort_eigenvalues([2, 1j, -1j, -3]) == (-3, -1j, 1j, 2)

    def test_format_number(self):
        assert format_number(0.1) == "0.1"
        assert format_number(1 / 3) == "0.333333333333"
        assert format_number(2.0) == "2"
        assert format_number(INFINITY) == "+inf"

        assert format_complex(3 + 0j) == "3"
        assert format_complex(1 - 2j) == "1-2i"
        assert format_complex(-0.5 + 0.25j) == "-0.5+0.25i"

    def test_match_poles(self):
        assert match_poles([1, 2], [2.1, 1]) == approx(0.1)
        assert match_poles([1j, -1j], [-1j, 1j]) == 0.0
        assert match_poles([], []) == 0.0

        with raises(ValueError):
            match_poles([1, 2], [1])

    def test_halton_directions(self):
        directions = halton_directions(3, 20)

        assert directions.shape == (20, 3)
        assert np.linalg.norm(directions, axis=1) == approx(np.ones(20))

        # Deterministic
        assert np.array_equal(directions, halton_directions(3, 20))

        assert halton_directions(1, 3).tolist() == [[1.0], [-1.0], [1.0]]

    def test_halton_ball_points(self):
        center = np.array([1.0, 1.0])
        points = halton_ball_points(center, 0.5, 50)

        assert points.shape == (50, 2)
        assert np.all(np.linalg.norm(points - center, axis=1) <= 0.5)

    def test_grid_ball_points(self):
        points = grid_ball_points([0.0, 0.0], 1.0, 3)

        assert sorted(map(tuple, points.tolist())) == [
            (-1.0, 0.0),
            (0.0, -1.0),
            (0.0, 0.0),
            (0.0, 1.0),
            (1.0, 0.0),
        ]

        shifted = grid_ball_points([2.0], 0.5, 5)

        assert shifted.reshape(-1).tolist() == approx([1.5, 1.75, 2.0, 2.25, 2.5])

    def test_sphere_grid(self):
        assert sphere_grid(1, 10).tolist() == [[1.0], [-1.0]]

        square = sphere_grid(2, 4)

        assert square[0] == approx([1, 0])
        assert square[1] == approx([0, 1], abs=1e-12)
        assert square[2] == approx([-1, 0], abs=1e-12)

        for dimension in (3, 4):
            directions = sphere_grid(dimension, 64)

            assert directions.shape == (64, dimension)
            assert np.linalg.norm(directions, axis=1) == approx(np.ones(64))
