# =============================================================================
# Linopen Openness Unit Tests
# =============================================================================
import numpy as np
from pytest import raises, approx

from test.utils import load_system

from linopen.exceptions import DimensionError
from linopen.openness import (
    covering_bound,
    regularity_bound,
    lipschitz_bound,
    shifted_covering_lower_bound,
    openness_report,
    empirical_covering_modulus,
    covering_sweep,
)
from linopen.system import Linearization, jacobian
from linopen.utils import INFINITY

RADII = [0.1, 0.05, 0.025]


def linearization(A, B):
    return Linearization(np.array(A, dtype=float), np.array(B, dtype=float))


class TestExactBounds(object):
    def test_planar(self):
        lin = jacobian(load_system("planar"))

        assert covering_bound(lin) == approx(1.0)
        assert regularity_bound(lin) == approx(1.0)
        assert lipschitz_bound(lin) == approx(1.0)

    def test_triple(self):
        lin = jacobian(load_system("triple"))
        report = openness_report(lin)

        assert report.cov_bound == approx(0.6144, abs=5e-4)
        assert report.jacobian_rank == 3
        assert report.linearly_open
        assert report.lip_bound == approx(np.linalg.norm(lin.stacked, 2))
        assert report.cov_bound * report.reg_bound == approx(1.0)

    def test_rank_deficient(self):
        lin = linearization([[0, 0], [0, 0]], [[1], [1]])
        report = openness_report(lin)

        assert covering_bound(lin) == 0.0
        assert regularity_bound(lin) is INFINITY
        assert report.reg_bound is INFINITY
        assert report.jacobian_rank == 1
        assert not report.linearly_open

    def test_tolerance(self):
        lin = linearization([[1e-6]], [[0]])

        assert covering_bound(lin) == approx(1e-6)
        assert covering_bound(lin, tol=1e-3) == 0.0
        assert not openness_report(lin, tol=1e-3).linearly_open

    def test_covering_times_regularity(self):
        rng = np.random.default_rng(42)

        for _ in range(100):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 3))
            A = rng.standard_normal((n, n))
            lin = linearization(A, rng.standard_normal((n, m)))

            cov = covering_bound(lin)

            assert cov > 0
            assert cov * regularity_bound(lin) == approx(1.0, rel=1e-12)
            assert cov <= lipschitz_bound(lin)

    def test_transpose_invariance(self):
        lin = jacobian(load_system("triple"))
        transposed = np.linalg.svd(lin.stacked.T, compute_uv=False)

        assert covering_bound(lin) == approx(transposed[-1])

    def test_shifted_lower_bound(self):
        assert shifted_covering_lower_bound(1.0, 0.25) == 0.75
        assert shifted_covering_lower_bound(0.5, 1.0) == -0.5

        with raises(ValueError):
            shifted_covering_lower_bound(1.0, -0.1)


class TestEmpiricalCovering(object):
    def test_errors(self):
        with raises(DimensionError):
            empirical_covering_modulus(load_system("triple"), 0.1)

        with raises(ValueError):
            empirical_covering_modulus(load_system("identity"), 0)

    def test_identity(self):
        system = load_system("identity")

        for r in RADII:
            assert empirical_covering_modulus(system, r) >= 0.9

    def test_planar(self):
        assert empirical_covering_modulus(load_system("planar"), 0.05) >= 0.9

    def test_cubic(self):
        system = load_system("cubic")

        for r in RADII:
            modulus = empirical_covering_modulus(system, r)

            assert r**2 / 1.5 <= modulus <= 1.5 * r**2

    def test_sweep(self):
        sweep = covering_sweep(load_system("cubic"), [0.025, 0.1, 0.05])

        assert [s.radius for s in sweep.samples] == RADII
        assert sweep.strictly_decreasing
        assert sweep.suspect
        assert sweep.drop > 2
        assert all(s.open_hint for s in sweep.samples)

        for s in sweep.samples:
            assert s.image_radius == approx(s.modulus * s.radius)

        sweep = covering_sweep(load_system("identity"), RADII)

        assert not sweep.suspect
        assert sweep.drop == approx(1.0, abs=0.1)

        with raises(ValueError):
            covering_sweep(load_system("identity"), [])
