# =============================================================================
# Linopen Feedback Synthesis Unit Tests
# =============================================================================
import numpy as np
from pytest import raises, approx

from test.utils import load_system, linear_system, random_controllable_pair

from linopen.exceptions import PlacementError, UncontrollableModeError
from linopen.read import parse_system
from linopen.synthesis import (
    staircase_decompose,
    place_poles,
    synthesize,
    closed_loop_spectrum,
    default_poles,
    avoid_spectrum,
)
from linopen.utils import match_poles

PLANAR_A = [[0.0, 1.0], [0.0, 0.0]]
PLANAR_B = [[0.0], [1.0]]


class TestStaircase(object):
    def test_controllable(self):
        T, r = staircase_decompose(PLANAR_A, PLANAR_B)

        assert r == 2
        assert T.tolist() == np.eye(2).tolist()

    def test_partially_controllable(self):
        A = np.array([[1.0, 0.0], [0.0, 0.0]])
        B = np.array([[0.0], [1.0]])

        T, r = staircase_decompose(A, B)

        assert r == 1
        assert T.T @ T == approx(np.eye(2))
        assert (T.T @ B)[1:] == approx(np.zeros((1, 1)))
        assert (T.T @ A @ T)[1:, :1] == approx(np.zeros((1, 1)))

    def test_no_control(self):
        T, r = staircase_decompose(np.eye(2), np.zeros((2, 1)))

        assert r == 0
        assert T.tolist() == np.eye(2).tolist()


class TestPlacePoles(object):
    def test_single_input(self):
        K = place_poles(PLANAR_A, PLANAR_B, [-1, -2])

        assert K == approx(np.array([[-2.0, -3.0]]))

    def test_closed_loop_spectrum(self):
        poles = closed_loop_spectrum(PLANAR_A, PLANAR_B, [[-1.0, -1.0]])

        assert poles == approx(
            (complex(-0.5, -(3**0.5) / 2), complex(-0.5, (3**0.5) / 2))
        )

    def test_complex_poles(self):
        K = place_poles(PLANAR_A, PLANAR_B, [-1 + 1j, -1 - 1j])

        assert match_poles(closed_loop_spectrum(PLANAR_A, PLANAR_B, K), [-1 + 1j, -1 - 1j]) < 1e-9

    def test_multi_input(self):
        A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        B = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        desired = [-1.0, -2.0 + 1j, -2.0 - 1j]

        K = place_poles(A, B, desired, seed=5)

        assert K.shape == (2, 3)
        assert match_poles(closed_loop_spectrum(A, B, K), desired) < 1e-6
        assert place_poles(A, B, desired, seed=5).tolist() == K.tolist()

    def test_errors(self):
        with raises(PlacementError, match="expected 2"):
            place_poles(PLANAR_A, PLANAR_B, [-1])

        with raises(PlacementError, match="uncontrollable"):
            place_poles(np.eye(2), [[1.0], [0.0]], [-1, -2])

        with raises(PlacementError, match="conjugate"):
            place_poles(PLANAR_A, PLANAR_B, [-1 + 1j, -2])

        with raises(PlacementError, match="eigenvalue of A"):
            place_poles(PLANAR_A, PLANAR_B, [0, -1])

    def test_random_pairs(self):
        rng = np.random.default_rng(11)

        for i in range(100):
            n = int(rng.integers(1, 6))
            m = int(rng.integers(1, 3))
            A, B = random_controllable_pair(rng, n, m)

            desired = [-1.0 - 0.5 * k for k in range(n)]

            if n >= 2 and i % 2 == 0:
                desired[:2] = [-0.7 + 0.4j, -0.7 - 0.4j]

            K = place_poles(A, B, desired, seed=i)

            assert match_poles(closed_loop_spectrum(A, B, K), desired) <= 1e-6


class TestDefaultPoles(object):
    def test_default_poles(self):
        assert default_poles(3, "continuous", 0.0) == [-1.0, -1.5, -2.0]
        assert default_poles(2, "discrete", 1.5) == approx([0.5, 0.45])
        assert default_poles(1, "discrete", 1.5) == [0.5]

    def test_avoid_spectrum(self):
        assert avoid_spectrum([-1.0, -1.5], [-1.0], "continuous") == [-1.5, -2.0]
        assert avoid_spectrum([0.5], [0.5], "discrete") == [approx(0.49)]


class TestSynthesize(object):
    def test_planar(self):
        gain = synthesize(load_system("planar"))

        assert gain.controllable_dim == 2
        assert gain.target_poles == approx((-1.5, -1.0))
        assert all(z.real < 0 for z in gain.achieved_poles)
        assert gain.K.shape == (1, 2)

    def test_triple(self):
        gain = synthesize(load_system("triple"))

        assert gain.controllable_dim == 3
        assert all(z.real < -1 for z in gain.achieved_poles)

    def test_user_poles(self):
        gain = synthesize(load_system("planar"), poles=[-1, -2])

        assert gain.K == approx(np.array([[-2.0, -3.0]]))

        with raises(PlacementError, match="expected 2 poles"):
            synthesize(load_system("planar"), poles=[-1])

        with raises(PlacementError, match="not stable"):
            synthesize(load_system("planar"), poles=[1, -1])

    def test_discrete(self):
        gain = synthesize(load_system("discrete15"))

        assert gain.K == approx(np.array([[-1.0]]))
        assert gain.achieved_poles == approx((0.5,))
        assert gain.mode == "discrete"

    def test_stable_uncontrollable_part(self):
        system = parse_system(
            "mode continuous\nstates 2\ncontrols 1\neq x = 0 0\neq u = 0\n"
            "f1 = x1 + u1\nf2 = -x2\n"
        )

        gain = synthesize(system)

        assert gain.controllable_dim == 1
        assert gain.target_poles == approx((-2.0, -1.0))
        assert gain.achieved_poles == approx((-2.0, -1.0))

    def test_uncontrollable_unstable_mode(self):
        with raises(UncontrollableModeError) as info:
            synthesize(load_system("uncontrollable"))

        assert info.value.eigenvalue == 1
        assert str(info.value) == "uncontrollable unstable mode at λ=1"

    def test_uncontrollable_spectrum_is_kept(self):
        rng = np.random.default_rng(17)

        for _ in range(30):
            n = int(rng.integers(2, 6))
            m = int(rng.integers(1, 3))
            k = int(rng.integers(1, n))

            # Reachable upper block, stable unreachable lower block, rotated
            A = rng.standard_normal((n, n))
            A[k:, :k] = 0
            shift = np.abs(np.linalg.eigvals(A[k:, k:])).max() + 1
            A[k:, k:] -= shift * np.eye(n - k)
            B = np.zeros((n, m))
            B[:k] = rng.standard_normal((k, m))

            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            kept = np.linalg.eigvals(A[k:, k:])

            gain = synthesize(linear_system(Q @ A @ Q.T, Q @ B))
            achieved = np.array(gain.achieved_poles)

            assert gain.controllable_dim <= k

            for z in kept:
                assert np.min(np.abs(achieved - z)) < 1e-8 * max(1.0, abs(z))
