# =============================================================================
# Linopen Closed-Loop Simulation
# =============================================================================
#
# Integration (continuous time) and iteration (discrete time) of a system
# closed by a stationary feedback, fitting of the exponential decay
# |x(t) - x*| <= M exp(-a t) |x0 - x*| on the resulting trajectories, and a
# sampled validator of local exponential stability around the equilibrium.
#
# Batches of initial conditions are run together, one column per trajectory.
#
import logging
import numpy as np
from collections import namedtuple

from linopen.system import CONTINUOUS, DEFAULT_DELTA, DISCRETE
from linopen.utils import halton_directions

logger = logging.getLogger(__name__)

DIVERGENCE_THRESHOLD = 1e6
RICHARDSON_TOLERANCE = 1e-8
TRANSIENT_SKIP = 0.1
LOG_FLOOR = 1e-300
CERTIFICATION_RATE = 1e-6
BOUND_SLACK = 1e-6

DEFAULT_HORIZON = 20.0
DEFAULT_STEP = 1e-3
DEFAULT_STEPS = 200

VALIDATION_HORIZON = 10.0
VALIDATION_STEP = 1e-2
VALIDATION_SHELLS = (1.0, 0.5, 0.25)


class Trajectory(
    namedtuple(
        "Trajectory",
        ("times", "states", "feedback_used", "diverged", "equilibrium", "mode"),
    )
):
    """
    Sampled closed-loop trajectory.

    Attributes:
        times (np.ndarray): increasing sample times, or step indices in
            discrete time.
        states (np.ndarray): (len(times), n) array of states, the first one
            being the initial condition. Every entry is finite.
        feedback_used (str): description of the feedback law.
        diverged (bool): whether the trajectory left the divergence threshold
            or became non-finite, in which case it was truncated.
        equilibrium (np.ndarray): equilibrium state the decay is measured to.
        mode (str): "continuous" or "discrete".
    """

    __slots__ = ()

    def __len__(self) -> int:
        return len(self.times)

    @property
    def deviations(self):
        return np.linalg.norm(self.states - self.equilibrium, axis=1)

    @property
    def final_state(self):
        return self.states[-1]


DecayFit = namedtuple("DecayFit", ("M_hat", "alpha_hat", "residual", "certified"))

StabilityReport = namedtuple(
    "StabilityReport", ("passed", "worst", "failures", "alpha_lower_bound", "fits")
)


def closed_loop_field(system, feedback):
    def field(X):
        return system.batch_field(X, feedback.control(X))

    return field


def check_feedback(system, feedback):
    if feedback.n != system.n:
        raise ValueError(
            "feedback takes %i states but the system has %i" % (feedback.n, system.n)
        )

    if feedback.m != system.m:
        raise ValueError(
            "feedback yields %i controls but the system has %i"
            % (feedback.m, system.m)
        )


def initial_batch(system, x0):
    X0 = np.array(x0, dtype=float)

    if X0.ndim == 1:
        X0 = X0.reshape(-1, 1)

    if X0.shape[0] != system.n:
        raise ValueError(
            "initial condition should have %i entries but has %i"
            % (system.n, X0.shape[0])
        )

    if not np.all(np.isfinite(X0)):
        raise ValueError("initial condition should be finite")

    return X0


def rk4_step(field, X, dt, k1=None):
    if k1 is None:
        k1 = field(X)

    k2 = field(X + dt / 2 * k1)
    k3 = field(X + dt / 2 * k2)
    k4 = field(X + dt * k3)

    return X + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def richardson_step(field, X, dt):
    """
    One RK4 step checked against two half steps. Columns whose Richardson
    error estimate exceeds the tolerance keep the half-step result.
    """
    k1 = field(X)
    full = rk4_step(field, X, dt, k1)
    middle = rk4_step(field, X, dt / 2, k1)
    halves = rk4_step(field, middle, dt / 2)

    with np.errstate(invalid="ignore"):
        error = np.max(np.abs(halves - full), axis=0) / 15

    refine = ~(error <= RICHARDSON_TOLERANCE)

    if not np.any(refine):
        return full

    return np.where(refine[None, :], halves, full)


def run_batch(system, X0, advance, count):
    """
    Runs `count` updates of the given batch, freezing columns as soon as they
    diverge, and returns the stacked states along with the last valid index
    of every column.
    """
    n, k = X0.shape
    equilibrium = system.equilibrium_x[:, None]

    states = np.empty((count + 1, n, k))
    states[0] = X0

    ends = np.full(k, count)
    alive = np.ones(k, dtype=bool)
    X = X0

    for step in range(1, count + 1):
        with np.errstate(all="ignore"):
            Y = advance(X)
            norms = np.linalg.norm(Y - equilibrium, axis=0)

        finite = np.all(np.isfinite(Y), axis=0)
        broken = alive & ~(norms <= DIVERGENCE_THRESHOLD)

        # A finite state past the threshold is the last one recorded
        moving = alive & finite

        if np.any(broken):
            ends[broken & ~finite] = step - 1
            ends[broken & finite] = step
            alive &= ~broken

        X = np.where(moving[None, :], Y, X)
        states[step] = X

        if not np.any(alive):
            states = states[: step + 1]
            break

    return states, ends, ~alive


def split_batch(system, feedback, times, states, ends, diverged):
    trajectories = []

    for j in range(states.shape[2]):
        end = ends[j] + 1

        trajectories.append(
            Trajectory(
                times=times[:end],
                states=states[:end, :, j],
                feedback_used=feedback.describe(),
                diverged=bool(diverged[j]),
                equilibrium=np.array(system.equilibrium_x),
                mode=system.mode,
            )
        )

    return trajectories


def integrate_batch(system, feedback, X0, T, dt):
    if system.mode != CONTINUOUS:
        raise TypeError("integration requires a continuous system")

    if dt <= 0:
        raise ValueError("dt should be > 0")

    if T < dt:
        raise ValueError("T should be >= dt")

    check_feedback(system, feedback)

    count = int(round(T / dt))
    field = closed_loop_field(system, feedback)

    states, ends, diverged = run_batch(
        system, X0, lambda X: richardson_step(field, X, dt), count
    )

    times = dt * np.arange(count + 1)

    return split_batch(system, feedback, times, states, ends, diverged)


def iterate_batch(system, feedback, X0, steps):
    if system.mode != DISCRETE:
        raise TypeError("iteration requires a discrete system")

    if steps < 1:
        raise ValueError("steps should be >= 1")

    check_feedback(system, feedback)

    field = closed_loop_field(system, feedback)
    states, ends, diverged = run_batch(system, X0, field, steps)

    times = np.arange(steps + 1, dtype=float)

    return split_batch(system, feedback, times, states, ends, diverged)


def integrate_closed_loop(
    system, feedback, x0, T: float = DEFAULT_HORIZON, dt: float = DEFAULT_STEP
) -> Trajectory:
    """
    Function integrating the continuous closed loop x' = f(x, u(x)) from x0
    with a fixed-step fourth-order Runge-Kutta scheme. Each step is compared
    to two half steps and the half-step result is kept whenever the
    Richardson error estimate exceeds 1e-8.

    The trajectory is truncated and flagged as diverged as soon as its
    distance to the equilibrium exceeds 1e6 or stops being finite.

    Args:
        system (SystemSpec): continuous system.
        feedback (LinearFeedback or ExpressionFeedback): feedback law.
        x0 (array_like): initial state.
        T (float, optional): horizon. Defaults to 20.
        dt (float, optional): step. Defaults to 1e-3.

    Returns:
        Trajectory: the sampled trajectory.
    """
    X0 = initial_batch(system, x0)

    if X0.shape[1] != 1:
        raise ValueError("x0 should be a single state")

    trajectory = integrate_batch(system, feedback, X0, T, dt)[0]

    if trajectory.diverged:
        logger.warning("closed loop diverged at t=%g", trajectory.times[-1])

    return trajectory


def iterate_closed_loop(
    system, feedback, x0, steps: int = DEFAULT_STEPS
) -> Trajectory:
    """
    Function iterating the discrete closed loop x_{k+1} = f(x_k, u(x_k)) from
    x0, with the same divergence handling as `integrate_closed_loop`.

    Args:
        system (SystemSpec): discrete system.
        feedback (LinearFeedback or ExpressionFeedback): feedback law.
        x0 (array_like): initial state.
        steps (int, optional): number of iterations. Defaults to 200.

    Returns:
        Trajectory: the trajectory, indexed by step.
    """
    X0 = initial_batch(system, x0)

    if X0.shape[1] != 1:
        raise ValueError("x0 should be a single state")

    trajectory = iterate_batch(system, feedback, X0, steps)[0]

    if trajectory.diverged:
        logger.warning("closed loop diverged at step %i", int(trajectory.times[-1]))

    return trajectory


def estimate_decay(trajectory: Trajectory) -> DecayFit:
    """
    Function fitting the exponential decay of a trajectory towards its
    equilibrium.

    The rate is minus the slope of a least squares line fitted to the log of
    the distance to the equilibrium, the first 10% of samples being skipped
    to let transients settle. M_hat is then the smallest constant >= 1 such
    that every sample satisfies |x(t)| <= M_hat exp(-alpha_hat t) |x0|.

    Args:
        trajectory (Trajectory): trajectory to fit.

    Returns:
        DecayFit: the fit, certified when alpha_hat > 0 and the trajectory
        did not diverge.
    """
    times = np.asarray(trajectory.times, dtype=float)
    norms = trajectory.deviations

    if norms[0] == 0:
        raise ValueError("initial state should differ from the equilibrium")

    if len(times) < 2:
        raise ValueError("trajectory should have at least two samples")

    skip = int(TRANSIENT_SKIP * len(times))

    if len(times) - skip < 2:
        skip = 0

    logs = np.log(np.maximum(norms, LOG_FLOOR))

    slope, intercept = np.polyfit(times[skip:], logs[skip:], 1)
    residual = float(
        np.sqrt(np.mean((logs[skip:] - (slope * times[skip:] + intercept)) ** 2))
    )

    alpha = float(-slope)

    with np.errstate(over="ignore"):
        ratios = norms / (norms[0] * np.exp(-alpha * times))

    M = max(1.0, float(np.max(ratios)))

    return DecayFit(
        M_hat=M,
        alpha_hat=alpha,
        residual=residual,
        certified=bool(
            alpha > CERTIFICATION_RATE and np.isfinite(M) and not trajectory.diverged
        ),
    )


def satisfies_decay(trajectory: Trajectory, fit: DecayFit) -> bool:
    """
    Function checking the decay bound of a fit against every sample of the
    trajectory.
    """
    times = np.asarray(trajectory.times, dtype=float)
    norms = trajectory.deviations
    bound = fit.M_hat * np.exp(-fit.alpha_hat * times) * norms[0] * (1 + BOUND_SLACK)

    return bool(np.all(norms <= bound))


def validation_points(system, delta: float, samples: int):
    directions = halton_directions(system.n, samples)
    radii = np.array(
        [delta * VALIDATION_SHELLS[i % len(VALIDATION_SHELLS)] for i in range(samples)]
    )

    return system.equilibrium_x[:, None] + (directions * radii[:, None]).T


def verify_local_stability(
    system,
    feedback,
    delta: float = DEFAULT_DELTA,
    samples: int = 100,
    T: float = VALIDATION_HORIZON,
    dt: float = VALIDATION_STEP,
    steps: int = DEFAULT_STEPS,
) -> StabilityReport:
    """
    Function empirically checking that the given feedback locally
    exponentially stabilizes the system, by simulating the closed loop from
    initial conditions spread deterministically on the spheres of radius
    delta, delta / 2 and delta / 4 around the equilibrium.

    Every decay fit must be certified, the validation then holding with the
    smallest fitted rate as common decay rate. This is evidence, not a proof.

    Args:
        system (SystemSpec): target system.
        feedback (LinearFeedback or ExpressionFeedback): feedback law.
        delta (float, optional): radius of the probed ball. Defaults to 0.05.
        samples (int, optional): number of initial conditions. Defaults to
            100.
        T (float, optional): horizon in continuous time. Defaults to 10.
        dt (float, optional): step in continuous time. Defaults to 1e-2.
        steps (int, optional): iterations in discrete time. Defaults to 200.

    Returns:
        StabilityReport: whether the validation passed, the worst fit, the
        failing initial conditions and the common rate.
    """
    if delta <= 0:
        raise ValueError("delta should be > 0")

    if samples < 1:
        raise ValueError("samples should be >= 1")

    X0 = validation_points(system, delta, samples)

    if system.mode == CONTINUOUS:
        trajectories = integrate_batch(system, feedback, X0, T, dt)
    else:
        trajectories = iterate_batch(system, feedback, X0, steps)

    fits = [estimate_decay(trajectory) for trajectory in trajectories]
    failures = [
        trajectory.states[0]
        for trajectory, fit in zip(trajectories, fits)
        if not fit.certified
    ]

    worst = min(fits, key=lambda fit: (fit.certified, fit.alpha_hat))
    alpha_lower_bound = min(fit.alpha_hat for fit in fits)

    passed = not failures and alpha_lower_bound > 0

    logger.debug(
        "local validation at delta=%g: %s, alpha >= %g",
        delta,
        "pass" if passed else "fail",
        alpha_lower_bound,
    )

    return StabilityReport(
        passed=passed,
        worst=worst,
        failures=failures,
        alpha_lower_bound=alpha_lower_bound,
        fits=fits,
    )
