# =============================================================================
# Linopen Command Line Interface
# =============================================================================
#
# Front end running the analysis pipeline on system files. Reports and CSV go
# to stdout, diagnostics to stderr. Exit codes are 0 on success (inconclusive
# verdicts included), 2 on input errors and 3 on violated preconditions.
#
import sys
import json
import logging
from argparse import ArgumentParser, ArgumentTypeError

from linopen.exceptions import (
    DimensionError,
    EvaluationError,
    ExpressionError,
    PreconditionError,
    SystemFileError,
    SystemValidationError,
    UncontrollableModeError,
)
from linopen.feedback import LinearFeedback, parse_feedback
from linopen.openness import covering_sweep
from linopen.read import read_gain, read_system
from linopen.report import (
    build_report,
    covering_to_dict,
    format_covering,
    format_decay,
    format_report,
)
from linopen.sim import (
    DEFAULT_HORIZON,
    DEFAULT_STEP,
    DEFAULT_STEPS,
    estimate_decay,
    integrate_closed_loop,
    iterate_closed_loop,
    verify_local_stability,
)
from linopen.synthesis import synthesize
from linopen.system import CONTINUOUS, DEFAULT_DELTA
from linopen.utils import make_tolerances
from linopen.verdict import analyze, is_positive
from linopen.version import __version__
from linopen.write import dumps_report, write_trajectory_csv

logger = logging.getLogger("linopen")

INPUT_ERROR = 2
PRECONDITION_ERROR = 3

INPUT_ERRORS = (
    SystemFileError,
    SystemValidationError,
    ExpressionError,
    DimensionError,
    EvaluationError,
    OSError,
    ValueError,
)

DEFAULT_RADII = "0.1,0.05,0.025"

# Options whose value may start with a minus sign, e.g. --poles -1,-2
SIGNED_VALUE_OPTIONS = ("--poles", "--x0", "--radius", "--feedback")


def float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ArgumentTypeError('expected comma-separated numbers, got "%s"' % text)


def complex_list(text: str):
    try:
        return [
            complex(v.strip().replace("i", "j")) for v in text.split(",") if v.strip()
        ]
    except ValueError:
        raise ArgumentTypeError('expected comma-separated poles, got "%s"' % text)


def add_tolerance_arguments(parser):
    parser.add_argument("--tol-rank", type=float, help="absolute rank tolerance")
    parser.add_argument(
        "--tol-class",
        type=float,
        help="width of the stability boundary band (default: 1e-8)",
    )
    parser.add_argument(
        "--margin",
        type=float,
        help="margin the covering bound must exceed its threshold by (default: 0)",
    )
    parser.add_argument(
        "--delta",
        type=float,
        default=DEFAULT_DELTA,
        help="radius of the probed ball around the equilibrium (default: %(default)s)",
    )
    parser.add_argument(
        "--json", action="store_true", help="emit the JSON report instead of text"
    )


def join_signed_values(argv):
    """
    Glues the options of SIGNED_VALUE_OPTIONS to their value as "--x0=-0.1,0",
    which argparse would otherwise read as an unknown option.
    """
    joined = []
    i = 0

    while i < len(argv):
        arg = argv[i]

        if arg in SIGNED_VALUE_OPTIONS and i + 1 < len(argv):
            joined.append("%s=%s" % (arg, argv[i + 1]))
            i += 2
            continue

        joined.append(arg)
        i += 1

    return joined


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="linopen",
        description="Local stabilizability analysis of nonlinear control systems.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log pipeline steps to stderr"
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze_parser = subparsers.add_parser(
        "analyze", help="decide stabilizability from the linearization"
    )
    analyze_parser.add_argument("path", help="system file")
    add_tolerance_arguments(analyze_parser)
    analyze_parser.add_argument(
        "--assert-bounded",
        action="store_true",
        help="assert the nonlinear part is bounded, enabling global notes",
    )

    synthesize_parser = subparsers.add_parser(
        "synthesize", help="build a stabilizing linear gain u = Kx"
    )
    synthesize_parser.add_argument("path", help="system file")
    add_tolerance_arguments(synthesize_parser)
    synthesize_parser.add_argument(
        "--poles",
        type=complex_list,
        help="poles of the controllable part, e.g. --poles=-1,-2",
    )
    synthesize_parser.add_argument(
        "--seed", type=int, default=0, help="seed of the placement (default: 0)"
    )
    synthesize_parser.add_argument(
        "--force",
        action="store_true",
        help="synthesize even when the verdict is not positive",
    )
    synthesize_parser.add_argument(
        "--validate",
        action="store_true",
        help="check the gain by closed-loop simulation around the equilibrium",
    )
    synthesize_parser.add_argument(
        "--samples",
        type=int,
        default=100,
        help="initial conditions of the validation (default: %(default)s)",
    )

    covering_parser = subparsers.add_parser(
        "covering", help="estimate the covering modulus of f over several radii"
    )
    covering_parser.add_argument("path", help="system file")
    covering_parser.add_argument(
        "--radius",
        type=float_list,
        default=float_list(DEFAULT_RADII),
        help="comma-separated radii (default: %s)" % DEFAULT_RADII,
    )
    covering_parser.add_argument(
        "--json", action="store_true", help="emit JSON instead of a table"
    )

    simulate_parser = subparsers.add_parser(
        "simulate", help="simulate the closed loop and print it as CSV"
    )
    simulate_parser.add_argument("path", help="system file")
    source = simulate_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--gain", help="gain file, or inline JSON matrix")
    source.add_argument(
        "--feedback", help='feedback expressions in x1..xn, separated by ";"'
    )
    simulate_parser.add_argument(
        "--x0", type=float_list, required=True, help="initial state, e.g. 0.1,0"
    )
    simulate_parser.add_argument(
        "-T",
        type=float,
        default=DEFAULT_HORIZON,
        help="horizon in continuous time (default: %(default)s)",
    )
    simulate_parser.add_argument(
        "--dt",
        type=float,
        default=DEFAULT_STEP,
        help="integration step (default: %(default)s)",
    )
    simulate_parser.add_argument(
        "--steps",
        type=int,
        default=DEFAULT_STEPS,
        help="iterations in discrete time (default: %(default)s)",
    )
    simulate_parser.add_argument("--output", help="CSV file to write instead of stdout")

    return parser


def tolerances_from_args(args):
    return make_tolerances(
        rank=args.tol_rank, classification=args.tol_class, margin=args.margin
    )


def cmd_analyze(args, out):
    system = read_system(args.path)
    analysis = analyze(
        system,
        tolerances_from_args(args),
        assert_bounded_perturbation=args.assert_bounded,
        delta=args.delta,
    )

    report = build_report(analysis)
    out.write(dumps_report(report) if args.json else format_report(report))

    return report


def cmd_synthesize(args, out):
    system = read_system(args.path)
    tolerances = tolerances_from_args(args)
    analysis = analyze(system, tolerances, delta=args.delta)

    hautus = analysis.evidence.hautus

    if not hautus.holds:
        raise UncontrollableModeError(hautus.failures[0])

    if not is_positive(analysis.verdict) and not args.force:
        raise PreconditionError(
            "verdict is %s, use --force to synthesize nonetheless"
            % analysis.verdict.decision
        )

    gain = synthesize(system, seed=args.seed, poles=args.poles, tolerances=tolerances)
    validation = None

    if args.validate:
        stability = verify_local_stability(
            system,
            LinearFeedback.for_system(system, gain.K),
            delta=args.delta,
            samples=args.samples,
        )
        validation = (stability, args.delta, args.samples)

    report = build_report(analysis, gain=gain, validation=validation, seed=args.seed)
    out.write(dumps_report(report) if args.json else format_report(report))

    return report


def cmd_covering(args, out):
    system = read_system(args.path)
    sweep = covering_sweep(system, args.radius)

    if args.json:
        out.write(dumps_report(covering_to_dict(sweep)))
    else:
        out.write(format_covering(sweep))

    return sweep


def load_feedback(args, system):
    if args.feedback is not None:
        return parse_feedback(args.feedback, system.n, system.m)

    target = args.gain

    if target.lstrip().startswith(("[", "{")):
        try:
            target = json.loads(target)
        except json.JSONDecodeError as e:
            raise SystemFileError("inline gain is not valid JSON: %s" % e)

    K = read_gain(target, n=system.n, m=system.m)

    return LinearFeedback.for_system(system, K)


def cmd_simulate(args, out, err):
    system = read_system(args.path)
    feedback = load_feedback(args, system)

    if system.mode == CONTINUOUS:
        trajectory = integrate_closed_loop(
            system, feedback, args.x0, T=args.T, dt=args.dt
        )
    else:
        trajectory = iterate_closed_loop(system, feedback, args.x0, steps=args.steps)

    try:
        fit = estimate_decay(trajectory)
    except ValueError:
        fit = None

    if args.output is not None:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            write_trajectory_csv(trajectory, f)

        summary = out
    else:
        write_trajectory_csv(trajectory, out)
        summary = err

    if not feedback.is_smooth:
        summary.write(
            "note: feedback is not recognized as C1, uniqueness of solutions is "
            "not checked\n"
        )

    summary.write(format_decay(trajectory, fit))

    return trajectory


def main(argv=None, out=None, err=None) -> int:
    """
    Entry point of the command line, returning its exit code.
    """
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err

    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(join_signed_values(argv))

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=err,
    )

    logger.debug("running %s on %s", args.command, args.path)

    try:
        if args.command == "analyze":
            cmd_analyze(args, out)
        elif args.command == "synthesize":
            cmd_synthesize(args, out)
        elif args.command == "covering":
            cmd_covering(args, out)
        else:
            cmd_simulate(args, out, err)

    except INPUT_ERRORS as e:
        err.write("linopen: error: %s\n" % e)
        return INPUT_ERROR

    except PreconditionError as e:
        err.write("linopen: error: %s\n" % e)
        return PRECONDITION_ERROR

    return 0


if __name__ == "__main__":
    sys.exit(main())
