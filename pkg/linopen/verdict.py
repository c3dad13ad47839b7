# =============================================================================
# Linopen Verdict Engine
# =============================================================================
#
# Functions applying the stabilizability criteria of the rule table to the
# linearization of a system, in a fixed priority order, and returning a
# decision along with every rule that fired and its numeric evidence.
#
import logging
import numpy as np
from collections import namedtuple

from linopen.expr.affine import (
    detect_control_affine,
    evaluate_field,
    span_dimension_estimate,
)
from linopen.hautus import (
    hautus_asymptotic,
    hautus_full_spectrum,
    kalman_controllability_rank,
    spectral_profile,
)
from linopen.numlin import numerical_rank
from linopen.openness import openness_report, shifted_covering_lower_bound
from linopen.rules import (
    EXP_STABILIZABLE,
    ASY_STABILIZABLE,
    NOT_SMOOTHLY_EXP_STABILIZABLE,
    NOT_SMOOTHLY_ASY_STABILIZABLE,
    INCONCLUSIVE,
    POSITIVE_DECISIONS,
    fire,
)
from linopen.system import (
    CONTINUOUS,
    DISCRETE,
    DEFAULT_DELTA,
    is_linear,
    jacobian,
    singularity_warnings,
)
from linopen.utils import (
    DEFAULT_TOLERANCES,
    format_complex,
    format_number,
    halton_ball_points,
    is_unbounded,
)

logger = logging.getLogger(__name__)

NO_MARGIN_THRESHOLD = 1e-8
DRIFT_TOLERANCE = 1e-12
SPAN_RADIUS = 0.1

Evidence = namedtuple(
    "Evidence",
    (
        "linearization",
        "openness",
        "profile",
        "hautus",
        "hautus_strict",
        "kalman_rank",
        "linearized_controllable",
        "affine_fields",
        "span_dimension",
        "driftless",
        "independent_controls",
        "linear",
        "singularity_warnings",
    ),
)

Verdict = namedtuple(
    "Verdict",
    ("decision", "fired_rules", "flags", "evidence", "warnings", "notes"),
)

Analysis = namedtuple("Analysis", ("system", "evidence", "verdict"))


def threshold(eta) -> float:
    """
    The witness constant κ must be positive, so thresholds below 0 (among
    which the supremum of an empty set) are raised to 0.
    """
    if is_unbounded(eta):
        return 0.0

    return max(float(eta), 0.0)


def perturbation_margin(cov: float, profile) -> float:
    """
    Function returning the robustness margin of a covering bound against the
    threshold of the given spectral profile, i.e. the lower bound of the
    covering bound of the map shifted by the threshold. A positive margin is
    preserved by C1 perturbations vanishing along with their Jacobian at the
    equilibrium.

    Args:
        cov (float): covering bound.
        profile (SpectralProfile): spectral profile of A.

    Returns:
        float: the margin.
    """
    margin = shifted_covering_lower_bound(cov, threshold(profile.eta))

    if margin < NO_MARGIN_THRESHOLD:
        logger.warning(
            "covering bound %s leaves no margin over the threshold %s",
            format_number(cov),
            format_number(profile.eta),
        )

    return margin


def witness(cov: float, eta) -> float:
    return (cov + threshold(eta)) / 2


def collect_evidence(system, tolerances=DEFAULT_TOLERANCES, delta=DEFAULT_DELTA):
    """
    Function computing every quantity the verdict rules read: linearization,
    openness bounds, spectral profile, Hautus and Kalman tests and the
    control-affine structure of the system.

    Args:
        system (SystemSpec): target system.
        tolerances (Tolerances, optional): rank, classification and margin
            tolerances.
        delta (float, optional): radius of the ball scanned for division
            singularities. Defaults to 0.05.

    Returns:
        Evidence: the collected evidence.
    """
    lin = jacobian(system)
    openness = openness_report(lin, tol=tolerances.rank)
    profile = spectral_profile(lin.A, system.mode, tol_class=tolerances.classification)

    hautus = hautus_asymptotic(lin.A, lin.B, profile, tol=tolerances.rank)
    hautus_strict = hautus_asymptotic(
        lin.A, lin.B, profile, tol=tolerances.rank, strict=True
    )

    kalman_rank = kalman_controllability_rank(lin.A, lin.B, tol=tolerances.rank)
    controllable = hautus_full_spectrum(lin.A, lin.B, tol=tolerances.rank)

    if controllable != (kalman_rank == system.n):
        logger.warning(
            "hautus and kalman controllability tests disagree, the rank "
            "tolerance is probably too tight"
        )

    fields = detect_control_affine(system)
    span_dimension = None
    driftless = False
    independent_controls = False

    if fields is not None:
        span_dimension = span_dimension_estimate(
            fields, system.equilibrium_x, radius=SPAN_RADIUS, tol=tolerances.rank
        )

        points = [system.equilibrium_x] + list(
            halton_ball_points(system.equilibrium_x, SPAN_RADIUS, 4 * system.n)
        )
        driftless = all(
            np.max(np.abs(evaluate_field(fields[0], x))) <= DRIFT_TOLERANCE
            for x in points
        )

        columns = np.column_stack(
            [evaluate_field(g, system.equilibrium_x) for g in fields[1:]]
        )
        independent_controls = (
            bool(np.any(columns))
            and numerical_rank(columns, tol=tolerances.rank) == system.m
        )

    return Evidence(
        linearization=lin,
        openness=openness,
        profile=profile,
        hautus=hautus,
        hautus_strict=hautus_strict,
        kalman_rank=kalman_rank,
        linearized_controllable=controllable,
        affine_fields=fields,
        span_dimension=span_dimension,
        driftless=driftless,
        independent_controls=independent_controls,
        linear=is_linear(system),
        singularity_warnings=tuple(singularity_warnings(system, delta)),
    )


def summary(evidence, margin):
    openness = evidence.openness
    profile = evidence.profile

    data = {
        "cov": openness.cov_bound,
        "eta": profile.eta,
        "eta_tilde": profile.eta_tilde,
        "rank": openness.jacobian_rank,
        "linearly_open": openness.linearly_open,
        "margin": margin,
        "kappa": witness(openness.cov_bound, profile.eta),
        "symmetric_A": profile.symmetric,
    }

    if evidence.span_dimension is not None:
        data["span_dimension"] = evidence.span_dimension

    return data


def build_verdict(evidence, margin, positive, negative, warnings, notes):
    small_time = None

    # Controllability of the linearization gives small-time local controllability
    if evidence.profile.mode == CONTINUOUS and (
        evidence.linearized_controllable
        or any(rule.rule_id == "R3" for rule in positive)
    ):
        small_time = True

    flags = {
        "linearized_controllable": evidence.linearized_controllable,
        "small_time_locally_controllable": small_time,
    }

    if positive:
        decision = positive[0].conclusion

        if negative:
            message = (
                "sufficient and necessary rules disagree (%s against %s), "
                "tolerances are probably too tight"
                % (
                    ", ".join(r.rule_id for r in positive),
                    ", ".join(r.rule_id for r in negative),
                )
            )
            logger.warning(message)
            warnings.append(message)

    elif negative:
        if any(r.conclusion == NOT_SMOOTHLY_ASY_STABILIZABLE for r in negative):
            decision = NOT_SMOOTHLY_ASY_STABILIZABLE
        else:
            decision = NOT_SMOOTHLY_EXP_STABILIZABLE
    else:
        decision = INCONCLUSIVE

    verdict = Verdict(
        decision=decision,
        fired_rules=tuple(positive + negative),
        flags=flags,
        evidence=summary(evidence, margin),
        warnings=tuple(warnings),
        notes=tuple(notes),
    )

    logger.debug(
        "decision %s from rules %s",
        decision,
        [r.rule_id for r in verdict.fired_rules],
    )

    return verdict


def common_warnings(evidence, margin):
    warnings = list(evidence.profile.boundary_warnings)
    warnings.extend(evidence.singularity_warnings)

    if not evidence.hautus.holds:
        for z in evidence.hautus.failures:
            message = (
                "Hautus fails at λ=%s; linearization not stabilizable"
                % format_complex(z)
            )
            logger.warning(message)
            warnings.append(message)

    if evidence.openness.linearly_open and margin < NO_MARGIN_THRESHOLD:
        warnings.append(
            "covering bound %s leaves no margin over the threshold %s"
            % (
                format_number(evidence.openness.cov_bound),
                format_number(threshold(evidence.profile.eta)),
            )
        )

    return warnings


def perturbation_notes(positive, margin):
    if not positive:
        return []

    return [
        "C1 perturbations vanishing with their Jacobian at the equilibrium "
        "preserve this verdict (covering margin %s)" % format_number(margin)
    ]


def analyze_continuous(
    system,
    tolerances=DEFAULT_TOLERANCES,
    assert_bounded_perturbation: bool = False,
    evidence=None,
):
    """
    Function deciding whether the given continuous-time system can be locally
    stabilized by continuous stationary feedback.

    Sufficient rules are tried first, in the order R2, R1, R3, R7, and the
    first one that fires gives the decision. Necessary rules (R4, R5, R6,
    R7) are still evaluated and recorded.

    Args:
        system (SystemSpec): continuous-time system.
        tolerances (Tolerances, optional): rank, classification and margin
            tolerances.
        assert_bounded_perturbation (bool, optional): whether the user
            asserts that the system will only be perturbed by bounded C1
            terms, enabling the global controllability note on linear
            systems. Defaults to False.
        evidence (Evidence, optional): precomputed evidence.

    Returns:
        Verdict: the verdict.

    Example:
        from linopen import read_system, analyze_continuous

        analyze_continuous(read_system("./triple.stab")).decision
        >>> "EXP_STABILIZABLE_CONT_FEEDBACK"
    """
    if system.mode != CONTINUOUS:
        raise TypeError("expected a continuous-time system")

    if evidence is None:
        evidence = collect_evidence(system, tolerances)

    openness = evidence.openness
    profile = evidence.profile
    cov = openness.cov_bound
    open_ = openness.linearly_open
    eta = threshold(profile.eta)
    margin = perturbation_margin(cov, profile)
    tol_class = tolerances.classification

    positive = []
    negative = []
    notes = []
    warnings = common_warnings(evidence, margin)

    if (
        open_
        and not profile.unstable_is_empty
        and all(abs(z) <= tol_class for z in profile.unstable_set)
    ):
        positive.append(
            fire(
                "R2",
                EXP_STABILIZABLE,
                cov=cov,
                unstable_set=[format_complex(z) for z in profile.unstable_set],
            )
        )

    if profile.unstable_real_only and open_ and cov > eta + tolerances.margin:
        positive.append(
            fire(
                "R1",
                EXP_STABILIZABLE,
                cov=cov,
                eta=profile.eta,
                kappa=witness(cov, profile.eta),
                margin=margin,
            )
        )

    if (
        profile.spectrum_is_real
        and open_
        and cov > profile.eta_tilde + tolerances.margin
    ):
        positive.append(
            fire(
                "R3",
                EXP_STABILIZABLE,
                cov=cov,
                eta_tilde=profile.eta_tilde,
                margin=cov - profile.eta_tilde,
            )
        )

    if (
        evidence.affine_fields is not None
        and evidence.driftless
        and evidence.independent_controls
    ):
        if system.m == system.n:
            positive.append(fire("R7", EXP_STABILIZABLE, m=system.m, n=system.n))
        else:
            negative.append(
                fire("R7", NOT_SMOOTHLY_EXP_STABILIZABLE, m=system.m, n=system.n)
            )

    no_imaginary = all(abs(z.real) > tol_class for z in profile.unstable_set)

    if not open_:
        negative.append(
            fire(
                "R4",
                NOT_SMOOTHLY_EXP_STABILIZABLE,
                rank=openness.jacobian_rank,
                n=system.n,
            )
        )

        if no_imaginary:
            negative.append(
                fire(
                    "R5",
                    NOT_SMOOTHLY_ASY_STABILIZABLE,
                    rank=openness.jacobian_rank,
                    n=system.n,
                    hautus_strict_holds=evidence.hautus_strict.holds,
                )
            )

    if evidence.span_dimension is not None and evidence.span_dimension < system.n:
        negative.append(
            fire(
                "R6",
                NOT_SMOOTHLY_ASY_STABILIZABLE
                if no_imaginary
                else NOT_SMOOTHLY_EXP_STABILIZABLE,
                span_dimension=evidence.span_dimension,
                n=system.n,
            )
        )

    if not profile.unstable_real_only:
        notes.append(
            "unstable eigenvalues are not all real, the covering threshold "
            "criterion does not apply"
        )

    if profile.symmetric:
        notes.append("A is symmetric, hence its spectrum is real")

    if profile.unstable_is_empty:
        notes.append(
            "no eigenvalue has a nonnegative real part: linear openness is "
            "both necessary and sufficient for local exponential stabilization"
        )

    notes.extend(perturbation_notes(positive, margin))

    if (
        assert_bounded_perturbation
        and evidence.linear
        and profile.spectrum_is_real
        and open_
        and cov > max(max(z.real for z in profile.eigenvalues), 0.0)
    ):
        notes.append(
            "the linear system and its bounded C1 perturbations are globally "
            "controllable in any fixed time"
        )

    if not positive and not negative and open_ and profile.unstable_real_only:
        notes.append(
            "covering bound %s does not exceed the threshold %s (margin %s)"
            % (format_number(cov), format_number(eta), format_number(margin))
        )

    return build_verdict(evidence, margin, positive, negative, warnings, notes)


def analyze_discrete(system, tolerances=DEFAULT_TOLERANCES, evidence=None):
    """
    Function deciding whether the given discrete-time system can be locally
    asymptotically stabilized by continuous stationary feedback.

    Only sufficient rules exist in discrete time, tried in the order D3, D1,
    D2. When none fires the verdict is inconclusive.

    Args:
        system (SystemSpec): discrete-time system.
        tolerances (Tolerances, optional): rank, classification and margin
            tolerances.
        evidence (Evidence, optional): precomputed evidence.

    Returns:
        Verdict: the verdict.
    """
    if system.mode != DISCRETE:
        raise TypeError("expected a discrete-time system")

    if evidence is None:
        evidence = collect_evidence(system, tolerances)

    openness = evidence.openness
    profile = evidence.profile
    cov = openness.cov_bound
    open_ = openness.linearly_open
    eta = threshold(profile.eta)
    margin = perturbation_margin(cov, profile)

    positive = []
    notes = []
    warnings = common_warnings(evidence, margin)

    if open_ and all(abs(z) <= tolerances.classification for z in profile.eigenvalues):
        positive.append(fire("D3", ASY_STABILIZABLE, cov=cov))

    if profile.unstable_real_only and open_ and cov > eta + tolerances.margin:
        positive.append(
            fire(
                "D1",
                ASY_STABILIZABLE,
                cov=cov,
                eta=profile.eta,
                kappa=witness(cov, profile.eta),
                margin=margin,
            )
        )

    if (
        profile.spectrum_is_real
        and open_
        and cov > profile.eta_tilde + tolerances.margin
    ):
        positive.append(
            fire(
                "D2",
                ASY_STABILIZABLE,
                cov=cov,
                eta_tilde=profile.eta_tilde,
                margin=cov - profile.eta_tilde,
            )
        )

    if profile.symmetric:
        notes.append("A is symmetric, hence its spectrum is real")

    notes.extend(perturbation_notes(positive, margin))

    if not positive:
        notes.append(
            "no necessary condition is known for discrete-time systems, "
            "the verdict cannot be negative"
        )

        if open_ and profile.unstable_real_only:
            notes.append(
                "covering bound %s does not exceed the threshold %s (margin %s)"
                % (format_number(cov), format_number(eta), format_number(margin))
            )

    return build_verdict(evidence, margin, positive, [], warnings, notes)


def analyze(
    system,
    tolerances=DEFAULT_TOLERANCES,
    assert_bounded_perturbation: bool = False,
    delta: float = DEFAULT_DELTA,
) -> Analysis:
    """
    Function running the whole analysis pipeline on the given system:
    linearization, openness bounds, spectral profile, Hautus tests and
    verdict.

    Args:
        system (SystemSpec): target system.
        tolerances (Tolerances, optional): rank, classification and margin
            tolerances.
        assert_bounded_perturbation (bool, optional): see
            `analyze_continuous`. Defaults to False.
        delta (float, optional): radius of the ball scanned for division
            singularities. Defaults to 0.05.

    Returns:
        Analysis: the system, the collected evidence and the verdict.
    """
    evidence = collect_evidence(system, tolerances, delta=delta)

    if system.mode == CONTINUOUS:
        verdict = analyze_continuous(
            system,
            tolerances,
            assert_bounded_perturbation=assert_bounded_perturbation,
            evidence=evidence,
        )
    else:
        verdict = analyze_discrete(system, tolerances, evidence=evidence)

    return Analysis(system=system, evidence=evidence, verdict=verdict)


def is_positive(verdict) -> bool:
    return verdict.decision in POSITIVE_DECISIONS
