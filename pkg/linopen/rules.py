# =============================================================================
# Linopen Rule Table
# =============================================================================
#
# Fixed table of the stabilizability criteria the verdict engine applies,
# keyed by rule id. Reports only ever cite the strings of this table.
#
from collections import namedtuple

EXP_STABILIZABLE = "EXP_STABILIZABLE_CONT_FEEDBACK"
ASY_STABILIZABLE = "ASY_STABILIZABLE_CONT_FEEDBACK"
NOT_SMOOTHLY_EXP_STABILIZABLE = "NOT_SMOOTHLY_EXP_STABILIZABLE"
NOT_SMOOTHLY_ASY_STABILIZABLE = "NOT_SMOOTHLY_ASY_STABILIZABLE"
INCONCLUSIVE = "INCONCLUSIVE"

DECISIONS = (
    EXP_STABILIZABLE,
    ASY_STABILIZABLE,
    NOT_SMOOTHLY_EXP_STABILIZABLE,
    NOT_SMOOTHLY_ASY_STABILIZABLE,
    INCONCLUSIVE,
)

POSITIVE_DECISIONS = (EXP_STABILIZABLE, ASY_STABILIZABLE)

SUFFICIENT = "sufficient"
NECESSARY = "necessary"

class Rule(namedtuple("Rule", ("rule_id", "kind", "mode", "source", "statement"))):
    __slots__ = ()

    @property
    def citation(self) -> str:
        return "%s: %s" % (self.source, self.statement)


RULES = {
    rule.rule_id: rule
    for rule in [
        Rule(
            "R1",
            SUFFICIENT,
            "continuous",
            "Covering criterion, continuous time",
            "linear openness with a covering bound exceeding every real "
            "eigenvalue of nonnegative real part ensures local exponential "
            "stabilization by continuous stationary feedback",
        ),
        Rule(
            "R2",
            SUFFICIENT,
            "continuous",
            "Zero unstable spectrum criterion, continuous time",
            "when zero is the only eigenvalue of nonnegative real part, linear "
            "openness alone ensures local exponential stabilization by "
            "continuous stationary feedback",
        ),
        Rule(
            "R3",
            SUFFICIENT,
            "continuous",
            "Real spectrum controllability criterion, continuous time",
            "with a real spectrum and a covering bound exceeding the spectral "
            "radius, the system is locally exponentially stabilizable and "
            "small-time locally controllable",
        ),
        Rule(
            "R4",
            NECESSARY,
            "continuous",
            "Linear openness necessity, exponential stabilization",
            "local exponential stabilization by continuously differentiable "
            "stationary feedback requires linear openness at the equilibrium",
        ),
        Rule(
            "R5",
            NECESSARY,
            "continuous",
            "Linear openness necessity, hyperbolic linearization",
            "with no eigenvalue on the imaginary axis, local asymptotic "
            "stabilization by continuously differentiable stationary feedback "
            "requires linear openness at the equilibrium",
        ),
        Rule(
            "R6",
            NECESSARY,
            "continuous",
            "Span necessity for control-affine systems",
            "a control-affine system whose vector fields span fewer than n "
            "dimensions cannot be locally stabilized by continuously "
            "differentiable stationary feedback",
        ),
        Rule(
            "R7",
            SUFFICIENT,
            "continuous",
            "Driftless control-affine criterion",
            "a driftless control-affine system with independent control fields "
            "at the equilibrium is locally exponentially stabilizable by "
            "continuously differentiable stationary feedback if and only if "
            "it has as many controls as states",
        ),
        Rule(
            "D1",
            SUFFICIENT,
            "discrete",
            "Covering criterion, discrete time",
            "linear openness with a covering bound exceeding every real "
            "eigenvalue on or outside the unit circle ensures local asymptotic "
            "stabilization by continuous stationary feedback",
        ),
        Rule(
            "D2",
            SUFFICIENT,
            "discrete",
            "Real spectrum criterion, discrete time",
            "with a real spectrum and a covering bound exceeding the spectral "
            "radius, the discrete system is locally asymptotically stabilizable "
            "by continuous stationary feedback",
        ),
        Rule(
            "D3",
            SUFFICIENT,
            "discrete",
            "Nilpotent linearization criterion, discrete time",
            "when every eigenvalue is zero, linear openness alone ensures local "
            "asymptotic stabilization by continuous stationary feedback",
        ),
    ]
}

FiredRule = namedtuple("FiredRule", ("rule_id", "citation", "conclusion", "evidence"))


def fire(rule_id: str, conclusion: str, **evidence) -> FiredRule:
    """
    Function recording a rule firing, its citation being drawn from the
    fixed rule table.
    """
    if rule_id not in RULES:
        raise ValueError('unknown rule "%s"' % rule_id)

    if conclusion not in DECISIONS:
        raise ValueError('unknown decision "%s"' % conclusion)

    return FiredRule(rule_id, RULES[rule_id].citation, conclusion, evidence)
