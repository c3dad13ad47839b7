# =============================================================================
# Linopen Library Endpoint
# =============================================================================
#
from linopen.expr import parse_expr, detect_control_affine, span_dimension_estimate
from linopen.feedback import (
    LinearFeedback,
    ExpressionFeedback,
    parse_feedback,
    gain_to_expressions,
)
from linopen.hautus import (
    spectral_profile,
    hautus_asymptotic,
    hautus_full_spectrum,
    kalman_controllability_rank,
)
from linopen.numlin import spectrum, singular_values, numerical_rank
from linopen.openness import (
    covering_bound,
    regularity_bound,
    lipschitz_bound,
    shifted_covering_lower_bound,
    openness_report,
    empirical_covering_modulus,
    covering_sweep,
)
from linopen.read import parse_system, read_system, read_gain
from linopen.report import build_report, format_report
from linopen.sim import (
    integrate_closed_loop,
    iterate_closed_loop,
    estimate_decay,
    verify_local_stability,
)
from linopen.synthesis import (
    staircase_decompose,
    place_poles,
    synthesize,
    closed_loop_spectrum,
)
from linopen.system import SystemSpec, evaluate, jacobian
from linopen.tabular import trajectory_to_dataframe, stability_report_to_dataframe
from linopen.utils import make_tolerances
from linopen.verdict import (
    analyze,
    analyze_continuous,
    analyze_discrete,
    perturbation_margin,
)
from linopen.version import __version__
from linopen.write import dumps_report, write_trajectory_csv

__all__ = [
    "parse_expr",
    "detect_control_affine",
    "span_dimension_estimate",
    "LinearFeedback",
    "ExpressionFeedback",
    "parse_feedback",
    "gain_to_expressions",
    "spectral_profile",
    "hautus_asymptotic",
    "hautus_full_spectrum",
    "kalman_controllability_rank",
    "spectrum",
    "singular_values",
    "numerical_rank",
    "covering_bound",
    "regularity_bound",
    "lipschitz_bound",
    "shifted_covering_lower_bound",
    "openness_report",
    "empirical_covering_modulus",
    "covering_sweep",
    "parse_system",
    "read_system",
    "read_gain",
    "build_report",
    "format_report",
    "integrate_closed_loop",
    "iterate_closed_loop",
    "estimate_decay",
    "verify_local_stability",
    "staircase_decompose",
    "place_poles",
    "synthesize",
    "closed_loop_spectrum",
    "SystemSpec",
    "evaluate",
    "jacobian",
    "trajectory_to_dataframe",
    "stability_report_to_dataframe",
    "make_tolerances",
    "analyze",
    "analyze_continuous",
    "analyze_discrete",
    "perturbation_margin",
    "dumps_report",
    "write_trajectory_csv",
    "__version__",
]

__toc__ = [
    {
        "title": "System definitions",
        "fns": [read_system, parse_system, parse_expr, evaluate, jacobian],
    },
    {
        "title": "Linear algebra",
        "fns": [spectrum, singular_values, numerical_rank],
    },
    {
        "title": "Openness",
        "fns": [
            covering_bound,
            regularity_bound,
            lipschitz_bound,
            shifted_covering_lower_bound,
            openness_report,
            empirical_covering_modulus,
            covering_sweep,
        ],
    },
    {
        "title": "Spectrum and Hautus tests",
        "fns": [
            spectral_profile,
            hautus_asymptotic,
            hautus_full_spectrum,
            kalman_controllability_rank,
        ],
    },
    {
        "title": "Verdicts",
        "fns": [
            analyze,
            analyze_continuous,
            analyze_discrete,
            perturbation_margin,
            detect_control_affine,
            span_dimension_estimate,
        ],
    },
    {
        "title": "Feedback synthesis",
        "fns": [
            staircase_decompose,
            place_poles,
            synthesize,
            closed_loop_spectrum,
            parse_feedback,
            gain_to_expressions,
        ],
    },
    {
        "title": "Simulation",
        "fns": [
            integrate_closed_loop,
            iterate_closed_loop,
            estimate_decay,
            verify_local_stability,
        ],
    },
    {
        "title": "Reading & Writing",
        "fns": [
            read_gain,
            build_report,
            format_report,
            dumps_report,
            write_trajectory_csv,
            trajectory_to_dataframe,
            stability_report_to_dataframe,
        ],
    },
]
