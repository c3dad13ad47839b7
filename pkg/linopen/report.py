# =============================================================================
# Linopen Reports
# =============================================================================
#
# Assembly of the report documents emitted by the command line, and their
# human-readable rendering. Text and JSON carry the same numbers, the text
# printing them with 12 significant digits.
#
import json
from os.path import dirname, join

from linopen.feedback import gain_to_expressions
from linopen.rules import RULES
from linopen.utils import format_complex, format_number
from linopen.version import __version__

SIGN_CONVENTION = "u = Kx"
SCHEMA_PATH = join(dirname(__file__), "schemas", "report.schema.json")


def load_report_schema():
    """
    Function returning the JSON schema that every report validates against.
    """
    with open(SCHEMA_PATH, encoding="utf-8") as f:
        return json.load(f)


def system_to_dict(system):
    return {
        "mode": system.mode,
        "states": system.n,
        "controls": system.m,
        "equilibrium": {
            "x": system.equilibrium_x.tolist(),
            "u": system.equilibrium_u.tolist(),
        },
        "components": system.unparse(),
    }


def profile_to_dict(profile):
    return {
        "eigenvalues": list(profile.eigenvalues),
        "unstable_set": list(profile.unstable_set),
        "unstable_real_only": profile.unstable_real_only,
        "eta": profile.eta,
        "eta_tilde": profile.eta_tilde,
        "symmetric": profile.symmetric,
        "boundary_warnings": list(profile.boundary_warnings),
    }


def fired_rule_to_dict(rule):
    return {
        "rule_id": rule.rule_id,
        "kind": RULES[rule.rule_id].kind,
        "source": RULES[rule.rule_id].source,
        "citation": rule.citation,
        "conclusion": rule.conclusion,
        "evidence": dict(rule.evidence),
    }


def verdict_to_dict(verdict):
    return {
        "decision": verdict.decision,
        "fired_rules": [fired_rule_to_dict(rule) for rule in verdict.fired_rules],
        "flags": dict(verdict.flags),
        "evidence": dict(verdict.evidence),
        "warnings": list(verdict.warnings),
        "notes": list(verdict.notes),
    }


def gain_to_dict(gain, system):
    return {
        "K": gain.K.tolist(),
        "sign_convention": SIGN_CONVENTION,
        "target_poles": list(gain.target_poles),
        "achieved_poles": list(gain.achieved_poles),
        "controllable_dim": gain.controllable_dim,
        "expressions": gain_to_expressions(
            gain.K, system.equilibrium_x, system.equilibrium_u
        ),
    }


def fit_to_dict(fit):
    return {
        "M_hat": fit.M_hat,
        "alpha_hat": fit.alpha_hat,
        "residual": fit.residual,
        "certified": fit.certified,
    }


def validation_to_dict(validation, delta, samples):
    return {
        "passed": validation.passed,
        "delta": delta,
        "samples": samples,
        "alpha_lower_bound": validation.alpha_lower_bound,
        "worst": fit_to_dict(validation.worst),
        "failures": [x0.tolist() for x0 in validation.failures],
        "status": "empirically certified" if validation.passed else "not certified",
    }


def build_report(analysis, gain=None, validation=None, seed=None):
    """
    Function assembling the report document of an analysis, optionally
    completed by a synthesized gain and its local validation.

    Args:
        analysis (Analysis): result of `analyze`.
        gain (FeedbackGain, optional): synthesized gain.
        validation (tuple, optional): (StabilityReport, delta, samples)
            triple describing the validation of the gain.
        seed (int, optional): seed used by the synthesis.

    Returns:
        dict: the report, serializable with `dumps_report`.
    """
    evidence = analysis.evidence
    lin = evidence.linearization
    openness = evidence.openness

    report = {
        "tool": {"name": "linopen", "version": __version__},
        "seed": seed,
        "system": system_to_dict(analysis.system),
        "linearization": {"A": lin.A.tolist(), "B": lin.B.tolist()},
        "openness": {
            "cov_bound": openness.cov_bound,
            "reg_bound": openness.reg_bound,
            "lip_bound": openness.lip_bound,
            "jacobian_rank": openness.jacobian_rank,
            "linearly_open": openness.linearly_open,
        },
        "spectrum": profile_to_dict(evidence.profile),
        "hautus": {
            "holds": evidence.hautus.holds,
            "failures": list(evidence.hautus.failures),
            "strict_holds": evidence.hautus_strict.holds,
            "kalman_rank": evidence.kalman_rank,
        },
        "verdict": verdict_to_dict(analysis.verdict),
    }

    if gain is not None:
        report["gain"] = gain_to_dict(gain, analysis.system)

    if validation is not None:
        report["validation"] = validation_to_dict(*validation)

    return report


def covering_to_dict(sweep):
    return {
        "samples": [
            {
                "radius": sample.radius,
                "modulus": sample.modulus,
                "image_radius": sample.image_radius,
                "open_hint": sample.open_hint,
            }
            for sample in sweep.samples
        ],
        "strictly_decreasing": sweep.strictly_decreasing,
        "drop": sweep.drop,
        "suspect": sweep.suspect,
    }


def format_value(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower() if value is not None else "none"

    if isinstance(value, complex):
        return format_complex(value)

    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"

    if isinstance(value, str):
        return value

    if isinstance(value, int):
        return str(value)

    return format_number(value)


def format_matrix(name: str, M):
    lines = ["  %s =" % name]

    for row in M:
        lines.append("    " + "  ".join(format_number(v) for v in row))

    return lines


def format_report(report) -> str:
    """
    Function rendering a report document as human-readable text.

    Args:
        report (dict): report, as built by `build_report`.

    Returns:
        str: the text, ending with a newline.
    """
    system = report["system"]
    verdict = report["verdict"]
    openness = report["openness"]
    spectrum = report["spectrum"]

    lines = [
        "linopen %s" % report["tool"]["version"],
        "system: %s, n=%i, m=%i"
        % (system["mode"], system["states"], system["controls"]),
        "  x* = %s" % format_value(system["equilibrium"]["x"]),
        "  u* = %s" % format_value(system["equilibrium"]["u"]),
        "linearization:",
    ]

    lines.extend(format_matrix("A", report["linearization"]["A"]))
    lines.extend(format_matrix("B", report["linearization"]["B"]))

    lines.append("openness:")

    for key in ("cov_bound", "reg_bound", "lip_bound", "jacobian_rank", "linearly_open"):
        lines.append("  %s: %s" % (key, format_value(openness[key])))

    lines.append("spectrum:")
    lines.append("  eigenvalues: %s" % format_value(spectrum["eigenvalues"]))
    lines.append("  unstable: %s" % format_value(spectrum["unstable_set"]))
    lines.append("  eta: %s" % format_value(spectrum["eta"]))
    lines.append("  eta_tilde: %s" % format_value(spectrum["eta_tilde"]))

    hautus = report["hautus"]
    lines.append(
        "hautus: %s, kalman rank %i"
        % ("holds" if hautus["holds"] else "fails", hautus["kalman_rank"])
    )

    lines.append("decision: %s" % verdict["decision"])

    for rule in verdict["fired_rules"]:
        lines.append("  [%s] %s: %s" % (rule["rule_id"], rule["kind"], rule["conclusion"]))
        lines.append("    %s" % rule["citation"])

        for key in sorted(rule["evidence"]):
            lines.append("    %s = %s" % (key, format_value(rule["evidence"][key])))

    for key in sorted(verdict["flags"]):
        lines.append("  %s: %s" % (key, format_value(verdict["flags"][key])))

    for warning in verdict["warnings"]:
        lines.append("warning: %s" % warning)

    for note in verdict["notes"]:
        lines.append("note: %s" % note)

    gain = report.get("gain")

    if gain is not None:
        lines.append("gain (%s):" % gain["sign_convention"])
        lines.extend(format_matrix("K", gain["K"]))
        lines.append("  target poles: %s" % format_value(gain["target_poles"]))
        lines.append("  achieved poles: %s" % format_value(gain["achieved_poles"]))

    validation = report.get("validation")

    if validation is not None:
        lines.append(
            "validation at delta=%s over %i samples: %s, alpha >= %s"
            % (
                format_number(validation["delta"]),
                validation["samples"],
                validation["status"],
                format_number(validation["alpha_lower_bound"]),
            )
        )

    return "\n".join(lines) + "\n"


def format_covering(sweep) -> str:
    lines = ["%-14s %-14s %-14s %s" % ("r", "modulus", "image_radius", "open")]

    for sample in sweep.samples:
        lines.append(
            "%-14s %-14s %-14s %s"
            % (
                format_number(sample.radius),
                format_number(sample.modulus),
                format_number(sample.image_radius),
                "yes" if sample.open_hint else "no",
            )
        )

    if sweep.suspect:
        lines.append(
            "linear openness suspect: modulus drops by a factor %s across the sweep"
            % format_number(sweep.drop)
        )

    return "\n".join(lines) + "\n"


def format_decay(trajectory, fit) -> str:
    if fit is None:
        return "decay: initial state is the equilibrium\n"

    return "decay: alpha_hat=%s M_hat=%s residual=%s certified=%s%s\n" % (
        format_number(fit.alpha_hat),
        format_number(fit.M_hat),
        format_number(fit.residual),
        "yes" if fit.certified else "no",
        ", diverged at t=%s" % format_number(trajectory.times[-1])
        if trajectory.diverged
        else "",
    )
