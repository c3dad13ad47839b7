# =============================================================================
# Linopen Reading Functions
# =============================================================================
#
# Functions used to read system definition files and gain files.
#
# A system file is line-oriented UTF-8 text:
#
#   # comment
#   mode continuous
#   states 2
#   controls 1
#   eq x = 0 0
#   eq u = 0
#   f1 = x1^3 + x2
#   f2 = u1
#
import re
import json
import numpy as np
from pathlib import Path
from io import IOBase

from linopen.exceptions import ExpressionError, SystemFileError
from linopen.expr.parser import parse_expr
from linopen.system import MODES, SystemSpec

DIRECTIVE_RE = re.compile(r"^(mode|states|controls)\s+(\S+)\s*$")
EQUILIBRIUM_RE = re.compile(r"^eq\s+([xu])\s*=\s*(.*)$")
COMPONENT_RE = re.compile(r"^f_?([1-9]\d*)\s*=\s*(.*)$")


def read_text(target) -> str:
    if isinstance(target, (str, Path)):
        with open(target, encoding="utf-8") as f:
            return f.read()

    if isinstance(target, IOBase):
        return target.read()

    raise TypeError("expected a path or a file")


def parse_positive_integer(value: str, name: str, line: int) -> int:
    try:
        number = int(value)
    except ValueError:
        raise SystemFileError(
            '%s should be a positive integer but got "%s"' % (name, value), line=line
        )

    if number < 1:
        raise SystemFileError("%s should be >= 1" % name, line=line)

    return number


def parse_vector(value: str, line: int):
    try:
        return [float(v) for v in value.split()]
    except ValueError:
        raise SystemFileError('invalid number in "%s"' % value.strip(), line=line)


def parse_system(text: str) -> SystemSpec:
    """
    Function parsing the given system definition text.

    Args:
        text (str): content of a system file.

    Returns:
        SystemSpec: the validated system.
    """
    directives = {}
    equilibrium = {}
    components = {}
    first_lines = {}

    for line_number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()

        if not line:
            continue

        match = DIRECTIVE_RE.match(line)

        if match is not None:
            key, value = match.groups()

            if key in directives:
                raise SystemFileError('duplicate "%s" line' % key, line=line_number)

            if key == "mode":
                if value not in MODES:
                    raise SystemFileError(
                        'mode should be "continuous" or "discrete" but got "%s"'
                        % value,
                        line=line_number,
                    )
                directives[key] = value
            else:
                directives[key] = parse_positive_integer(value, key, line_number)

            first_lines[key] = line_number
            continue

        match = EQUILIBRIUM_RE.match(line)

        if match is not None:
            key, value = match.groups()

            if key in equilibrium:
                raise SystemFileError('duplicate "eq %s" line' % key, line=line_number)

            equilibrium[key] = parse_vector(value, line_number)
            first_lines["eq " + key] = line_number
            continue

        match = COMPONENT_RE.match(line)

        if match is not None:
            index = int(match.group(1))

            if index in components:
                raise SystemFileError("duplicate f%i" % index, line=line_number)

            try:
                node = parse_expr(match.group(2))
            except ExpressionError as e:
                raise SystemFileError("f%i: %s" % (index, e), line=line_number)

            components[index] = (node, line_number)
            continue

        raise SystemFileError('cannot understand "%s"' % line, line=line_number)

    for key in ("mode", "states", "controls"):
        if key not in directives:
            raise SystemFileError('missing "%s" line' % key)

    n = directives["states"]
    m = directives["controls"]

    for key, size in (("x", n), ("u", m)):
        if key not in equilibrium:
            raise SystemFileError('missing "eq %s" line' % key)

        if len(equilibrium[key]) != size:
            raise SystemFileError(
                "eq %s should have %i entries but has %i"
                % (key, size, len(equilibrium[key])),
                line=first_lines["eq " + key],
            )

    for index, (node, line_number) in components.items():
        if index > n:
            raise SystemFileError(
                "f%i is out of range for %i states" % (index, n), line=line_number
            )

        if node.max_state_index() > n:
            raise SystemFileError(
                "f%i uses x%i but only %i states are declared"
                % (index, node.max_state_index(), n),
                line=line_number,
            )

        if node.max_control_index() > m:
            raise SystemFileError(
                "f%i uses u%i but only %i controls are declared"
                % (index, node.max_control_index(), m),
                line=line_number,
            )

    missing = [i for i in range(1, n + 1) if i not in components]

    if missing:
        raise SystemFileError(
            "missing equation%s %s"
            % ("s" if len(missing) > 1 else "", ", ".join("f%i" % i for i in missing))
        )

    return SystemSpec(
        directives["mode"],
        [components[i][0] for i in range(1, n + 1)],
        equilibrium["x"],
        equilibrium["u"],
        m=m,
    )


def read_system(target) -> SystemSpec:
    """
    Function reading and parsing the given system definition file.

    The format is line-oriented: a `mode continuous|discrete` line, a
    `states n` line, a `controls m` line, the equilibrium as `eq x = ...` and
    `eq u = ...` lines, then one `f_i = <expression>` line per state. Blank
    lines are ignored and `#` starts a comment.

    Args:
        target (str or Path or file): target to read and parse. Can be a
            string path, a Path instance or a file buffer.

    Returns:
        SystemSpec: the validated system.

    Example:
        from linopen import read_system

        system = read_system("./planar.stab")
    """
    return parse_system(read_text(target))


def read_gain(target, n=None, m=None):
    """
    Function reading a gain file, i.e. a JSON document holding an m x n
    matrix, either bare or under a "K" key (as found in `synthesize` reports).

    Args:
        target (str or Path or file or dict or list): target to read.
        n (int, optional): expected state dimension.
        m (int, optional): expected control dimension.

    Returns:
        np.ndarray: the gain matrix K.
    """
    if isinstance(target, (dict, list)):
        data = target
    else:
        try:
            data = json.loads(read_text(target))
        except json.JSONDecodeError as e:
            raise SystemFileError("gain file is not valid JSON: %s" % e)

    if isinstance(data, dict):
        if "gain" in data and isinstance(data["gain"], dict):
            data = data["gain"]

        if "K" not in data:
            raise SystemFileError('gain document should have a "K" key')

        data = data["K"]

    try:
        K = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise SystemFileError("gain should be a matrix of numbers")

    if K.ndim == 1:
        K = K.reshape(1, -1)

    if K.ndim != 2 or K.size == 0:
        raise SystemFileError("gain should be a non-empty matrix")

    if not np.all(np.isfinite(K)):
        raise SystemFileError("gain has non-finite entries")

    if m is not None and K.shape[0] != m:
        raise SystemFileError("gain should have %i rows but has %i" % (m, K.shape[0]))

    if n is not None and K.shape[1] != n:
        raise SystemFileError(
            "gain should have %i columns but has %i" % (n, K.shape[1])
        )

    return K
