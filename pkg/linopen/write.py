# =============================================================================
# Linopen Writing Functions
# =============================================================================
#
# Functions used to serialize trajectories as CSV and reports as JSON.
#
import csv
import json
import math
import numpy as np
from io import StringIO

from linopen.utils import Unbounded

CSV_FORMAT = "%.17g"


def to_json_value(value):
    """
    Function converting a report value into plain JSON data: numpy scalars
    and arrays become floats and lists, complex numbers become
    {"re", "im"} objects and unbounded values become "+inf" or "-inf".
    """
    if isinstance(value, Unbounded):
        return repr(value)

    if isinstance(value, dict):
        return {str(k): to_json_value(v) for k, v in value.items()}

    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]

    if isinstance(value, np.ndarray):
        return to_json_value(value.tolist())

    if isinstance(value, (bool, np.bool_)):
        return bool(value)

    if isinstance(value, (int, np.integer)):
        return int(value)

    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_json_value(value.real), "im": to_json_value(value.imag)}

    if isinstance(value, (float, np.floating)):
        value = float(value)

        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"

        if math.isnan(value):
            raise ValueError("reports cannot hold nan")

        return value

    if value is None or isinstance(value, str):
        return value

    raise TypeError("cannot serialize %s in a report" % type(value).__name__)


def dumps_report(report) -> str:
    """
    Function serializing the given report as JSON, with sorted keys so that
    identical reports always yield identical bytes.

    Args:
        report (dict): report, as built by `build_report`.

    Returns:
        str: JSON text, ending with a newline.
    """
    return json.dumps(to_json_value(report), sort_keys=True, indent=2) + "\n"


def write_trajectory_csv(trajectory, f=None):
    """
    Function writing the given trajectory as CSV, with a "t,x1,...,xn" header
    and one row per sample at full double precision.

    Args:
        trajectory (Trajectory): trajectory to write.
        f (file, optional): text file to write to. If None, the CSV is
            returned as a string instead.

    Returns:
        str or None: the CSV text when no file was given.
    """
    buffer = StringIO() if f is None else f

    writer = csv.writer(buffer, lineterminator="\n")

    n = trajectory.states.shape[1]
    writer.writerow(["t"] + ["x%i" % (i + 1) for i in range(n)])

    for t, state in zip(trajectory.times, trajectory.states):
        writer.writerow([CSV_FORMAT % t] + [CSV_FORMAT % v for v in state])

    if f is None:
        return buffer.getvalue()

    return None
