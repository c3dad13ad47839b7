# =============================================================================
# Linopen Tabular Exports
# =============================================================================
#
# Conversion of simulation results to pandas DataFrames.
#
from linopen.shim import get_pandas


def state_columns(n: int):
    return ["x%i" % (i + 1) for i in range(n)]


def trajectory_to_dataframe(trajectory, time_col: str = "t"):
    """
    Function converting the given trajectory into a pandas DataFrame with
    one row per sample, a time column and one column per state.

    Args:
        trajectory (Trajectory): trajectory to convert.
        time_col (str, optional): name of the time column. If None, times
            are used as the DataFrame index instead. Defaults to "t".

    Returns:
        pd.DataFrame: A pandas DataFrame

    Example:
        from linopen import trajectory_to_dataframe

        df = trajectory_to_dataframe(trajectory)
    """
    pd = get_pandas()

    columns = state_columns(trajectory.states.shape[1])

    if time_col is None:
        return pd.DataFrame(
            data=trajectory.states, columns=columns, index=trajectory.times
        )

    df = pd.DataFrame(data=trajectory.states, columns=columns)
    df.insert(0, time_col, trajectory.times)

    return df


def stability_report_to_dataframe(report, initial_conditions=None):
    """
    Function converting the decay fits of a local stability validation into
    a pandas DataFrame, one row per initial condition.

    Args:
        report (StabilityReport): validation report.
        initial_conditions (array_like, optional): (samples, n) initial
            conditions to add as x0_* columns.

    Returns:
        pd.DataFrame: A pandas DataFrame
    """
    pd = get_pandas()

    rows = [fit._asdict() for fit in report.fits]

    if initial_conditions is not None:
        for row, x0 in zip(rows, initial_conditions):
            for i, value in enumerate(x0):
                row["x0_%i" % (i + 1)] = float(value)

    return pd.DataFrame(data=rows)
