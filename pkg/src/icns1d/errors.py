"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised for malformed or invalid run configuration text.

    Carries the 1-based line number (and column where meaningful) of the
    offending input so errors are actionable when configs are hand-edited.
    """

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class SolverError(RuntimeError):
    """Raised when a time step produces an invalid state (NaN/Inf, phi <= 0).

    Attributes:
        step_index: index of the failing step (0-based).
        time: simulation time at which the failure occurred.
        partial_series: the TimeSeries accumulated before the failure, or None.
    """

    def __init__(self, message, step_index=None, time=None, partial_series=None):
        super().__init__(message)
        self.step_index = step_index
        self.time = time
        self.partial_series = partial_series


class VerificationError(RuntimeError):
    """Raised when a verification study violates its own contract.

    Carries the offending table so failures are reportable.
    """

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table
