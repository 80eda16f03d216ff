"""Exception types raised by the toolkit."""


class InvalidDirectionError(ValueError):
    """A zero or non-finite vector was used where a direction is required."""


class DegenerateDirectionError(ValueError):
    """A classifier produced a (numerically) zero normal vector."""


class RankError(ValueError):
    """A matrix that must be invertible is numerically singular."""


class ParseError(ValueError):
    """Malformed dataset file. ``row`` is 1-based, counting every line."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap.

    ``detail`` holds what the solver achieved, e.g. the final KKT violation
    or the best gap bracket.
    """

    def __init__(self, message, **detail):
        self.detail = detail
        super().__init__(message)


class SeparabilityError(ValueError):
    """Hard-margin fitting was requested on data that is not separable."""


class NoSupportVectorError(ValueError):
    """The dual weights are all zero, so SVM centroids are undefined."""


class SolverError(RuntimeError):
    """The linear-program solver failed (pivot cap or numerical breakdown)."""
