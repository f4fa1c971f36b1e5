"""Named exceptions shared across the toolkit.

Every precondition violation maps to a distinct class so callers (and the
CLI) can react to specific failures instead of parsing messages.
"""


class QspillError(Exception):
    """Base class for all toolkit errors."""


class MissingInputError(QspillError):
    """Input file does not exist or cannot be read."""


class UnknownColumnError(QspillError):
    """A requested column is absent from the input."""


class DuplicateDateError(QspillError):
    """The date column contains a repeated stamp (non-monotone after sort)."""


class EmptyPanelError(QspillError):
    """No rows survive parsing/alignment."""


class NonPositivePriceError(QspillError):
    """Log returns requested on a series with a value <= 0."""

    def __init__(self, column: str, row: int, value: float):
        self.column = column
        self.row = row
        self.value = value
        super().__init__(
            f"non-positive value {value!r} in column {column!r} at row {row}"
        )


class ZeroVarianceError(QspillError):
    """A column is constant; the requested statistic is undefined."""


class ShortSeriesError(QspillError):
    """Series too short for the requested operation."""


class RankDeficiencyError(QspillError):
    """Design matrix does not have full column rank."""


class ConvergenceError(QspillError):
    """An iterative solver failed to converge."""

    def __init__(self, message: str, equation: int | None = None):
        self.equation = equation
        if equation is not None:
            message = f"equation {equation}: {message}"
        super().__init__(message)


class InfeasibleConfigError(QspillError):
    """A configuration violates a module precondition."""
