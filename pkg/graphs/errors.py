"""Exception types shared across attachlab packages."""


class ParameterError(ValueError):
    """A numeric argument lies outside the operation's domain."""


class ModelMismatchError(ValueError):
    """The graph's model or edge count does not fit the operation."""


class PreconditionError(ValueError):
    """An operation was called on input that violates its precondition."""


class EdgeListFormatError(ValueError):
    """An edge-list file is malformed."""


class CellExecutionError(RuntimeError):
    """A Monte Carlo cell failed; the message names the cell."""
