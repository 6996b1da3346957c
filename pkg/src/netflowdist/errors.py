"""Exception hierarchy shared by the library and the CLI."""


class NetflowError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(NetflowError, ValueError):
    """Invalid argument or malformed input."""

    exit_code = 2


class DimensionError(InputError):
    """Graphs or matrices with incompatible sizes."""


class StateError(InputError):
    """Edit that conflicts with the current graph (missing or duplicate edge)."""


class ParseError(InputError):
    """A file failed to parse. `row`/`col` locate the offending cell when known."""

    def __init__(self, message, row=None, col=None):
        if row is not None and col is not None:
            message = f"{message} at cell ({row},{col})"
        elif row is not None:
            message = f"{message} at row {row}"
        super().__init__(message)
        self.row = row
        self.col = col


class DegenerateInputError(InputError):
    """Input with no spread, e.g. a distance matrix whose off-diagonals all coincide."""


class ScenarioError(NetflowError):
    """A scenario constructor could not satisfy its conditioning rule."""

    exit_code = 2


class NumericError(NetflowError, ArithmeticError):
    """Eigensolver failure or a numerical invariant violated."""

    exit_code = 3
