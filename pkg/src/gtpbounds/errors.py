"""Exception hierarchy shared by all modules.

Each class carries the process exit code the command-line front end uses
when the error escapes a command.
"""


class GTPBoundsError(Exception):
    exit_code = 1


class ValidationError(GTPBoundsError, ValueError):
    """Invalid input: shapes, ranges, symmetry, schema."""

    exit_code = 2


class CapabilityError(GTPBoundsError, ValueError):
    """The request is well formed but outside what the library supports."""

    exit_code = 2


class ResourceError(GTPBoundsError, RuntimeError):
    """An enumeration or grid would exceed its configured cap."""

    exit_code = 3

    def __init__(self, message, required=None, cap=None, coordinate=None):
        super().__init__(message)
        self.required = required
        self.cap = cap
        self.coordinate = coordinate


class NumericError(GTPBoundsError, ArithmeticError):
    """Iteration failed to converge or a system was too ill-conditioned."""

    exit_code = 4

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
