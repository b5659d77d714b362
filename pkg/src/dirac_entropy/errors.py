"""Exception hierarchy.

Each class carries the machine-readable ``error_class`` label and the process
exit code used by the command-line front end.
"""


class EntropyToolkitError(Exception):
    error_class = "INTERNAL"
    exit_code = 1


class ArgumentError(EntropyToolkitError, ValueError):
    error_class = "ARGUMENT"
    exit_code = 2


class GeometryError(ArgumentError):
    error_class = "GEOMETRY"


class TouchingClosuresError(GeometryError):
    """Two intervals share a boundary point (zero gap)."""

    error_class = "GEOMETRY_TOUCHING"


class FunctionSpecError(ArgumentError):
    error_class = "FUNCTION"


class ResourceError(EntropyToolkitError):
    error_class = "RESOURCE"
    exit_code = 3


class NumericalError(EntropyToolkitError, ArithmeticError):
    error_class = "NUMERICAL"
    exit_code = 4

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
