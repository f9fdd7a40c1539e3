"""Exceptions shared across the package.

The CLI maps these onto exit codes: parse errors -> 2, precondition
violations -> 3, internal invariant breaches -> 4.
"""


class WeaveError(Exception):
    pass


class DesignParseError(WeaveError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(WeaveError):
    pass


class InvariantError(WeaveError):
    pass
