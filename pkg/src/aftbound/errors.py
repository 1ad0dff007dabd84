"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: parse and usage problems exit 1,
resource caps exit 2, internal invariant violations exit 3.
"""


class AftError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class UsageError(AftError):
    """A caller violated a documented precondition."""


class ParseError(AftError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class UnsafeVariableError(ParseError):
    """A rule variable has no positive, non-comparison occurrence."""


class ResourceCapError(AftError):
    """An enumeration or instantiation exceeded its configured cap."""

    exit_code = 2


class UnsupportedCapabilityError(AftError):
    """The lattice lacks an optional capability the operation needs."""


class InvariantError(AftError):
    """An internal soundness invariant was violated."""

    exit_code = 3
