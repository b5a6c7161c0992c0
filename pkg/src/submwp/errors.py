"""Exception types shared across the package.

Each maps onto a CLI exit code: input problems exit 2, capacity refusals
exit 3, failed verifications exit 1.
"""


class SubmwpError(Exception):
    exit_code = 1


class DomainError(SubmwpError, ValueError):
    """Argument outside the operation's domain."""

    exit_code = 2


class InputError(SubmwpError, ValueError):
    """Malformed instance or graph file."""

    exit_code = 2

    def __init__(self, message, pointer=None):
        self.pointer = pointer
        if pointer:
            message = f"{message} (at {pointer})"
        super().__init__(message)


class CapacityError(SubmwpError):
    """Exhaustive routine refused because the input is too large."""

    exit_code = 3

    def __init__(self, message, required=None):
        self.required = required
        super().__init__(message)


class NumericError(SubmwpError, ArithmeticError):
    exit_code = 1


class VerificationError(SubmwpError, AssertionError):
    """An identity or invariant that must hold did not."""

    exit_code = 1
