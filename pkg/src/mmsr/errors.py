"""Exception hierarchy shared by the library and the CLI."""


class MMSRError(Exception):
    exit_code = 1


class InputError(MMSRError, ValueError):
    """Malformed or out-of-range input."""

    exit_code = 2


class CapabilityError(MMSRError):
    """The request is valid but outside what the implementation supports."""

    exit_code = 3


class NumericalError(MMSRError, ArithmeticError):
    """A solver diverged, hit a nonpositive value, or failed to converge."""

    exit_code = 4
