"""Exception hierarchy shared by every module."""


class GroupLenError(Exception):
    """Base class for all errors raised by grouplen."""


class FamilyMismatchError(GroupLenError):
    pass


class NonFiniteValueError(GroupLenError):
    pass


class NegativeValueError(GroupLenError):
    pass


class SubadditivityError(GroupLenError):
    def __init__(self, n, m, detail=""):
        self.n, self.m = n, m
        super().__init__(f"subadditivity fails at (n, m) = ({n}, {m}){': ' + detail if detail else ''}")


class CertificateError(GroupLenError):
    """Malformed certificate, or a step that cannot be replayed."""

    def __init__(self, message, step=None):
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class MultiplierError(CertificateError):
    pass


class UnknownFamilyError(CertificateError):
    pass


class PreconditionError(GroupLenError, ValueError):
    """An operation was called outside its domain (wrong trace class, det, ...)."""


class NoWitnessError(GroupLenError):
    pass


class NumericalOverflowError(GroupLenError):
    def __init__(self, j, detail=""):
        self.j = j
        super().__init__(f"overflow at doubling level j={j}{': ' + detail if detail else ''}")


class BudgetExceededError(GroupLenError):
    def __init__(self, message, reached=None):
        self.reached = reached
        super().__init__(message)


class InvariantViolation(GroupLenError, AssertionError):
    """Internal postcondition failed; indicates a bug, never user error."""


class NonMonotoneError(PreconditionError):
    """A circle-map lift that is not strictly increasing or not degree one."""


class DegenerateMapError(GroupLenError):
    """A rational map whose components all vanish."""
