"""Exception types shared across the package."""


class ClassConfigError(ValueError):
    """Raised for malformed or inconsistent class configuration."""


class EmptySupportError(ValueError):
    """Raised when an operation conditions on an order n with Q(n) = 0."""


class NumericError(ArithmeticError):
    """Raised on a nonfinite intermediate in scaled-float arithmetic.

    Carries the order at which the recurrence broke down.
    """

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class RejectionLimitError(RuntimeError):
    """Raised when rejection sampling exhausts its attempt budget.

    Carries the observed acceptance estimate so callers can report it.
    """

    def __init__(self, message, attempts=0, accepted=0):
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted

    @property
    def acceptance_estimate(self):
        if self.attempts == 0:
            return 0.0
        return self.accepted / self.attempts
