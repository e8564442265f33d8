"""Exception hierarchy shared by all modules."""


class IPLError(Exception):
    """Base class for every error raised by the toolkit."""


class NumericsError(IPLError, ArithmeticError):
    pass


class NonConvergence(NumericsError):
    """Raised when an iterative routine runs out of refinements.

    ``partial`` holds the best result reached before giving up, when one exists.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NonFiniteIntegrand(NumericsError):
    pass


class InvalidDomain(IPLError, ValueError):
    pass


class BracketInvalid(IPLError, ValueError):
    pass


class DomainError(IPLError, ValueError):
    pass


class RateOverflow(IPLError):
    """Acceptance probability exceeded one; the speed majorant is stale."""


class InvalidExponent(IPLError, ValueError):
    pass
