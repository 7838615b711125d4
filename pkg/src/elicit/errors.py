"""Exception hierarchy shared by every module."""


class ElicitError(Exception):
    """Base class for all library errors."""


class DomainError(ElicitError, ValueError):
    """A parameter lies outside its admissible range."""


class NonUniqueError(DomainError):
    """The requested functional value is not a single point."""


class DomainViolation(ElicitError, ValueError):
    """A point lies outside the action domain it is evaluated on."""


class PathOutsideDomain(DomainViolation):
    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class PathEvaluationError(ElicitError):
    """Evaluation failed somewhere along a mixture path."""

    def __init__(self, message, lam):
        super().__init__(message)
        self.lam = lam


class NonFiniteIntegrand(ElicitError, ArithmeticError):
    pass


class DenominatorError(ElicitError, ArithmeticError):
    pass


class NotSymmetricError(DomainError):
    pass


class ConvexityError(DomainError):
    pass


class Unsupported(ElicitError, NotImplementedError):
    pass


class Diverged(ElicitError, ArithmeticError):
    pass


class UsageError(ElicitError):
    pass


class ParseError(UsageError):
    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
