"""Exception hierarchy shared by all modules."""


class ArithmeticDomainError(ArithmeticError):
    """Base class for every error raised by this package."""


class DivisionByZero(ArithmeticDomainError, ZeroDivisionError):
    pass


class TowerMismatch(ArithmeticDomainError, TypeError):
    pass


class PrecisionExhausted(ArithmeticDomainError):
    """Raised when the known digits of a result do not reach its leading term,
    or when an Artin-Schreier peeling cannot terminate inside the tower."""


class ZeroNorm(ArithmeticDomainError):
    pass


class NotAUnit(ArithmeticDomainError):
    pass


class DivergentEvaluation(ArithmeticDomainError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class OutOfRegion(ArithmeticDomainError):
    pass


class NotReducible(ArithmeticDomainError):
    pass


class DepthInsufficient(ArithmeticDomainError):
    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class SingularRecursion(ArithmeticDomainError):
    pass


class UsageError(ArithmeticDomainError, ValueError):
    """Malformed command-line or point input."""
