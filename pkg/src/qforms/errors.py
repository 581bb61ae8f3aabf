"""Exception hierarchy shared across the package."""


class QFormsError(Exception):
    """Base class for all package errors."""


class ModulusMismatch(QFormsError):
    pass


class NonUnitLeading(QFormsError):
    pass


class BadModulus(QFormsError):
    pass


class InsufficientPrecision(QFormsError):
    pass


class PrecisionExhausted(InsufficientPrecision):
    pass


class BadOffset(QFormsError):
    pass


class BadWeight(QFormsError):
    pass


class NonIntegral(QFormsError):
    """Rational coefficients cannot be represented in the requested ring."""


class CrossCheckFailed(QFormsError):
    def __init__(self, message, d=None):
        super().__init__(message)
        self.d = d


class BasisMismatch(QFormsError):
    pass


class ZeroInput(QFormsError):
    pass


class PrincipalPartNonzero(QFormsError):
    pass


class BadDiscriminant(QFormsError):
    pass


class RoundingGuard(QFormsError):
    def __init__(self, message, d=None, error=None):
        super().__init__(message)
        self.d = d
        self.error = error


class StreamTooShort(QFormsError):
    pass
