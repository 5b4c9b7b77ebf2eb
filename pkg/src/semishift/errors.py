"""Exception types shared across the package."""


class SemishiftError(Exception):
    """Base class for all library errors."""


class ParseError(SemishiftError):
    """Raised when a serialized object cannot be read."""


class ValidationError(SemishiftError):
    """Raised when an input object violates a structural precondition."""


class MembershipError(ValidationError):
    """Raised when a word lies outside the subsemigroup in play."""


class FactorizationError(ValidationError):
    """Raised when a pattern does not factor through a given morphism."""


class InvalidChain(ValidationError):
    """Raised when an operation requires a structurally valid chain."""


class SigmaIncomplete(ValidationError):
    """Raised when extension needs every positive generator in Sigma."""


class DeltaOutOfRange(ValidationError):
    """Raised when a perturbation parameter leaves its open interval."""


class NonInvertibleModP(ValidationError):
    """Raised when a matrix is singular modulo the chosen prime."""


class EmptyWord(ValidationError):
    """Raised when an operation needs a nonempty word."""


class NotInvariant(SemishiftError):
    """Raised when an operation requires an invariant chain."""


class NotPeriodic(SemishiftError):
    """Raised when an operation requires a periodic orbit."""


class BudgetExhausted(SemishiftError):
    """Raised when a randomized search fails within its trial budget."""


class NoWitness(SemishiftError):
    """Raised when a searched-for witness provably does not exist."""


class OracleNotNormalized(SemishiftError):
    """Raised when a measure oracle's block masses do not sum to one."""
