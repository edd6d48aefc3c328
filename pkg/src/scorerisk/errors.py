"""Semantic exception hierarchy shared across the package."""


class ScoreriskError(Exception):
    """Base class for all package errors."""


class DomainError(ScoreriskError, ValueError):
    """A scalar argument is outside its admissible range."""


class DimensionError(ScoreriskError, ValueError):
    """Vector lengths or outcome counts do not match."""


class ValidationError(ScoreriskError, ValueError):
    """Constructor input violates a type invariant."""


class CapabilityError(ScoreriskError, ValueError):
    """The requested operation is not supported for this object kind."""


class SingularDesignError(ScoreriskError, ValueError):
    """Regression design is exactly or numerically collinear."""


class UnsupportedScoreError(ScoreriskError, ValueError):
    """Score lacks the smoothness required by the strict fitting mode."""


class ContractError(ScoreriskError, RuntimeError):
    """An internal convexity/monotonicity contract was violated.

    Raised when difference quotients behave non-monotonically beyond slack,
    which signals a broken score or risk-measure implementation rather than
    bad user input.
    """
