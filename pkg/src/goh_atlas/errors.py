"""Error types shared across the package.

ValueError is used directly for malformed arguments; the classes below mark
failure modes that callers may want to catch separately.
"""


class NotNilpotentError(RuntimeError):
    """Picard iteration on a flow failed to stabilize within the bound."""


class PreconditionError(ValueError):
    """Input violates a structural precondition (e.g. frame not in normal form)."""


class NumericsError(RuntimeError):
    """A numeric computation produced NaN/Inf or otherwise lost meaning."""


class ConditioningError(NumericsError):
    """A linear-algebra step is too ill-conditioned to trust."""
