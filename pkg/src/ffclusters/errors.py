"""Exception types shared across the package.

Validation problems derive from ``ValueError``; numerical breakdowns derive
from :class:`NumericError` so the CLI can map them to distinct exit codes.
"""


class UnknownGeometryError(ValueError):
    pass


class DomainError(ValueError):
    """Closed-form expression evaluated outside its domain of validity."""


class NumericError(RuntimeError):
    pass


class DegeneratePointError(NumericError):
    """Ground level (within the symmetric sector) is degenerate or nearly so."""


class InconsistentSystemError(NumericError):
    """Least-squares residual too large: the ansatz cannot satisfy the core equation."""


class StepSizeError(NumericError):
    """Norm drift during time stepping exceeded the allowed bound."""


class ConvergenceError(NumericError):
    pass
