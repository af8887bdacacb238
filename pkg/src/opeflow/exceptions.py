# -*- coding=utf-8 -*-
"""Error hierarchy shared by every opeflow module.

Each error carries a stable ``code`` which the command line surface emits in
its JSON error payload.  The errors also subclass the closest builtin so that
callers can keep catching ``ValueError`` or ``KeyError`` where it reads more
naturally.
"""

__all__ = [
    "OpeflowError",
    "SingularPointError",
    "BasisTooLargeError",
    "GraphLimitError",
    "DegenerateCutoffError",
    "InconsistentMomentumError",
    "TreeFusionError",
    "DomainViolationError",
    "DimensionViolationError",
    "DerivativeOrderError",
    "UndeclaredFieldError",
    "MissingCoefficientError",
    "ConfigNotFoundError",
    "ConfigError",
    "UsageError",
    "ClosureWarning",
]


class OpeflowError(Exception):
    code = "OPEFLOW_ERROR"
    exit_status = 1

    def __init__(self, message=None, **details):
        self.message = message or self.__class__.__doc__ or self.code
        self.details = details
        super(OpeflowError, self).__init__(self.message)

    def as_dict(self):
        payload = {"code": self.code, "message": str(self.message)}
        if self.details:
            payload["details"] = {k: str(v) for k, v in sorted(self.details.items())}
        return {"error": payload}


class SingularPointError(OpeflowError, ValueError):
    """Two insertion points coincide."""

    code = "SINGULAR_POINT"


class BasisTooLargeError(OpeflowError, ValueError):
    """The operator basis exceeds the configured size limit."""

    code = "BASIS_TOO_LARGE"


class GraphLimitError(OpeflowError, ValueError):
    """The number of Wick graphs exceeds the configured limit."""

    code = "GRAPH_LIMIT"


class DegenerateCutoffError(OpeflowError, ValueError):
    """The cutoffs must satisfy ``0 <= lam < lam0``."""

    code = "DEGENERATE_CUTOFF"


class InconsistentMomentumError(OpeflowError, ValueError):
    """External momenta of a tree without special vertex must add to zero."""

    code = "INCONSISTENT_MOMENTUM"


class TreeFusionError(OpeflowError, ValueError):
    """The trees cannot be fused."""

    code = "FUSION_INCOMPATIBLE"


class DomainViolationError(OpeflowError, ValueError):
    """The configuration lies outside the convergence domain."""

    code = "DOMAIN_VIOLATION"


class DimensionViolationError(OpeflowError, ValueError):
    """An entry violates the dimension constraint of its container."""

    code = "DIMENSION_VIOLATION"


class DerivativeOrderError(OpeflowError, ValueError):
    """A covariance derivative exceeds the configured maximal order."""

    code = "DERIVATIVE_ORDER_EXCEEDED"


class UndeclaredFieldError(OpeflowError, KeyError):
    """The field is not declared by the theory."""

    code = "UNDECLARED_FIELD"

    def __str__(self):
        return str(self.message)


class MissingCoefficientError(OpeflowError, KeyError):
    """No coefficient is available for the requested labels."""

    code = "MISSING_COEFFICIENT"

    def __str__(self):
        return str(self.message)


class ConfigNotFoundError(OpeflowError, FileNotFoundError):
    """The configuration file does not exist."""

    code = "CONFIG_NOT_FOUND"
    exit_status = 2


class ConfigError(OpeflowError, ValueError):
    """The configuration file is malformed."""

    code = "CONFIG_INVALID"
    exit_status = 2


class UsageError(OpeflowError, ValueError):
    """The command line arguments are inconsistent."""

    code = "USAGE"
    exit_status = 2


class ClosureWarning(UserWarning):
    """The free BRST variation of the interaction is not a total derivative."""
