"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`SuperlabError`, so callers (and the CLI) can catch a single type.
"""


class SuperlabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SuperlabError, ValueError):
    """Invalid parameters or an unsupported combination of options."""


class ValidationError(SuperlabError, ValueError):
    """Input data violates a structural invariant (shape, reality, finiteness)."""


class UnsupportedBranchError(ConfigurationError):
    """A parameter lies on a branch the closed forms do not cover (e.g. gamma1 >= 0)."""


class DegenerateModeError(SuperlabError, ArithmeticError):
    """A fit or multiplier is rank-deficient / singular at the requested mode."""


class UndefinedMetricError(SuperlabError, ArithmeticError):
    """A metric cannot be evaluated (zero reference norm, zero reference phase)."""


class FactorizationError(SuperlabError, ArithmeticError):
    """LU factorization hit a pivot that is zero to working precision."""
