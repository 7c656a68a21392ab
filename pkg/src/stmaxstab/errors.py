"""Exception types shared across the package."""


class StmaxstabError(Exception):
    """Base class for package errors."""


class InvalidArgs(StmaxstabError, ValueError):
    """An argument violates its stated domain."""


class UnrealizableLag(StmaxstabError, ValueError):
    """No pair of grid sites realizes the requested lag."""


class UnsupportedLag(StmaxstabError, ValueError):
    """Lag outside the closed-form count table; fall back to enumeration."""


class DegenerateLag(StmaxstabError, ValueError):
    """Lag configuration hits a removable singularity the caller did not allow."""


class NotPSD(StmaxstabError, RuntimeError):
    """Covariance matrix not positive semi-definite after jitter escalation."""


class BudgetExceeded(StmaxstabError, RuntimeError):
    """Requested exact simulation exceeds the dense-factorization budget."""


class NoConvergence(StmaxstabError, RuntimeError):
    """Optimizer failed to converge within the restart budget."""


class InsufficientLags(StmaxstabError, ValueError):
    """Fewer lag classes than parameters to estimate."""


class IndivisibleBlocks(StmaxstabError, ValueError):
    """Grid or time axis not divisible by the requested block size."""


class LengthMismatch(StmaxstabError, ValueError):
    """Series length incompatible with the requested period/years split."""


class SupportViolation(StmaxstabError, ValueError):
    """Fitted GEV parameters put observations outside the support."""


class NonIntegerShift(StmaxstabError, ValueError):
    """MAR propagation vector must have integer components for simulation."""


class ConfigError(StmaxstabError, ValueError):
    """Invalid CLI/run configuration."""
