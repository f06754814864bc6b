"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, solver convergence failures with 3, and I/O problems with 4.
"""


class BiostabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BiostabError):
    """Invalid parameter value or malformed run configuration."""


class ConvergenceError(BiostabError):
    """An iterative solver failed to converge within its budget."""


class NoNeutralPointError(ConvergenceError):
    """The growth rate does not change sign on the searched bracket."""


class KRangeError(BiostabError):
    """The traced wavenumber range does not enclose the curve minimum."""


class EigensolverError(BiostabError):
    """The generalized eigenvalue backend failed with a diagnostic."""
