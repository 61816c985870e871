"""Exception hierarchy shared by the library and the command line front-end."""


class VCWBError(Exception):
    """Base class for every error raised by vcwb."""

    #: process exit code used by the CLI when this error escapes a subcommand
    exit_code = 3


class DomainError(VCWBError, ValueError):
    """An argument lies outside the domain of an operation."""

    exit_code = 2


class InexactDivisionError(VCWBError, ArithmeticError):
    """A polynomial division left a nonzero remainder."""


class AdmissibilityError(DomainError):
    """A colour triple violates the parity or triangle conditions."""


class PrecisionError(VCWBError, ArithmeticError):
    """Working precision is insufficient for the requested evaluation."""


class FitError(VCWBError):
    """Least-squares fit cannot be formed (too few samples or rank deficient)."""


class CacheCorruptionError(VCWBError):
    """A cache file contains a line that cannot be parsed."""

    exit_code = 4

    def __init__(self, path, lineno, reason):
        super().__init__(f"{path}:{lineno}: {reason}")
        self.path = path
        self.lineno = lineno


class SolverError(VCWBError):
    """Polynomial root finder did not converge."""


class ClassificationError(VCWBError):
    """Eigenvalue tracks could not be labelled."""


class QuadratureError(VCWBError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
