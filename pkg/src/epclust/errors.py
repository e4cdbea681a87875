"""Exception hierarchy shared by all modules."""


class EPClustError(Exception):
    """Base class for every error raised by the package."""


class DomainError(EPClustError, ValueError):
    """An argument lies outside the documented range."""


class StructuralError(EPClustError, ValueError):
    """Inputs have the wrong shape or violate a structural invariant."""


class BackendError(EPClustError, TypeError):
    """Operation not supported on the requested scalar backend."""


class SolverError(EPClustError, ArithmeticError):
    """A numerical solver failed to converge or produced a bad residual."""


class BracketError(EPClustError, ValueError):
    pass


class DegeneracyError(EPClustError, ArithmeticError):
    """Rank filtration does not describe a fully degenerate eigenvalue."""


class SpectralError(EPClustError, ArithmeticError):
    """Spectrum is complex or degenerate where a real simple one is needed."""


class ClusterizationError(EPClustError, ArithmeticError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


# errors the CLI reports as bad input (exit 2) rather than failed computation (exit 3)
VALIDATION_ERRORS = (DomainError, StructuralError, BackendError)
