"""Exception types shared across the package."""


class RenyiDpiError(Exception):
    """Base class for all errors raised by this library."""


class NonSquare(RenyiDpiError):
    """A matrix that must be square is not."""


class NonHermitian(RenyiDpiError):
    """A matrix fails the Hermitian symmetry check."""


class NotPositiveDefinite(RenyiDpiError):
    """An eigenvalue sits below the strict-positivity floor."""


class DimensionMismatch(RenyiDpiError):
    """Operands live on incompatible spaces."""


class InvalidOrder(RenyiDpiError):
    """A norm order p is outside its admissible range."""


class InvalidAlpha(RenyiDpiError):
    """A Renyi parameter is outside [-1, 0) or (0, 1)."""


class DegenerateWeight(RenyiDpiError):
    """A weight operator |a|^2 is singular beyond the working floor."""


class SingularResolvent(RenyiDpiError):
    """Resolvent shift t is too close to zero for a near-singular operator."""


class NonConvergence(RenyiDpiError):
    """The variational search stopped before reaching its tolerance."""

    def __init__(self, message, best_value=None, gap=None):
        super().__init__(message)
        self.best_value = best_value
        self.gap = gap


class SingularOutputState(RenyiDpiError):
    """A channel output state is singular beyond the working floor."""


class QuadratureFailure(RenyiDpiError):
    """Numerical quadrature produced a non-finite result."""


class ConfigInvalid(RenyiDpiError):
    """An experiment configuration fails validation."""


class IoFailure(RenyiDpiError):
    """Reading or writing a report file failed."""
