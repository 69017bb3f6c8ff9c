"""Exception hierarchy shared by every module of the package."""


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""


class ZeroDenominator(WorkbenchError, ZeroDivisionError):
    """A rational number was constructed with denominator zero."""


class NonPositiveTolerance(WorkbenchError, ValueError):
    """Tolerances must be strictly positive."""


class FloatOverflow(WorkbenchError, OverflowError):
    """An exact value does not fit into a double."""


class BadWeight(WorkbenchError, ValueError):
    """Weight vector does not describe a sector of the tensor space."""


class BadSite(WorkbenchError, ValueError):
    """Site index outside 1..n (or a coinciding pair where two are needed)."""


class BadColor(WorkbenchError, ValueError):
    """Color index outside 1..N."""


class NonInvertibleQ(WorkbenchError, ValueError):
    """Deformation parameter of a q-permutation must be invertible."""


class DimensionMismatch(WorkbenchError, ValueError):
    """Operands live on different spaces."""


class DomainMismatch(WorkbenchError, ValueError):
    """Operands carry different scalar domains."""


class NotBlockDiagonal(WorkbenchError, ValueError):
    """Operator couples a weight sector to its complement."""


class PoleHit(WorkbenchError, ZeroDivisionError):
    """A spectral argument landed on a pole of an R-matrix."""


class IdentityViolation(WorkbenchError):
    """An identity that must hold exactly failed at some evaluation point."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FlavorMismatch(WorkbenchError, ValueError):
    """Check is only defined for the other R-matrix flavor."""


class ZeroEigenvalue(WorkbenchError, ValueError):
    """Momentum extraction needs a nonzero multiplicative eigenvalue."""


class DegeneracyUnresolved(WorkbenchError, RuntimeError):
    """Joint diagonalization failed the residual gate after all re-draws."""


class NonConvergence(WorkbenchError, RuntimeError):
    """The underlying eigensolver did not converge."""


class MatchFailure(WorkbenchError, RuntimeError):
    """Spectra cannot be matched (e.g. multisets of different size)."""


class NeedsFloat(WorkbenchError, RuntimeError):
    """Check requires the floating-point domain but mode is exact."""


class ParseError(WorkbenchError, ValueError):
    """Malformed configuration file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenericPositionViolation(WorkbenchError, ValueError):
    """Model parameters collide (x_i = x_j, x_i = x_j +- eta, or analogs)."""
