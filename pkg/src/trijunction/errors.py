"""Typed failures raised across the package.

Numerical routines never return sentinel values on failure; they raise one of
these so callers (and the CLI) can distinguish bad input from a computation
that left its domain of validity.
"""


class TriJunctionError(Exception):
    """Base class for all package errors."""


class TensionsDegenerate(TriJunctionError):
    """Surface tensions violate the strict triangle inequality."""


class NotOnBoundary(TriJunctionError):
    """Point handed to a boundary routine does not lie on the zero level set."""


class SingularGradient(TriJunctionError):
    """Level-set gradient vanishes where it must not."""


class NoIntersection(TriJunctionError):
    """Ray does not cross the boundary inside the search box."""


class OffsetMissesBoundary(TriJunctionError):
    """Offset reference line has no boundary crossing near the expected one."""


class DegenerateMetric(TriJunctionError):
    """Graph metric J dropped below the admissible floor."""


class MatrixMNotInvertible(TriJunctionError):
    """Junction coupling matrix M left its invertibility region."""


class SingularJacobian(TriJunctionError):
    """Newton Jacobian is numerically rank deficient (symmetry gauge missing)."""


class NoConvergence(TriJunctionError):
    """Iteration exhausted max_iter without meeting its tolerance."""

    def __init__(self, max_iter, residual=None):
        self.max_iter = max_iter
        self.residual = residual
        msg = f"no convergence within {max_iter} iterations"
        if residual is not None:
            msg += f" (residual {residual:.3e})"
        super().__init__(msg)


class EigenSolveFailed(TriJunctionError):
    """Both eigenvalue back ends failed on the discretized pencil."""


class ZeroFunction(TriJunctionError):
    """Rayleigh quotient of the zero function requested."""


class CompatibilityFailed(TriJunctionError):
    """Initial data could not be corrected to satisfy boundary conditions."""


class CflViolation(TriJunctionError):
    """Time step exceeds the diffusive step-size guard."""


class NewtonDiverged(TriJunctionError):
    """Boundary-condition sweep failed to reach its tolerance."""


class DegenerateCurve(TriJunctionError):
    """Curve sample too degenerate to resample by arc length."""


class NonPositiveSeries(TriJunctionError):
    """Log-linear fit requested on a series with non-positive entries."""


class ParseError(TriJunctionError):
    """Config text could not be parsed."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(TriJunctionError):
    """Config parsed but a field violates a precondition."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class IoError(TriJunctionError):
    """Trajectory or network file unreadable or malformed."""
