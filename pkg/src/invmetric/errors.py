"""Exception types shared across the package."""


class InvMetricError(Exception):
    """Base class for all package-specific errors."""


class PointOutsideDomainError(InvMetricError, ValueError):
    """A point required to be interior to a domain is not."""


class NumericError(InvMetricError, ArithmeticError):
    """A denominator or other quantity fell below the safe magnitude floor."""


class PoleError(NumericError):
    """Evaluation hit a pole of a rational map."""


class NotSelfMapError(InvMetricError, ValueError):
    """A map claimed to send the disc into itself does not."""


class AmbiguousProjectionError(InvMetricError, ValueError):
    """Two boundary points achieve the minimal distance within tolerance."""


class CurveExitsDomainError(InvMetricError, ValueError):
    """A curve used for a length computation leaves the domain."""


class GridDisconnectedError(InvMetricError, RuntimeError):
    """Shortest-path grid has no route between the requested endpoints."""


class BracketInversionError(InvMetricError, RuntimeError):
    """Internal bug signal: a computed lower bound exceeded its upper bound."""


class EmptyFamilyError(InvMetricError, ValueError):
    """A candidate-map family has no members for the requested domain."""


class NonEscapingOrbitError(InvMetricError, ValueError):
    """Automorphism orbit does not approach the boundary."""


class QuadratureError(InvMetricError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""
