"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """An iterative or quadrature step failed to reach its tolerance."""


class InfeasibleTargetError(ValueError):
    """Requested scattering targets cannot be met by the construction.

    Raised by the gate-data builder when a target transmission phase lies
    outside the range reachable by the auxiliary-bump correction, or when
    the requested anchors are packed too tightly for the bump width.
    """
