"""Exception hierarchy shared by all analysis modules."""


class VolterraError(Exception):
    """Base class for all library errors."""


class DomainError(VolterraError):
    """An input lies outside the mathematical domain of the operation."""


class DimensionError(VolterraError):
    """Matrix/kernel dimensions are incompatible."""


class SingularError(VolterraError):
    """A linear solve hit a (numerically) singular pencil."""

    def __init__(self, message, zeta=None):
        super().__init__(message)
        self.zeta = zeta


class BoundaryZeroError(VolterraError):
    """The determinant vanishes (numerically) on the unit circle."""

    def __init__(self, message, zeta=None):
        super().__init__(message)
        self.zeta = zeta


class BaseUnstableError(VolterraError):
    """The unperturbed system fails the uniform exponential stability premise."""


class SpaceNotSupportedError(VolterraError):
    """The requested phase space is outside the supported family."""


class NonDecayingStructureError(VolterraError):
    """The structure's output kernel lacks the required decay envelope."""


class DivergentWeightError(VolterraError):
    """A weighted coefficient sum diverges for the requested space."""


class InsufficientDataError(VolterraError):
    """Too few usable samples for a fit."""


class ModeError(VolterraError):
    """Operation requires a different state-norm mode."""


class CertificationError(VolterraError):
    """A machine-checked post-condition failed."""


class SchemaError(VolterraError):
    """An input file does not match its documented schema."""
