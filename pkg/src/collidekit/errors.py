"""Exception types shared across the package."""


class CollideKitError(Exception):
    """Base class for all collidekit errors."""


class DimensionError(CollideKitError):
    """Operands have incompatible or unexpected dimensions."""


class ShapeError(CollideKitError):
    """A matrix lacks required structure (square, Hermitian, power-of-two size, ...)."""


class PositivityError(CollideKitError):
    """A state or coefficient matrix violates a positivity/trace constraint."""


class UnitarityError(CollideKitError):
    """An operator expected to be unitary is not."""


class NormalizationError(CollideKitError):
    """A vector or operator set violates its normalization constraint."""


class SingularChannelError(CollideKitError):
    """The map is singular; a matrix logarithm/generator does not exist."""


class BranchCutError(CollideKitError):
    """An eigenvalue sits on the principal logarithm's branch cut."""


class BoundUndefinedError(CollideKitError):
    """A convergence bound is undefined for the given interaction angle."""


class CapacityError(CollideKitError):
    """A request exceeds a configured size cap."""


class DomainError(CollideKitError):
    """A scalar argument lies outside the supported domain."""
