"""Exception hierarchy shared by every module of the workbench."""


class GrussLabError(Exception):
    """Base class for all workbench errors."""


class PreconditionError(GrussLabError):
    """An input violates the documented precondition of an operation."""


class NumericalError(GrussLabError):
    """A numerical routine failed (non-convergence, genuine negativity, ...)."""


class NotSquare(PreconditionError):
    pass


class NotHermitian(PreconditionError):
    pass


class NotSelfAdjoint(NotHermitian):
    pass


class DimensionMismatch(PreconditionError):
    pass


class RaggedBlocks(PreconditionError):
    pass


class EmptyInput(PreconditionError):
    pass


class BNotInvertible(PreconditionError):
    pass


class NotUnital(PreconditionError):
    pass


class NotStarLinear(PreconditionError):
    pass


class PositivityUncertified(PreconditionError):
    pass


class MapIdentityNotInvertible(PreconditionError):
    pass


class AccretivityFailed(PreconditionError):
    """An accretivity hypothesis does not hold; ``hypothesis`` names which one."""

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class BadExponent(PreconditionError):
    pass


class ExponentOutOfRange(PreconditionError):
    pass


class InvalidDensity(PreconditionError):
    pass


class AmbientMismatch(PreconditionError):
    pass


class NotProjection(PreconditionError):
    pass


class RangeMembershipFailed(PreconditionError):
    pass


class NotLiftedProjection(PreconditionError):
    pass


class NotUnitVector(PreconditionError):
    pass


class SchemaError(PreconditionError):
    """Malformed scenario/matrix/map document. ``field`` names the offending key."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class UnknownKind(PreconditionError):
    pass


class NoConvergence(NumericalError):
    pass


class NotPSD(NumericalError):
    pass
