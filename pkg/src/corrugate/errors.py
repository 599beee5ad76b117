class CorrugationError(ValueError):
    """Base class for all errors raised by the package."""


class DegeneratePlane(CorrugationError):
    pass


class EmptySlice(CorrugationError):
    pass


class InvalidParams(CorrugationError):
    pass


class NotNormalized(CorrugationError):
    pass


class DegenerateInput(CorrugationError):
    pass


class PathEscapesSlice(CorrugationError):
    pass


class QuadratureFailure(CorrugationError):
    pass


class OutOfSubsolution(CorrugationError):
    pass
