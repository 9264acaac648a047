"""Exception hierarchy shared by every gwlab module."""


class GWError(Exception):
    """Base class for all gwlab errors."""


class ValidationError(GWError, ValueError):
    """Input data violates a documented precondition."""


class AsymmetricDistance(ValidationError):
    pass


class NonzeroDiagonal(ValidationError):
    pass


class NegativeDistance(ValidationError):
    pass


class MeasureNotSimplex(ValidationError):
    pass


class DuplicatePoints(ValidationError):
    pass


class InvalidSize(ValidationError):
    pass


class DuplicateConsecutiveSamples(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class NegativeValue(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class InfeasibleInit(ValidationError):
    pass


class WrongDimension(ValidationError):
    pass


class TooManyDof(ValidationError):
    pass


class ResolutionTooSmall(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed input file. ``lineno`` is 1-based, or None for whole-file problems."""

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where = f"{path}:"
            if lineno is not None:
                where += f"{lineno}:"
            where += " "
        super().__init__(where + message)


class InternalInconsistency(GWError):
    """A result contradicts a proven property; always an implementation bug."""


class NumericalUnderflow(GWError, ArithmeticError):
    pass


class ConvergenceError(GWError, ArithmeticError):
    pass
