"""Exception hierarchy.

``ValidationError`` covers bad inputs (CLI exit code 2); ``NumericalError``
covers failures of the numerical routines themselves (CLI exit code 3).
"""


class GraphCorrError(Exception):
    pass


class ValidationError(GraphCorrError, ValueError):
    pass


class NumericalError(GraphCorrError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class AllZeroMatrix(ValidationError):
    pass


class ConstantInput(ValidationError):
    pass


class TooFewSamples(ValidationError):
    pass


class DegenerateMarginal(ValidationError):
    pass


class RhoOutOfRange(ValidationError):
    pass


class InvalidCovariance(ValidationError):
    pass


class EmptyIntersection(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EigenFailure(NumericalError):
    pass


class DegenerateCluster(NumericalError):
    pass
