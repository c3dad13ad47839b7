# =============================================================================
# Linopen Custom Exceptions
# =============================================================================
#
from linopen.utils import format_complex


class LinopenException(Exception):
    pass


class MissingPandasException(LinopenException):
    pass


class ExpressionError(LinopenException):
    def __init__(self, message, offset=None):
        self.offset = offset

        if offset is not None:
            message = "%s (at offset %i)" % (message, offset)

        super().__init__(message)


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    pass


class NonConstantExponentError(ExpressionError):
    pass


class EvaluationError(LinopenException):
    pass


class DivisionByZeroError(EvaluationError):
    pass


class FunctionDomainError(EvaluationError):
    pass


class SystemFileError(LinopenException):
    def __init__(self, message, line=None):
        self.line = line

        if line is not None:
            message = "line %i: %s" % (line, message)

        super().__init__(message)


class SystemValidationError(LinopenException):
    pass


class DimensionError(LinopenException):
    pass


class ConvergenceError(LinopenException):
    pass


class PreconditionError(LinopenException):
    pass


class UncontrollableModeError(PreconditionError):
    def __init__(self, eigenvalue, message=None):
        self.eigenvalue = eigenvalue

        if message is None:
            message = "uncontrollable unstable mode at λ=%s" % format_complex(
                eigenvalue
            )

        super().__init__(message)


class PlacementError(PreconditionError):
    pass
