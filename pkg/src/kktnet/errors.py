"""Exception types raised across the package."""


class KKTNetError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(KKTNetError, ValueError):
    pass


class ShapeMismatch(KKTNetError, ValueError):
    pass


class OutOfRange(KKTNetError, ValueError):
    """Argument lies outside the image of an activation."""


class ActivationNotInvertible(KKTNetError):
    pass


class DegenerateProfile(KKTNetError):
    """All residuals are within tolerance of zero; the uniform condition is vacuous."""


class NoWitness(KKTNetError):
    pass


class EmptyInput(KKTNetError, ValueError):
    pass


class IterationLimit(KKTNetError):
    pass


class SingularBasis(KKTNetError):
    pass


class Unbounded(KKTNetError):
    pass


class NotSeparable(KKTNetError):
    """Feasibility and separation phases disagree within numerical tolerance."""


class NoFiniteBracket(KKTNetError):
    pass


class GridTooLarge(KKTNetError, ValueError):
    pass


class ParseError(KKTNetError, ValueError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDataset(KKTNetError, ValueError):
    pass


class SchemaError(KKTNetError, ValueError):
    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
