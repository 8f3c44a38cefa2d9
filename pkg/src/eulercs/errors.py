"""Exception types shared across the package."""


class EulerCSError(Exception):
    """Base class for all package errors."""


class InvalidPrime(EulerCSError):
    pass


class FieldTooLarge(EulerCSError):
    pass


class DivisionByZero(EulerCSError):
    pass


class InvalidInput(EulerCSError):
    pass


class InvalidOrder(EulerCSError):
    pass


class DegreeTooLarge(EulerCSError):
    pass


class DegreeMismatch(EulerCSError):
    pass


class IndexNotConstructible(EulerCSError):
    pass


class IndexTooSmall(EulerCSError):
    pass


class UnsupportedRowSize(EulerCSError):
    pass


class NothingToExtend(EulerCSError):
    pass


class HadamardUnavailable(EulerCSError):
    pass


class DegenerateColumn(EulerCSError):
    pass


class BoundUndefined(EulerCSError):
    pass


class ProvenanceRequired(EulerCSError):
    pass


class ShapeError(EulerCSError):
    pass


class InvalidSparsity(EulerCSError):
    pass


class UndefinedSNR(EulerCSError):
    pass


class ConvergenceFailure(EulerCSError):
    """Solver did not converge; carries the best iterate found."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class PatchGridError(EulerCSError):
    pass


class PatchSizeError(EulerCSError):
    pass


class LabelError(EulerCSError):
    pass


class ParseError(EulerCSError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
