class PolylinException(Exception):
    """
    Base exception class for polylin errors.
    """

    default_code: str = None

    def __init__(self, message: str, error_code: str = None):
        """
        Initialize the PolylinException.

        Args:
            message (str): The error message.
            error_code (str, optional): A short machine-readable code; defaults to the
                class-level code of the concrete exception.
        """
        self.message = message
        self.error_code = error_code or self.default_code
        super().__init__(self.message)

    def __str__(self):
        """
        String representation of the exception.
        """
        error_str = f"{self.__class__.__name__}: {self.message}"
        if self.error_code:
            error_str += f" (Error Code: {self.error_code})"
        return error_str


class InvalidArgumentException(PolylinException):
    """
    Exception for malformed shapes, dimensions or parameters.
    """

    default_code = "argument"


class InvalidGradeException(PolylinException):
    """
    Exception for a grade the requested construction does not support (e.g. even k for T).
    """

    default_code = "grade"


class IndexRangeException(PolylinException):
    """
    Exception for Horner-shift, truncation or block indices out of range.
    """

    default_code = "index"


class ZeroPolynomialException(PolylinException):
    """
    Exception for operations undefined on the zero polynomial.
    """

    default_code = "zero-polynomial"


class DegenerateNormsException(PolylinException):
    """
    Exception for growth factors requested with a zero end coefficient.
    """

    default_code = "degenerate-norms"


class ExcludedEigenvalueException(PolylinException):
    """
    Exception for zero or infinite eigenvalues, which the condition number does not cover.
    """

    default_code = "excluded-eigenvalue"


class NonSimpleEigenvalueException(PolylinException):
    """
    Exception for an eigenvalue whose condition-number denominator is numerically zero.
    """

    default_code = "non-simple"


class ExtractionFailedException(PolylinException):
    """
    Exception for an eigenvector block that is numerically zero.
    """

    default_code = "extraction-failed"


class BoundNotApplicableException(PolylinException):
    """
    Exception for a bound evaluated outside its range of validity.
    """

    default_code = "bound-not-applicable"


class SingularPencilException(PolylinException):
    """
    Exception for a pencil that is rank deficient at every sample point.
    """

    default_code = "singular-pencil"


class SolverBackendException(PolylinException):
    """
    Exception for failures inside the dense eigensolver backend.
    """

    default_code = "backend"


class SamplingException(PolylinException):
    """
    Exception for determinant sampling that found no usable sample points.
    """

    default_code = "sampling"


class RepeatedRootsException(PolylinException):
    """
    Exception for oracle root sets that are repeated, zero or not conjugation-closed.
    """

    default_code = "repeated-roots"


class MPJSONFormatException(PolylinException):
    """
    Exception for malformed MPJSON documents.
    """

    default_code = "mpjson"


class UsageException(PolylinException):
    """
    Exception for command-line invocations missing required options.
    """

    default_code = "usage"
