"""Exceptions raised by the tensor algebra library.

Every error carries the process exit code the command-line front end reports
for it: 2 for bad input, 3 for numerical failures.
"""

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


class TensorGinvError(Exception):
    """Base class for library errors."""

    exit_code: int = EXIT_INPUT_ERROR


# Input errors

class ShapeMismatch(TensorGinvError, ValueError):
    """Operand shapes do not satisfy an operation's shape precondition."""


class ContractionMismatch(ShapeMismatch):
    """Contracted mode lists of an Einstein product differ."""


class ZeroTensor(TensorGinvError, ValueError):
    """A nonzero tensor was required."""


class HypothesisUnsatisfiable(TensorGinvError):
    """A constructed-hypothesis instance cannot be realized for the requested shapes."""


class TensorFormatError(TensorGinvError, ValueError):
    """A tensor interchange file is malformed."""


class FixtureIntegrityError(TensorGinvError):
    """A bundled fixture file does not match its recorded checksum."""


# Numerical errors

class NumericalError(TensorGinvError, ArithmeticError):
    exit_code = EXIT_NUMERICAL_ERROR


class NoConvergence(NumericalError):
    """Jacobi sweeps exceeded the configured cap."""


class NotHermitian(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class NonFiniteEntries(NumericalError):
    pass


class SingularTensor(NumericalError):
    """A square tensor is numerically singular."""


class SingularCore(SingularTensor):
    pass


class SingularTransform(SingularTensor):
    pass


class SingularWeight(SingularTensor):
    pass
