"""Exception hierarchy.

Every error raised by the library derives from :class:`PermKernError`, and
each one carries a ``category`` used by the command-line front end to pick
an exit code.
"""


class PermKernError(Exception):
    category = "validation"


class ValidationError(PermKernError, ValueError):
    category = "validation"


class NumericError(PermKernError, ArithmeticError):
    category = "numeric"


class NotABijection(ValidationError):
    pass


class Empty(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class SpecSizeMismatch(ValidationError):
    pass


class RangeError(ValidationError):
    pass


class UnsupportedSpec(ValidationError):
    pass


class EmptyDataset(ValidationError):
    pass


class BadOrder(ValidationError):
    pass


class TooLargeForKronecker(ValidationError):
    pass


class BadKind(ValidationError):
    pass


class BadK(ValidationError):
    pass


class BadParams(ValidationError):
    pass


class OneClassOnly(ValidationError):
    pass


class NotPSD(NumericError):
    pass


class NoConvergence(NumericError):
    pass


class DegenerateWeights(NumericError):
    pass


class DegenerateM(NumericError):
    pass


class ZeroMatrix(NumericError):
    pass


class TooFewPairs(ValidationError):
    pass


class AllZeroDifferences(ValidationError):
    pass


class MissingColumn(ValidationError):
    pass


class NoValidRows(ValidationError):
    pass


class BadLabelValue(ValidationError):
    pass


class NotEnoughData(ValidationError):
    pass


class BaselineMissing(ValidationError):
    pass
