"""Exception hierarchy shared by all modules."""


class OpMonoError(ValueError):
    """Base class for every error raised by :mod:`opmono`."""


class NonSymmetricError(OpMonoError):
    pass


class NoConvergenceError(OpMonoError, ArithmeticError):
    pass


class DimMismatchError(OpMonoError):
    pass


class NotCommutingError(OpMonoError):
    pass


class DegeneracyUnresolvedError(OpMonoError, ArithmeticError):
    pass


class ArityMismatchError(OpMonoError):
    pass


class NonFiniteValueError(OpMonoError):
    pass


class NotPositiveDefiniteError(OpMonoError):
    pass


class AlphaOutOfRangeError(OpMonoError):
    pass


class SingularAtomError(OpMonoError, ZeroDivisionError):
    pass


class BranchCutError(OpMonoError):
    pass


class NonPositiveDenominatorError(OpMonoError):
    pass


class SpectrumOutsideDomainError(OpMonoError):
    pass


class DomainViolationError(OpMonoError):
    pass


class MissingComplexExtensionError(OpMonoError):
    pass
