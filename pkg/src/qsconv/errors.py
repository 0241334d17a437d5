"""Exception hierarchy shared across the package."""


class QsconvError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(QsconvError):
    pass


class NonHermitian(QsconvError):
    pass


class NotPsd(QsconvError):
    pass


class NotAssociative(QsconvError):
    pass


class NoIdentity(QsconvError):
    pass


class NotAGroup(QsconvError):
    pass


class NotHaar(QsconvError):
    pass


class NotMorphism(QsconvError):
    pass


class NotAnAction(QsconvError):
    pass


class ExpectationInvalid(QsconvError):
    pass


class NotReal(QsconvError):
    pass


class KernelNotPsd(QsconvError):
    pass


class InconsistentAction(QsconvError):
    pass


class NotInner(QsconvError):
    pass


class NoSolution(QsconvError):
    pass


class InvalidTuple(QsconvError):
    pass


class NotCpc(QsconvError):
    """Raised when generator extraction fails; `stage` names the failing step."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class NotABialgebra(QsconvError):
    pass


class HomoldFailed(QsconvError):
    pass


class BNotContraction(QsconvError):
    pass
