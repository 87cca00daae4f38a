"""Exception and warning types raised by dyadreg."""


class DyadError(Exception):
    """Base class for all dyadreg errors."""


class DataError(DyadError, ValueError):
    """Invalid input data (maps to CLI exit status 2)."""


class UnknownLabel(DataError):
    pass


class DuplicateDyad(DataError):
    pass


class DuplicateLabel(DataError):
    pass


class SelfLoop(DataError):
    pass


class IncompletePanel(DataError):
    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = missing


class NegativeOutcome(DataError):
    pass


class NonFiniteValue(DataError):
    pass


class MissingNodeRow(DataError):
    pass


class UnknownColumn(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class InvalidFlag(DataError):
    pass


class NonFiniteLikelihood(DyadError, ArithmeticError):
    """exp(r'theta) would overflow; the linear predictor exceeded the cap."""


class AllZeroOutcomes(DataError):
    pass


class NotConverged(DyadError):
    """Iteration cap reached or line search stalled. ``result`` holds the last iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SingularGamma(DyadError, ArithmeticError):
    pass


class NegativeVarianceEstimate(DyadError, ArithmeticError):
    def __init__(self, message, estimator=None, index=None):
        super().__init__(message)
        self.estimator = estimator
        self.index = index


class SingularHessian(UserWarning):
    pass
