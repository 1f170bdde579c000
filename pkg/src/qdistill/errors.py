"""Exception taxonomy shared by every module."""


class QDistillError(Exception):
    """Base class for all errors raised by qdistill."""


class DimensionError(QDistillError, ValueError):
    pass


class NotHermitian(QDistillError, ValueError):
    pass


class NotUnitTrace(QDistillError, ValueError):
    pass


class NotPositive(QDistillError, ValueError):
    pass


class NotPsd(QDistillError, ValueError):
    pass


class ZeroWeight(QDistillError, ValueError):
    """A local operation annihilated the state (pass probability ~ 0)."""


class NotTState(QDistillError, ValueError):
    pass


class NotInseparable(QDistillError, ValueError):
    pass


class FilterTooLarge(QDistillError, ValueError):
    pass


class FidelityTooLow(QDistillError, ValueError):
    pass


class NotDistillable(QDistillError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TargetUnreachable(QDistillError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StateFileError(QDistillError, ValueError):
    """Malformed state file (syntax or schema, before any physics check)."""
