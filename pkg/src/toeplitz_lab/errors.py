"""Exception hierarchy shared by every module of the package."""


class ToeplitzLabError(Exception):
    """Base class for all errors raised by toeplitz_lab."""


class EvaluationAtAtom(ToeplitzLabError, ValueError):
    """A symbol was evaluated on the circle at (or next to) a singular atom."""


class TailNotResolved(ToeplitzLabError):
    """No truncation degree up to the cap brings the coefficient tail below eps."""


class DimensionMismatch(ToeplitzLabError, ValueError):
    pass


class NotAnIsometry(ToeplitzLabError):
    pass


class NotCommuting(ToeplitzLabError):
    pass


class SymbolMismatch(ToeplitzLabError):
    pass


class NoConvergence(ToeplitzLabError):
    """Power iteration hit its cap; carries the last iterate and residual."""

    def __init__(self, message, estimate=None, residual=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


class SafeSubspaceEmpty(ToeplitzLabError):
    """The truncation leaves no coordinates on which a check is meaningful."""


class PiExtensionViolation(ToeplitzLabError):
    """The generator T does not commute with pi(1)."""


class NotCoprime(ToeplitzLabError, ValueError):
    pass


class IndeterminateSign(ToeplitzLabError):
    """The rational interval for t is too wide to order two elements."""


class UnsupportedSignPattern(ToeplitzLabError, ValueError):
    pass


class ElementOutsideWindow(ToeplitzLabError, KeyError):
    pass


class ConfigError(ToeplitzLabError, ValueError):
    pass
