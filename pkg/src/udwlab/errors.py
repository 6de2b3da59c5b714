"""Exception hierarchy for udwlab."""


class UDWError(Exception):
    """Base class for every error raised by udwlab."""


class NonHermitian(UDWError, ValueError):
    pass


class NotPositive(UDWError, ValueError):
    pass


class DimensionMismatch(UDWError, ValueError):
    pass


class DomainError(UDWError, ValueError):
    pass


class InvalidAlpha(UDWError, ValueError):
    pass


class InvalidNu(UDWError, ValueError):
    pass


class IncompleteKraus(UDWError, ValueError):
    pass


class NegativeW(UDWError, ValueError):
    pass


class InvalidBeta(UDWError, ValueError):
    pass


class InconsistentSqueezing(UDWError, ValueError):
    """The supplied squeezing pairings give a negative two-point value."""


class SupportViolation(UDWError, ValueError):
    pass


class QuadratureNoConvergence(UDWError, RuntimeError):
    pass


class TruncationTooSmall(UDWError, RuntimeError):
    """Population leaked into the top Fock levels of a truncated mode."""
