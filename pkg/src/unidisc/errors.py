"""Exception hierarchy shared by all modules."""


class UnidiscError(ValueError):
    """Base class for domain precondition failures."""


class NotUnitary(UnidiscError):
    pass


class NoConvergence(UnidiscError):
    pass


class DimensionMismatch(UnidiscError):
    pass


class DimensionNotSquare(UnidiscError):
    pass


class NotDensityMatrix(UnidiscError):
    pass


class ZeroMatrix(UnidiscError):
    pass


class OutOfRange(UnidiscError):
    pass


class NotNormalized(UnidiscError):
    pass


class NotClosed(UnidiscError):
    pass


class AmbiguousMatch(UnidiscError):
    pass


class NotIrreducible(UnidiscError):
    pass


class InvalidSeed(UnidiscError):
    pass


class Inconsistent(RuntimeError):
    """Two independent computation routes disagree beyond tolerance."""
