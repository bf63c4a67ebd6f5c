"""Exception hierarchy shared by every module."""


class ELTQCError(ValueError):
    """Base class for validation and numeric errors raised by eltqc."""


class NonSquare(ELTQCError):
    pass


class NotHermitian(ELTQCError):
    pass


class NotPSD(ELTQCError):
    pass


class NotUnitary(ELTQCError):
    pass


class NotContraction(ELTQCError):
    pass


class NegativeTime(ELTQCError):
    pass


class DimensionMismatch(ELTQCError):
    pass


class InvalidDensityMatrix(ELTQCError):
    pass


class ShrinkNotAllowed(ELTQCError):
    pass


class NotPadded(ELTQCError):
    pass


class NonUnitGate(ELTQCError):
    pass


class TooWide(ELTQCError):
    pass


class EmptyFamily(ELTQCError):
    pass


class GridMismatch(ELTQCError):
    pass


class WeightGridMismatch(GridMismatch):
    pass


class BadConfig(ELTQCError):
    pass
