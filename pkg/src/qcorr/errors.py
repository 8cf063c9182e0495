"""Exception hierarchy shared by every qcorr module."""


class QcorrError(Exception):
    """Base class for all domain errors raised by qcorr."""


class DomainError(QcorrError, ValueError):
    """An argument lies outside its mathematical domain."""


class NotHermitian(QcorrError, ValueError):
    pass


class NotPSD(QcorrError, ValueError):
    pass


class SingularMarginal(QcorrError, ValueError):
    """A reduced state has an eigenvalue too small to invert."""


class NotUnitVector(QcorrError, ValueError):
    pass


class TooManyAxes(QcorrError, ValueError):
    pass


class DegenerateCorrelation(QcorrError, ValueError):
    """The correlation matrix vanishes, so no measurement plane is preferred."""


class ZeroCorrelation(QcorrError, ValueError):
    pass


class UnsupportedState(QcorrError, ValueError):
    """The state is outside the family handled by the unsteerability test."""


class NonDiagonalCorrelation(UnsupportedState):
    pass


class InsufficientData(QcorrError, ValueError):
    pass


class NoBoundary(QcorrError, ValueError):
    pass
