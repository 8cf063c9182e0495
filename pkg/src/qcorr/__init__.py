"""Entanglement, steering and Bell nonlocality of two-qubit states under amplitude damping."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DegenerateCorrelation, DomainError, InsufficientData, NoBoundary, NonDiagonalCorrelation,
    NotHermitian, NotPSD, NotUnitVector, QcorrError, SingularMarginal, TooManyAxes,
    UnsupportedState, ZeroCorrelation,
)
from .states import StatePoint, family_state  # noqa: F401
from .sweep import evaluate_point  # noqa: F401
