"""Concurrence of two-qubit states and the entanglement sudden-death line."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .qmath import SIGMA_Y, eigvals_psd_product, tensor
from .states import StatePoint

_YY = tensor(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class ConcurrenceBreakdown:
    lambdas: np.ndarray  # eigenvalues of rho * spin-flipped rho, descending
    value: float


def spin_flip(rho: np.ndarray) -> np.ndarray:
    return _YY @ np.asarray(rho, dtype=complex).conj() @ _YY


def concurrence(rho: np.ndarray) -> ConcurrenceBreakdown:
    """Wootters concurrence with the eigenvalues it was computed from.

    The square roots of the eigenvalues of ``rho * spin_flip(rho)`` are taken
    as the singular values of ``W^T (Y (x) Y) W`` with ``rho = W W^dagger``;
    square-rooting near-zero eigenvalues directly would amplify round-off.
    """
    rho = np.asarray(rho, dtype=complex)
    # validates Hermiticity and positivity of both factors
    eigvals_psd_product(rho, spin_flip(rho))
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    W = v * np.sqrt(np.clip(w, 0.0, None))
    r = np.linalg.svd(W.T @ _YY @ W, compute_uv=False)
    return ConcurrenceBreakdown(lambdas=r * r, value=float(max(0.0, r[0] - r[1] - r[2] - r[3])))


def concurrence_signed(p: StatePoint) -> float:
    """Unclamped family concurrence; its sign change marks sudden death."""
    s, c = math.sin(p.theta), math.cos(p.theta)
    d = p.damping
    return 2.0 * (1.0 - d) * s * (c - d * s)


def concurrence_closed(p: StatePoint) -> float:
    return max(0.0, concurrence_signed(p))


def esd_boundary(theta: float) -> float | None:
    """Damping at which the family state becomes separable, or None if never before D=1.

    States with ``theta < pi/4`` stay entangled for every ``D < 1``.
    """
    if not (0.0 < theta < math.pi / 2):
        raise DomainError(f"theta={theta!r} must lie strictly inside (0, pi/2)")
    if theta < math.pi / 4:
        return None
    return min(1.0, math.cos(theta) / math.sin(theta))
