"""Canonical-form filtering and a sufficient certificate of unsteerability.

A state is certified unsteerable (Alice to Bob) when, after filtering Bob's
marginal to the maximally mixed state,

    max(a_z**2 + 2|T_z|, 2 max(|T_x|, |T_y|)) <= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonDiagonalCorrelation, UnsupportedState
from .qmath import IDENTITY, partial_trace, psd_inv_sqrt_2x2, tensor
from .states import StatePoint, correlation_data
from .steering import C16_REPORTED

DIAG_TOL = 1e-9
VARIANTS = ("derived", "as_printed")


@dataclass(frozen=True)
class CanonicalForm:
    a: np.ndarray
    t_diag: np.ndarray
    b: np.ndarray  # Bob's vector after filtering; zero up to round-off
    T: np.ndarray

    @property
    def a_z(self) -> float:
        return float(self.a[2])


def filtered_state(rho: np.ndarray) -> np.ndarray:
    """Apply ``I (x) rho_B^{-1/2}`` on both sides and renormalize to unit trace.

    The raw filtered operator has trace 2.
    """
    rho = np.asarray(rho, dtype=complex)
    f = tensor(IDENTITY, psd_inv_sqrt_2x2(partial_trace(rho, "B")))
    out = f @ rho @ f
    return out / np.trace(out).real


def canonical_form(rho: np.ndarray, strict: bool = True) -> CanonicalForm:
    """Filtered local vector and diagonal correlations of ``rho``.

    With ``strict`` the filtered correlation matrix must be diagonal; otherwise
    the off-diagonal part is ignored (used for noisy tomographic estimates).
    """
    cd = correlation_data(filtered_state(rho))
    off = cd.T - np.diag(np.diag(cd.T))
    if strict and np.max(np.abs(off)) >= DIAG_TOL:
        raise NonDiagonalCorrelation(
            f"filtered correlation matrix has off-diagonal entry {np.max(np.abs(off)):.3e}")
    return CanonicalForm(a=cd.a, t_diag=np.diag(cd.T).copy(), b=cd.b, T=cd.T)


def certificate(a_z: float, t_x: float, t_y: float, t_z: float) -> float:
    return max(a_z * a_z + 2 * abs(t_z), 2 * max(abs(t_x), abs(t_y)))


def unsteering_t(rho: np.ndarray, strict: bool = True) -> float:
    """Unsteerability parameter; the state is certified unsteerable when it is <= 1."""
    cf = canonical_form(rho, strict=strict)
    tx, ty, tz = cf.t_diag
    if strict and abs(abs(tx) - abs(ty)) > DIAG_TOL:
        raise UnsupportedState(f"|T_x|={abs(tx):.12g} and |T_y|={abs(ty):.12g} differ")
    return certificate(cf.a_z, tx, ty, tz)


def unsteering_closed(p: StatePoint, variant: str = "derived") -> float:
    """Closed-form unsteerability parameter of the family state.

    ``derived`` follows from the canonical form and agrees with
    :func:`unsteering_t`. ``as_printed`` keeps the literal expression, whose
    numerator uses ``2(1-D) gamma`` instead of ``2(1-D) cos^2(theta) gamma``.
    """
    if variant not in VARIANTS:
        raise DomainError(f"unknown variant {variant!r}")
    c, s = math.cos(p.theta), math.sin(p.theta)
    d = p.damping
    gamma = c * c + d * s * s
    if gamma <= 1e-12:
        raise DomainError("gamma vanishes: Bob's marginal is singular at this point")
    shift = d * (gamma - (1 - d) * s * s)
    if variant == "derived":
        first = (shift * shift + 2 * (1 - d) * c * c * gamma) / gamma ** 2
    else:
        first = (shift * shift + 2 * (1 - d) * gamma) / gamma ** 2
    second = 2 * c * math.sqrt(1 - d) / math.sqrt(gamma)
    return max(first, second)


def unsteering_T(t_u: float) -> float:
    """Rescale the certificate so its threshold matches the steering bound 0.503."""
    if t_u < 0:
        raise DomainError("t_u must be non-negative")
    return C16_REPORTED * t_u
