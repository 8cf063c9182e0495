"""Small fixed-size complex linear algebra for one- and two-qubit operators.

Two-qubit operators use the basis ordering ``|ab> -> 2*a + b``.
"""
from __future__ import annotations

import numpy as np

from .errors import NotHermitian, NotPSD, SingularMarginal

HERMITIAN_TOL = 1e-10
PSD_CLAMP = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
PAULI_BASIS = (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z)


def _check_shape(m: np.ndarray, n: int, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two 2x2 operators, qubit A first."""
    return np.kron(_check_shape(a, 2, "A"), _check_shape(b, 2, "B"))


def partial_trace(m: np.ndarray, keep: str) -> np.ndarray:
    """Reduce a 4x4 operator to one qubit.

    ``keep="A"`` traces out B and ``keep="B"`` traces out A.
    """
    t = _check_shape(m, 4).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def eigvals_hermitian(m: np.ndarray, tolerance: float = HERMITIAN_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted in descending order."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > tolerance:
        raise NotHermitian("matrix is not Hermitian within %g" % tolerance)
    return np.linalg.eigvalsh(hermitian_part(m))[::-1]


def psd_inv_sqrt_2x2(m: np.ndarray, epsilon: float = 1e-12) -> np.ndarray:
    """Inverse square root of a positive-definite 2x2 Hermitian matrix."""
    m = _check_shape(m, 2)
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian")
    w, v = np.linalg.eigh(hermitian_part(m))
    if w.min() < epsilon:
        raise SingularMarginal(f"smallest eigenvalue {w.min():.3e} is below {epsilon:g}")
    return (v * (1.0 / np.sqrt(w))) @ v.conj().T


def _psd_sqrt(m: np.ndarray, name: str) -> np.ndarray:
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian(f"{name} is not Hermitian")
    w, v = np.linalg.eigh(hermitian_part(m))
    if w.min() < -PSD_CLAMP:
        raise NotPSD(f"{name} has eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def eigvals_psd_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Spectrum of ``p @ q`` for PSD ``p`` and ``q``, descending.

    The product is not Hermitian, but it is similar to ``sqrt(p) q sqrt(p)``,
    which is, so the eigenvalues are real and non-negative.
    """
    p = _check_shape(p, 4, "P")
    q = _check_shape(q, 4, "Q")
    root = _psd_sqrt(p, "P")
    _psd_sqrt(q, "Q")
    w = np.linalg.eigvalsh(hermitian_part(root @ q @ root))[::-1]
    if w.min() < -PSD_CLAMP:
        raise NotPSD(f"product has eigenvalue {w.min():.3e}")
    return np.clip(w, 0.0, None)
