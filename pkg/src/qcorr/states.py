"""Initial pure states, the amplitude-damping channel and correlation data."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotUnitVector
from .qmath import IDENTITY, PAULIS, PSD_CLAMP, eigvals_hermitian, tensor

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class StatePoint:
    """Coordinates ``(theta, damping)`` of a member of the damped state family."""

    theta: float
    damping: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2) or math.isnan(self.theta):
            raise DomainError(f"theta={self.theta!r} outside [0, pi/2]")
        if not (0.0 <= self.damping <= 1.0) or math.isnan(self.damping):
            raise DomainError(f"damping={self.damping!r} outside [0, 1]")


@dataclass(frozen=True)
class CorrelationData:
    """Local Bloch vectors and the 3x3 correlation matrix of a two-qubit state."""

    a: np.ndarray
    b: np.ndarray
    T: np.ndarray


def validate_density(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as a complex 4x4 array after checking it is a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"density matrix must be 4x4, got {rho.shape}")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise DomainError(f"trace {np.trace(rho).real:.12g} is not 1")
    w = eigvals_hermitian(rho)
    if w[-1] < -PSD_CLAMP:
        raise DomainError(f"density matrix has eigenvalue {w[-1]:.3e}")
    return rho


def pure_state(theta: float) -> np.ndarray:
    """Projector onto ``cos(theta)|00> + sin(theta)|11>``."""
    if not (0.0 <= theta <= math.pi / 2):
        raise DomainError(f"theta={theta!r} outside [0, pi/2]")
    psi = np.zeros(4, dtype=complex)
    psi[0] = math.cos(theta)
    psi[3] = math.sin(theta)
    return np.outer(psi, psi.conj())


def adc_kraus(strength: float) -> tuple[np.ndarray, np.ndarray]:
    """Kraus pair of the single-qubit amplitude-damping channel."""
    if not (0.0 <= strength <= 1.0):
        raise DomainError(f"damping strength {strength!r} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - strength)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(strength)], [0.0, 0.0]], dtype=complex)
    return k0, k1


def apply_adc(rho: np.ndarray, d_a: float, d_b: float) -> np.ndarray:
    """Damp qubit A with strength ``d_a`` and qubit B with ``d_b``."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for ka in adc_kraus(d_a):
        for kb in adc_kraus(d_b):
            # Kronecker product without np.kron's per-call overhead
            k = (ka[:, None, :, None] * kb[None, :, None, :]).reshape(4, 4)
            out += k @ rho @ k.conj().T
    return out


def family_state(p: StatePoint) -> np.ndarray:
    """Closed form of ``|psi_theta>`` after equal damping ``D`` on both qubits."""
    c, s = math.cos(p.theta), math.sin(p.theta)
    d = p.damping
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = c * c + d * d * s * s
    rho[0, 3] = rho[3, 0] = (1 - d) * c * s
    rho[1, 1] = rho[2, 2] = (1 - d) * d * s * s
    rho[3, 3] = (1 - d) ** 2 * s * s
    return rho


def _unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise NotUnitVector(f"{name} must be a unit 3-vector, got {v!r}")
    return v


def spin_projector(direction, outcome: int) -> np.ndarray:
    """Projector ``(I + (-1)^outcome n.sigma)/2``."""
    n = _unit(direction, "direction")
    sign = 1 - 2 * outcome
    return 0.5 * (IDENTITY + sign * sum(ni * s for ni, s in zip(n, PAULIS)))


def joint_probability(rho: np.ndarray, alice_dir, bob_dir, a: int, b: int) -> float:
    """Probability of outcomes ``(a, b)`` for spin measurements along the given axes."""
    if a not in (0, 1) or b not in (0, 1):
        raise DomainError("outcomes must be 0 or 1")
    proj = tensor(spin_projector(alice_dir, a), spin_projector(bob_dir, b))
    return float(np.real(np.trace(proj @ np.asarray(rho, dtype=complex))))


def joint_distribution(rho: np.ndarray, alice_dir, bob_dir) -> np.ndarray:
    """All four outcome probabilities ordered (0,0), (0,1), (1,0), (1,1)."""
    return np.array([joint_probability(rho, alice_dir, bob_dir, a, b)
                     for a in (0, 1) for b in (0, 1)])


# PAULI_PRODUCTS[i, j] = sigma_i (x) sigma_j with sigma_0 = I
PAULI_PRODUCTS = np.array([[tensor(si, sj) for sj in (IDENTITY, *PAULIS)]
                           for si in (IDENTITY, *PAULIS)])


def correlation_data(rho: np.ndarray) -> CorrelationData:
    """Bloch vectors ``a_i = Tr[(s_i x I) rho]``, ``b_j`` likewise, and ``T_ij = Tr[(s_i x s_j) rho]``."""
    rho = np.asarray(rho, dtype=complex)
    full = np.einsum("ijab,ba->ij", PAULI_PRODUCTS, rho).real
    return CorrelationData(a=full[1:, 0].copy(), b=full[0, 1:].copy(), T=full[1:, 1:].copy())


def family_correlation_matrix(p: StatePoint) -> np.ndarray:
    """Diagonal correlation matrix of ``family_state(p)`` in closed form."""
    c, s = math.cos(p.theta), math.sin(p.theta)
    d = p.damping
    t_xy = (1 - d) * math.sin(2 * p.theta)
    t_z = c * c + (1 - 2 * d) ** 2 * s * s
    return np.diag([t_xy, -t_xy, t_z])
