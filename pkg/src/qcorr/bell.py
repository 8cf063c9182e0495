"""CHSH values, the Horodecki maximum and constructions of optimal settings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateCorrelation, DomainError
from .states import UNIT_TOL, StatePoint, _unit, correlation_data, family_correlation_matrix

TSIRELSON = 2.0 * math.sqrt(2.0)
XY_PLANE = "xy-plane"
XZ_PLANE = "xz-plane"

_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])
_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class ChshSettings:
    """Two measurement directions per party, ordered (first, second)."""

    alice: tuple[np.ndarray, np.ndarray]
    bob: tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(_unit(v, "alice direction") for v in self.alice))
        object.__setattr__(self, "bob", tuple(_unit(v, "bob direction") for v in self.bob))
        if len(self.alice) != 2 or len(self.bob) != 2:
            raise DomainError("CHSH needs exactly two directions per party")

    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Setting pairs in CHSH order (a1 b1), (a1 b2), (a2 b1), (a2 b2)."""
        return [(a, b) for a in self.alice for b in self.bob]


class BellValue(NamedTuple):
    value: float
    branch: str


def chsh_combination(e11: float, e12: float, e21: float, e22: float) -> float:
    return e11 + e12 + e21 - e22


def horodecki_S(rho: np.ndarray) -> float:
    """Maximal CHSH value of ``rho``: twice the root of the two largest eigenvalues of T^T T."""
    T = correlation_data(rho).T
    t = np.linalg.eigvalsh(T.T @ T)[::-1]
    return 2.0 * math.sqrt(max(0.0, t[0] + t[1]))


def bell_S_closed(p: StatePoint) -> BellValue:
    """Horodecki value of the family state; ties go to the xy-plane branch."""
    T = family_correlation_matrix(p)
    l2 = T[0, 0] ** 2
    l1 = T[2, 2] ** 2
    in_plane = 2.0 * math.sqrt(2.0 * l2)
    mixed = 2.0 * math.sqrt(l1 + l2)
    if in_plane >= mixed:
        return BellValue(in_plane, XY_PLANE)
    return BellValue(mixed, XZ_PLANE)


def chsh_value(rho: np.ndarray, s: ChshSettings) -> float:
    T = correlation_data(rho).T
    e = [float(a @ T @ b) for a, b in s.pairs()]
    return chsh_combination(*e)


def appendix_c_settings(damping: float) -> ChshSettings:
    """Optimal settings for ``theta = pi/4`` family states.

    For ``D <= 0.5`` Alice measures x and y and Bob measures in the xy-plane;
    otherwise Alice measures x and z and Bob measures in the xz-plane.
    """
    if not (0.0 <= damping <= 1.0):
        raise DomainError(f"damping={damping!r} outside [0, 1]")
    if damping <= 0.5:
        phi1, phi2 = 7 * math.pi / 4, math.pi / 4
        bob = tuple(np.array([math.cos(f), math.sin(f), 0.0]) for f in (phi1, phi2))
        return ChshSettings(alice=(_X, _Y), bob=bob)
    ratio = (1 - damping) / (1 - 2 * (1 - damping) * damping)
    chi1 = math.atan(ratio)
    chi2 = math.pi + math.atan(-ratio)
    bob = tuple(np.array([math.sin(c), 0.0, math.cos(c)]) for c in (chi1, chi2))
    return ChshSettings(alice=(_X, _Z), bob=bob)


def _orthogonal_unit(v: np.ndarray) -> np.ndarray:
    trial = _X if abs(v[0]) < 0.9 else _Y
    w = np.cross(v, trial)
    return w / np.linalg.norm(w)


def optimal_chsh_settings(rho: np.ndarray) -> ChshSettings:
    """Settings attaining ``horodecki_S(rho)``.

    Bob measures ``c1 cos(mu) +- c2 sin(mu)`` where ``c1, c2`` are the leading
    eigenvectors of ``T^T T`` and ``tan(mu) = sqrt(t2 / t1)``; Alice measures
    along the normalized images ``T (b1 +- b2)``.

    Raises DegenerateCorrelation when T vanishes.
    """
    T = correlation_data(rho).T
    w, v = np.linalg.eigh(T.T @ T)
    order = np.argsort(w)[::-1]
    t1, t2 = max(w[order[0]], 0.0), max(w[order[1]], 0.0)
    if t1 < 1e-12:
        raise DegenerateCorrelation("correlation matrix vanishes; no optimal CHSH plane")
    c1, c2 = v[:, order[0]], v[:, order[1]]
    mu = math.atan(math.sqrt(t2 / t1))
    b1 = c1 * math.cos(mu) + c2 * math.sin(mu)
    b2 = c1 * math.cos(mu) - c2 * math.sin(mu)
    plus, minus = T @ (b1 + b2), T @ (b1 - b2)
    a1 = plus / np.linalg.norm(plus)
    n_minus = np.linalg.norm(minus)
    a2 = minus / n_minus if n_minus > UNIT_TOL else _orthogonal_unit(a1)
    return ChshSettings(alice=(a1, a2), bob=(b1 / np.linalg.norm(b1), b2 / np.linalg.norm(b2)))


def canonical_xz_settings() -> ChshSettings:
    """Textbook settings maximal for the Bell state: Alice z, x; Bob at +-45 deg in xz."""
    r = 1 / math.sqrt(2)
    return ChshSettings(alice=(_Z, _X), bob=(np.array([r, 0.0, r]), np.array([-r, 0.0, r])))
