"""Finite-statistics emulation of the photon-counting experiment.

Coincidence counts for every measurement setting and outcome are independent
Poisson draws. Each draw has its own RNG substream keyed by
``(seed, stream, setting, outcome)``, so results do not depend on evaluation
order or thread count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import worker_count
from .bell import ChshSettings, chsh_combination, chsh_value, optimal_chsh_settings
from .entanglement import concurrence
from .errors import DomainError, InsufficientData
from .qmath import PAULI_BASIS, hermitian_part, tensor
from .states import correlation_data, joint_distribution
from .steering import AxisSet, combined_axes_16, steering_parameter, steering_settings
from .unsteering import unsteering_T, unsteering_t

AXES = np.eye(3)
PAULI_SETTINGS = [(AXES[i], AXES[j]) for i in range(3) for j in range(3)]
MEASURE_NAMES = ("concurrence", "bell_S", "steering_T16", "unsteering_tU", "unsteering_TU")


@dataclass(frozen=True)
class CountRecord:
    setting_id: int
    alice_dir: np.ndarray
    bob_dir: np.ndarray
    counts: tuple  # outcomes (0,0), (0,1), (1,0), (1,1)

    @property
    def total(self) -> float:
        return float(sum(self.counts))

    def correlator(self) -> float:
        """Empirical ``<A B>`` with +-1 outcomes."""
        n00, n01, n10, n11 = self.counts
        return (n00 - n01 - n10 + n11) / self.total


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    replicas: int

    def __post_init__(self):
        if self.std_error < 0 or self.replicas < 2:
            raise DomainError("std_error must be >= 0 and replicas >= 2")


def _rng(seed: int, stream: int, setting: int, outcome: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream, setting, outcome]))


def _poisson_counts(means: np.ndarray, seed: int, stream: int) -> np.ndarray:
    """Independent Poisson draws for a (settings, 4) array of means."""
    out = np.zeros(means.shape, dtype=np.int64)
    for k in range(means.shape[0]):
        for o in range(4):
            out[k, o] = _rng(seed, stream, k, o).poisson(max(float(means[k, o]), 0.0))
    return out


def expected_counts(rho: np.ndarray, settings: Sequence, mean_counts: float) -> np.ndarray:
    probs = np.array([joint_distribution(rho, a, b) for a, b in settings])
    return mean_counts * np.clip(probs, 0.0, None)


def _records(settings: Sequence, counts: np.ndarray) -> list[CountRecord]:
    return [CountRecord(k, np.asarray(a, float), np.asarray(b, float), tuple(int(c) for c in row))
            for k, ((a, b), row) in enumerate(zip(settings, counts))]


def simulate_counts(rho: np.ndarray, settings: Sequence, mean_counts: float,
                    seed: int = 0, stream: int = 0) -> list[CountRecord]:
    """Poisson coincidence counts for each ``(alice_dir, bob_dir)`` setting."""
    if not mean_counts > 0:
        raise DomainError("mean_counts must be positive")
    means = expected_counts(rho, settings, mean_counts)
    return _records(settings, _poisson_counts(means, seed, stream))


def project_psd(m: np.ndarray) -> np.ndarray:
    """Closest unit-trace PSD matrix in eigenvalue space.

    Negative eigenvalues are set to zero and their total is subtracted evenly
    from the remaining ones, repeating until none is negative.
    """
    m = hermitian_part(np.asarray(m, dtype=complex))
    m = m / np.trace(m).real
    w, v = np.linalg.eigh(m)
    w = w[::-1]
    v = v[:, ::-1]
    n = len(w)
    lam = w.copy()
    deficit = 0.0
    i = n - 1
    while i >= 0 and lam[i] + deficit / (i + 1) < 0:
        deficit += lam[i]
        lam[i] = 0.0
        i -= 1
    lam[: i + 1] += deficit / (i + 1)
    out = (v * lam) @ v.conj().T
    return out / np.trace(out).real


def _find_setting(records: Sequence[CountRecord], a: np.ndarray, b: np.ndarray) -> CountRecord:
    for r in records:
        if np.allclose(r.alice_dir, a, atol=1e-9) and np.allclose(r.bob_dir, b, atol=1e-9):
            return r
    raise InsufficientData(f"missing Pauli setting alice={a}, bob={b}")


def linear_inversion(records: Sequence[CountRecord]) -> np.ndarray:
    """Unconstrained estimate from the nine Pauli-pair settings."""
    grid = [[_find_setting(records, AXES[i], AXES[j]) for j in range(3)] for i in range(3)]
    for row in grid:
        for r in row:
            if r.total <= 0:
                raise InsufficientData(f"setting {r.setting_id} recorded no counts")
    S = np.zeros((4, 4))
    S[0, 0] = 1.0
    for i in range(3):
        for j in range(3):
            S[i + 1, j + 1] = grid[i][j].correlator()
    # local terms pool every setting that measures the given axis
    for i in range(3):
        num = sum(r.counts[0] + r.counts[1] - r.counts[2] - r.counts[3] for r in grid[i])
        S[i + 1, 0] = num / sum(r.total for r in grid[i])
        col = [grid[k][i] for k in range(3)]
        num = sum(r.counts[0] - r.counts[1] + r.counts[2] - r.counts[3] for r in col)
        S[0, i + 1] = num / sum(r.total for r in col)
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            rho += S[i, j] * tensor(PAULI_BASIS[i], PAULI_BASIS[j])
    return rho / 4


def tomography(records: Sequence[CountRecord]) -> np.ndarray:
    """Linear-inversion state estimate followed by PSD projection."""
    return project_psd(linear_inversion(records))


@dataclass(frozen=True)
class _Plan:
    chsh: ChshSettings
    steer: list
    steer_mask: np.ndarray
    settings: list

    @property
    def n_chsh(self):
        return 4

    @property
    def n_steer(self):
        return len(self.steer)


def _plan(rho: np.ndarray, chsh: ChshSettings | None, axes: AxisSet) -> _Plan:
    chsh = chsh or optimal_chsh_settings(rho)
    pairs = steering_settings(correlation_data(rho).T, axes)
    mask = np.array([a is not None for a, _ in pairs])
    # an undefined Alice direction contributes nothing; measure along Bob's axis anyway
    steer = [(a if a is not None else b, b) for a, b in pairs]
    settings = list(chsh.pairs()) + steer + PAULI_SETTINGS
    return _Plan(chsh, steer, mask, settings)


def _measures_from_counts(plan: _Plan, counts: np.ndarray) -> dict[str, float]:
    recs = _records(plan.settings, counts)
    chsh_recs = recs[: plan.n_chsh]
    steer_recs = recs[plan.n_chsh: plan.n_chsh + plan.n_steer]
    tomo_recs = recs[plan.n_chsh + plan.n_steer:]
    out = {}
    out["bell_S"] = chsh_combination(*(r.correlator() if r.total > 0 else 0.0 for r in chsh_recs))
    terms = [r.correlator() if (use and r.total > 0) else 0.0
             for r, use in zip(steer_recs, plan.steer_mask)]
    out["steering_T16"] = float(np.mean(terms))
    rho_hat = tomography(tomo_recs)
    out["concurrence"] = concurrence(rho_hat).value
    t_u = unsteering_t(rho_hat, strict=False)
    out["unsteering_tU"] = t_u
    out["unsteering_TU"] = unsteering_T(t_u)
    return out


def analytic_measures(rho: np.ndarray, chsh: ChshSettings | None = None,
                      axes: AxisSet | None = None) -> dict[str, float]:
    """Noise-free values of the quantities :func:`estimate_measures` targets."""
    axes = axes or combined_axes_16()
    chsh = chsh or optimal_chsh_settings(rho)
    t_u = unsteering_t(rho)
    return {
        "concurrence": concurrence(rho).value,
        "bell_S": chsh_value(rho, chsh),
        "steering_T16": steering_parameter(rho, axes),
        "unsteering_tU": t_u,
        "unsteering_TU": unsteering_T(t_u),
    }


def estimate_measures(rho_true: np.ndarray, mean_counts: float, seed: int = 0,
                      replicas: int = 100, chsh: ChshSettings | None = None,
                      axes: AxisSet | None = None) -> dict[str, EstimateWithError]:
    """Simulate one run and estimate every measure with a bootstrap standard error.

    The Bell and steering parameters come straight from their inequality-test
    counts; concurrence and the unsteerability parameter come from tomography.
    Errors are the spread over ``replicas`` parametric bootstrap runs in which
    each observed count is redrawn as a Poisson variable around itself.
    """
    if replicas < 2:
        raise DomainError("replicas must be at least 2")
    if not mean_counts > 0:
        raise DomainError("mean_counts must be positive")
    plan = _plan(np.asarray(rho_true, dtype=complex), chsh, axes or combined_axes_16())
    observed = _poisson_counts(expected_counts(rho_true, plan.settings, mean_counts), seed, 0)
    point = _measures_from_counts(plan, observed)

    def replica(r: int) -> dict[str, float]:
        return _measures_from_counts(plan, _poisson_counts(observed.astype(float), seed, r + 1))

    workers = min(worker_count(), replicas)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            boot = list(pool.map(replica, range(replicas)))
    else:
        boot = [replica(r) for r in range(replicas)]
    return {
        name: EstimateWithError(
            value=float(point[name]),
            std_error=float(np.std([b[name] for b in boot], ddof=1)),
            replicas=replicas,
        )
        for name in MEASURE_NAMES
    }
