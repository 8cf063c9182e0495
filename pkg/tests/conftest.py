import math

import numpy as np
import pytest

from qcorr.states import pure_state

BELL = pure_state(math.pi / 4)

_acceptance_lines: list[str] = []


def random_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng: np.random.Generator, n: int = 4, rank: int | None = None) -> np.ndarray:
    k = rank or n
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record_criterion():
    def record(label: str, ok: bool, detail: str):
        _acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
