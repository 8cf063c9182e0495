import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorr.errors import DomainError, NotUnitVector
from qcorr.qmath import IDENTITY, PAULIS, tensor
from qcorr.states import (StatePoint, apply_adc, correlation_data, family_correlation_matrix,
                          family_state, joint_probability, pure_state, spin_projector,
                          validate_density)

from conftest import BELL, random_density, random_unit

Z = np.array([0.0, 0.0, 1.0])


def test_state_point_validation():
    StatePoint(0.0, 0.0)
    StatePoint(math.pi / 2, 1.0)
    with pytest.raises(DomainError):
        StatePoint(-0.1, 0.5)
    with pytest.raises(DomainError):
        StatePoint(0.5, 1.1)
    with pytest.raises(DomainError):
        StatePoint(float("nan"), 0.5)


def test_pure_state_examples():
    ket00 = np.zeros((4, 4))
    ket00[0, 0] = 1
    np.testing.assert_allclose(pure_state(0), ket00, atol=1e-16)
    rho = pure_state(math.pi / 4)
    for i, j in [(0, 0), (0, 3), (3, 0), (3, 3)]:
        assert rho[i, j] == pytest.approx(0.5)
    rho = pure_state(math.pi / 6)
    assert rho[0, 0].real == pytest.approx(0.75)
    assert rho[3, 3].real == pytest.approx(0.25)
    assert rho[0, 3].real == pytest.approx(math.sqrt(3) / 4)
    assert np.all(rho.imag == 0)
    with pytest.raises(DomainError):
        pure_state(2.0)


def test_apply_adc_examples(rng):
    rho = random_density(rng)
    np.testing.assert_allclose(apply_adc(rho, 0, 0), rho, atol=1e-15)
    ket00 = np.zeros((4, 4))
    ket00[0, 0] = 1
    np.testing.assert_allclose(apply_adc(BELL, 1, 1), ket00, atol=1e-15)
    out = apply_adc(BELL, 0.5, 0.5)
    np.testing.assert_allclose(np.diag(out).real, [0.625, 0.125, 0.125, 0.125], atol=1e-15)
    assert out[0, 3].real == pytest.approx(0.25)
    with pytest.raises(DomainError):
        apply_adc(BELL, 1.5, 0.0)


def test_family_state_examples():
    rho = family_state(StatePoint(math.pi / 4, 0.5))
    np.testing.assert_allclose(np.diag(rho).real, [0.625, 0.125, 0.125, 0.125], atol=1e-15)
    assert rho[0, 3].real == pytest.approx(0.25)
    assert rho[3, 0].real == pytest.approx(0.25)
    for th in (0.1, 0.7, 1.3):
        np.testing.assert_allclose(family_state(StatePoint(th, 0)), pure_state(th), atol=1e-15)
    ket00 = np.zeros((4, 4))
    ket00[0, 0] = 1
    np.testing.assert_allclose(family_state(StatePoint(math.pi / 2, 1)), ket00, atol=1e-15)


def test_channel_matches_closed_form_on_grid():
    worst = 0.0
    for th in np.linspace(0, math.pi / 2, 50):
        for d in np.linspace(0, 1, 50):
            p = StatePoint(float(th), float(d))
            worst = max(worst, np.max(np.abs(apply_adc(pure_state(p.theta), d, d) - family_state(p))))
    assert worst < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_channel_keeps_valid_states(seed, da, db):
    rho = random_density(np.random.default_rng(seed))
    validate_density(apply_adc(rho, da, db))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_channel_composition(seed, d1, d2):
    rho = random_density(np.random.default_rng(seed))
    twice = apply_adc(apply_adc(rho, d1, d1), d2, d2)
    d = 1 - (1 - d1) * (1 - d2)
    np.testing.assert_allclose(twice, apply_adc(rho, d, d), atol=1e-12)


def test_joint_probability_examples(rng):
    assert joint_probability(BELL, Z, Z, 0, 0) == pytest.approx(0.5)
    assert joint_probability(BELL, Z, Z, 0, 1) == pytest.approx(0.0, abs=1e-15)
    rho = family_state(StatePoint(math.pi / 4, 0.5))
    assert joint_probability(rho, Z, Z, 0, 0) == pytest.approx(0.625)
    for _ in range(10):
        r = random_density(rng)
        a, b = random_unit(rng), random_unit(rng)
        total = sum(joint_probability(r, a, b, i, j) for i in (0, 1) for j in (0, 1))
        assert total == pytest.approx(1.0, abs=1e-9)


def test_joint_probability_marginal(rng):
    for _ in range(10):
        r = random_density(rng)
        a, b = random_unit(rng), random_unit(rng)
        for i in (0, 1):
            marginal = sum(joint_probability(r, a, b, i, j) for j in (0, 1))
            local = np.trace(tensor(spin_projector(a, i), IDENTITY) @ r).real
            assert abs(marginal - local) < 1e-12


def test_joint_probability_requires_unit_vectors():
    with pytest.raises(NotUnitVector):
        joint_probability(BELL, np.array([1.0, 1.0, 0.0]), Z, 0, 0)


def test_correlation_data_examples():
    cd = correlation_data(BELL)
    np.testing.assert_allclose(cd.a, 0, atol=1e-15)
    np.testing.assert_allclose(cd.b, 0, atol=1e-15)
    np.testing.assert_allclose(cd.T, np.diag([1, -1, 1]), atol=1e-15)
    cd = correlation_data(pure_state(0))
    np.testing.assert_allclose(cd.a, [0, 0, 1])
    np.testing.assert_allclose(cd.b, [0, 0, 1])
    np.testing.assert_allclose(cd.T, np.diag([0, 0, 1]))


def test_correlation_data_family_closed_form():
    for th in np.linspace(0, math.pi / 2, 13):
        for d in np.linspace(0, 1, 11):
            p = StatePoint(float(th), float(d))
            s2 = math.sin(2 * th)
            expected = np.diag([(1 - d) * s2, -(1 - d) * s2,
                                math.cos(th) ** 2 + (1 - 2 * d) ** 2 * math.sin(th) ** 2])
            np.testing.assert_allclose(correlation_data(family_state(p)).T, expected, atol=1e-12)
            np.testing.assert_allclose(family_correlation_matrix(p), expected, atol=1e-12)


def test_correlation_data_bounds(rng):
    for _ in range(20):
        cd = correlation_data(random_density(rng))
        assert np.linalg.norm(cd.a) <= 1 + 1e-9
        assert np.linalg.norm(cd.b) <= 1 + 1e-9
        assert np.max(np.abs(cd.T)) <= 1 + 1e-9


def test_correlation_matches_pauli_expansion(rng):
    r = random_density(rng)
    cd = correlation_data(r)
    rebuilt = tensor(IDENTITY, IDENTITY).astype(complex)
    for i, s in enumerate(PAULIS):
        rebuilt = rebuilt + cd.a[i] * tensor(s, IDENTITY) + cd.b[i] * tensor(IDENTITY, s)
        for j, t in enumerate(PAULIS):
            rebuilt = rebuilt + cd.T[i, j] * tensor(s, t)
    np.testing.assert_allclose(rebuilt / 4, r, atol=1e-12)
