import itertools
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from qcorr.entanglement import concurrence_closed
from qcorr.errors import DomainError, TooManyAxes, ZeroCorrelation
from qcorr.states import StatePoint, correlation_data, family_state, joint_probability, pure_state
from qcorr.steering import (C16_REPORTED, PHI, AxisSet, SteeringAssessment, alice_optimal_direction,
                            appendix_d_settings, assess, combined_axes_16, lhs_bound,
                            platonic_axes, steering_parameter, steering_parameter_family,
                            steering_terms)

from conftest import BELL, random_unit


def brute_force_bound(axes: np.ndarray) -> float:
    """Every sign pattern, no symmetry reduction."""
    best = 0.0
    for signs in itertools.product((1, -1), repeat=len(axes)):
        best = max(best, np.linalg.norm(np.array(signs) @ axes))
    return best / len(axes)


def sphere_bound(axes: np.ndarray, starts: int = 400, seed: int = 3) -> float:
    """Maximize sum_k |n_k . u| over unit u; the optimal signs are sign(n_k . u)."""
    rng = np.random.default_rng(seed)

    def f(x):
        u = x / np.linalg.norm(x)
        return -np.sum(np.abs(axes @ u))

    best = 0.0
    for _ in range(starts):
        r = minimize(f, rng.normal(size=3), method="Nelder-Mead",
                     options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        best = max(best, -r.fun)
    return best / len(axes)


def test_axis_counts_and_examples():
    counts = {"octahedron": 3, "cube": 4, "icosahedron": 6, "dodecahedron": 10}
    for name, m in counts.items():
        assert len(platonic_axes(name)) == m
    octa = platonic_axes("octahedron").axes
    np.testing.assert_allclose(octa @ octa.T, np.eye(3))
    dod = platonic_axes("dodecahedron").axes
    assert np.sum(np.isclose(dod[:, 2] ** 2, 1 / 3)) == 4
    ico = platonic_axes("icosahedron").axes
    d2 = 1 + PHI ** 2
    np.testing.assert_allclose(sorted(ico[:, 2] ** 2),
                               sorted([PHI ** 2 / d2] * 2 + [0.0] * 2 + [1 / d2] * 2), atol=1e-15)
    with pytest.raises(DomainError):
        platonic_axes("tetrahedron")


def test_icosahedron_is_dual_of_dodecahedron():
    # each icosahedron axis is a face normal: it sits at equal angle from five dodecahedron vertices
    dod = platonic_axes("dodecahedron").axes
    vertices = np.vstack([dod, -dod])
    for n in platonic_axes("icosahedron").axes:
        dots = np.sort(vertices @ n)[::-1]
        np.testing.assert_allclose(dots[:5], dots[0], atol=1e-12)
        assert dots[5] < dots[0] - 1e-3


def test_combined_axes():
    axes = combined_axes_16()
    assert len(axes) == 16
    gram = np.abs(axes.axes @ axes.axes.T) - np.eye(16)
    assert gram.max() < 1 - 1e-9


def test_axis_set_rejects_parallel_axes():
    with pytest.raises(DomainError):
        AxisSet(np.array([[1.0, 0, 0], [-1.0, 0, 0]]), "bad")


@pytest.mark.parametrize("name", ["octahedron", "cube", "icosahedron", "dodecahedron"])
def test_bound_matches_brute_force(name):
    axes = platonic_axes(name)
    assert lhs_bound(axes) == pytest.approx(brute_force_bound(axes.axes), abs=1e-12)


def test_bound_examples():
    assert lhs_bound(platonic_axes("octahedron")) == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    # (+,+,+,-) on the four diagonals sums to (0, 0, 4)/sqrt(3)
    assert lhs_bound(platonic_axes("cube")) == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_combined_bound_matches_sphere_maximization():
    axes = combined_axes_16()
    exact = lhs_bound(axes)
    assert sphere_bound(axes.axes) == pytest.approx(exact, abs=1e-9)
    assert exact == pytest.approx(0.5114255510, abs=1e-9)


def test_bound_rejects_large_sets(rng):
    v = rng.normal(size=(21, 3))
    with pytest.raises(TooManyAxes):
        lhs_bound(AxisSet(v / np.linalg.norm(v, axis=1, keepdims=True), "big"))


def test_bound_invariant_under_rotation_and_sign_flips(rng):
    axes = combined_axes_16()
    ref = lhs_bound(axes)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert lhs_bound(AxisSet(axes.axes @ q.T, "rotated")) == pytest.approx(ref, abs=1e-12)
    flips = rng.choice([-1.0, 1.0], size=(16, 1))
    assert lhs_bound(AxisSet(axes.axes * flips, "flipped")) == pytest.approx(ref, abs=1e-12)


def test_bound_independent_of_thread_count(monkeypatch):
    axes = combined_axes_16()
    monkeypatch.setenv("QCORR_THREADS", "1")
    one = lhs_bound(axes)
    monkeypatch.setenv("QCORR_THREADS", "4")
    assert lhs_bound(axes) == one


def test_steering_parameter_examples():
    axes = combined_axes_16()
    assert steering_parameter(BELL, axes) == pytest.approx(1.0, abs=1e-12)
    assert steering_parameter(BELL, platonic_axes("cube")) == pytest.approx(1.0, abs=1e-12)
    rho = family_state(StatePoint(math.pi / 4, 0.5))
    assert steering_parameter(rho, axes) == pytest.approx(0.5, abs=1e-12)
    product = steering_parameter(pure_state(0), axes)
    assert product == pytest.approx(np.mean(np.abs(axes.axes[:, 2])), abs=1e-12)
    assert product < C16_REPORTED


def test_steering_terms_bound_parameter(rng):
    axes = combined_axes_16()
    for _ in range(10):
        from conftest import random_density
        rho = random_density(rng)
        terms = steering_terms(correlation_data(rho).T, axes)
        assert np.all(terms <= 1 + 1e-9)
        assert steering_parameter(rho, axes) <= 1 + 1e-9


def _probability_route(rho, axes):
    T = correlation_data(rho).T
    total = 0.0
    for n in axes.axes:
        try:
            a = alice_optimal_direction(T, n)
        except ZeroCorrelation:
            continue
        total += sum((-1) ** (i + j) * joint_probability(rho, a, n, i, j)
                     for i in (0, 1) for j in (0, 1))
    return total / len(axes)


def test_probability_route_matches(rng):
    from conftest import random_density
    axes = combined_axes_16()
    for rho in [random_density(rng) for _ in range(5)] + [family_state(StatePoint(0.9, 0.3))]:
        assert _probability_route(rho, axes) == pytest.approx(steering_parameter(rho, axes), abs=1e-9)


def test_family_depends_only_on_polar_angles():
    standard = []
    for v in [(0, 1, PHI), (0, -1, PHI), (1, PHI, 0), (-1, PHI, 0), (PHI, 0, 1), (PHI, 0, -1)]:
        v = np.array(v, dtype=float)
        standard.append(v / np.linalg.norm(v))
    other = AxisSet(np.vstack([platonic_axes("dodecahedron").axes, standard]), "non-dual")
    axes = combined_axes_16()
    for th in np.linspace(0, math.pi / 2, 9):
        for d in np.linspace(0, 1, 9):
            p = StatePoint(float(th), float(d))
            assert steering_parameter_family(p, other) == pytest.approx(
                steering_parameter_family(p, axes), abs=1e-12)


def test_family_closed_path_matches_generic():
    axes = combined_axes_16()
    for th in np.linspace(0, math.pi / 2, 11):
        for d in np.linspace(0, 1, 11):
            p = StatePoint(float(th), float(d))
            assert steering_parameter_family(p, axes) == pytest.approx(
                steering_parameter(family_state(p), axes), abs=1e-12)


def test_steerable_implies_entangled_on_grid():
    axes = combined_axes_16()
    for th in np.linspace(0, math.pi / 2, 100):
        for d in np.linspace(0, 1, 100):
            p = StatePoint(float(th), float(d))
            if steering_parameter_family(p, axes) > C16_REPORTED:
                assert concurrence_closed(p) > 0


def test_assessment():
    a = SteeringAssessment(t_m=0.6, c_m=C16_REPORTED)
    assert a.steerable
    rho = family_state(StatePoint(math.pi / 4, 0.7))
    got = assess(rho, combined_axes_16(), C16_REPORTED)
    assert not got.steerable
    assert assess(BELL, platonic_axes("octahedron")).c_m == pytest.approx(1 / math.sqrt(3))


def test_alice_optimal_direction_examples():
    T = np.diag([1.0, -1.0, 1.0])
    np.testing.assert_allclose(alice_optimal_direction(T, [0, 0, 1]), [0, 0, 1])
    np.testing.assert_allclose(alice_optimal_direction(T, [0, 1, 0]), [0, -1, 0])
    T = np.diag([0.5, -0.5, 0.50005])
    n = np.ones(3) / math.sqrt(3)
    a = alice_optimal_direction(T, n)
    assert math.atan2(a[1], a[0]) == pytest.approx(math.atan(-1), abs=1e-12)
    assert a @ T @ n == pytest.approx(np.linalg.norm(T @ n))
    with pytest.raises(ZeroCorrelation):
        alice_optimal_direction(np.zeros((3, 3)), n)


def test_alice_direction_is_argmax(rng):
    for _ in range(10):
        T = rng.normal(size=(3, 3))
        n = random_unit(rng)
        best = alice_optimal_direction(T, n) @ T @ n
        for _ in range(50):
            assert random_unit(rng) @ T @ n <= best + 1e-12


def test_table_diagnostic():
    report = appendix_d_settings(StatePoint(math.pi / 4, 0.3))
    assert len(report.entries) == 16
    canon = combined_axes_16().axes
    for e in report.entries[:4]:
        assert e.bob_printed_norm == pytest.approx(1.0)
        assert e.bob_deviation < 1e-12
        np.testing.assert_allclose(e.bob, canon[e.index - 1], atol=1e-15)
    for e in report.entries[10:]:
        assert e.bob_printed_norm == pytest.approx(1.0, abs=1e-12)
        assert e.bob_deviation < 1e-12
    for e in report.entries[4:10]:
        assert e.bob_printed_norm == pytest.approx(2.955, abs=1e-3)
        assert e.index in report.mismatches
    # first-row Alice angles reproduce the optimum for the first cube diagonal
    assert report.entries[0].alice_deviation < 1e-9
    assert len(report.pairs()) == 16
