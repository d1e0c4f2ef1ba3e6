from math import pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasekit.errors import ZeroMatrixError
from phasekit.generators import random_congruence, random_sectorial, random_unitary
from phasekit.numrange import (
    accretivity,
    boundary_trace,
    classify_sector,
    contains_point,
    support_value,
    supporting_rays,
)
from phasekit.phases import phases

seeds = st.integers(0, 2**32 - 1)


def test_support_value_basic():
    assert support_value(np.eye(3), 0.0)[0] == pytest.approx(1.0)
    assert support_value(np.eye(3), pi / 2)[0] == pytest.approx(0.0, abs=1e-15)


def test_support_value_monte_carlo(rng):
    C = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    g = 0.8
    val, x = support_value(C, g)
    X = rng.normal(size=(3, 10_000)) + 1j * rng.normal(size=(3, 10_000))
    X /= np.linalg.norm(X, axis=0)
    q = np.real(np.exp(-1j * g) * np.einsum("ij,ik,kj->j", X.conj(), C, X))
    assert val <= q.min() + 1e-12
    assert q.min() - val < 1e-3 * max(1.0, abs(val)) + 5e-2
    assert np.real(np.exp(-1j * g) * np.vdot(x, C @ x)) == pytest.approx(val)


def test_example_matrices():
    C = np.diag([1, np.exp(1j * pi / 4), np.exp(-1j * pi / 4)])
    info = classify_sector(C)
    assert info.sectorial
    assert info.phi_max == pytest.approx(pi / 4, abs=1e-10)
    assert info.phi_min == pytest.approx(-pi / 4, abs=1e-10)
    assert info.gamma_star == pytest.approx(0.0, abs=1e-10)
    bad = np.diag([1, np.exp(2j * pi / 3), np.exp(-2j * pi / 3)])
    assert not classify_sector(bad).sectorial
    assert np.isnan(classify_sector(bad).gamma_star)


def test_pd_matrix_has_zero_field_angle(rng):
    G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    info = classify_sector(G @ G.conj().T + np.eye(4))
    assert info.phi_max == pytest.approx(0, abs=1e-9)
    assert info.phi_min == pytest.approx(0, abs=1e-9)
    assert info.field_angle == pytest.approx(0, abs=1e-9)


def test_zero_and_scalar():
    with pytest.raises(ZeroMatrixError):
        classify_sector(np.zeros((2, 2)))
    info = classify_sector(np.array([[2j]]))
    assert info.sectorial and info.gamma_star == pytest.approx(pi / 2)


def test_boundary_traces():
    tr = boundary_trace(np.diag([1.0, -1.0]), 32)
    assert np.allclose(tr.points.imag, 0) and np.all(np.abs(tr.points.real) <= 1 + 1e-12)
    tr = boundary_trace(np.array([[0, 1], [0, 0]]), 64)
    assert np.abs(tr.points).max() == pytest.approx(0.5, abs=1e-6)
    tr = boundary_trace(np.eye(3), 16)
    assert np.allclose(tr.points, 1)
    with pytest.raises(ValueError):
        boundary_trace(np.eye(2), 4)


def test_contains_point_basic(rng):
    assert contains_point(np.eye(3), 1.0)
    assert not contains_point(np.eye(3), 0.0)
    C = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    for _ in range(10):
        x = rng.normal(size=4) + 1j * rng.normal(size=4)
        x /= np.linalg.norm(x)
        assert contains_point(C, np.vdot(x, C @ x))
    far = 2 * np.linalg.norm(C, 2) + 1
    assert not contains_point(C, far)


@given(seeds)
def test_unitary_similarity_invariance(seed):
    rng = np.random.default_rng(seed)
    C, _ = random_sectorial(rng, 4)
    U = random_unitary(rng, 4)
    a, b = classify_sector(C), classify_sector(U.conj().T @ C @ U)
    assert a.phi_max == pytest.approx(b.phi_max, abs=1e-8)
    assert a.phi_min == pytest.approx(b.phi_min, abs=1e-8)


@given(seeds)
def test_congruence_bounds_match_phases(seed):
    rng = np.random.default_rng(seed)
    C, _ = random_sectorial(rng, 4)
    P = random_congruence(rng, 4)
    D = P.conj().T @ C @ P
    info = classify_sector(D)
    ph = phases(D, info=info).phases
    assert info.sectorial
    assert info.phi_max == pytest.approx(ph[0], abs=1e-7)
    assert info.phi_min == pytest.approx(ph[-1], abs=1e-7)
    assert 0 <= info.field_angle < pi
    assert info.phi_min <= info.gamma_star <= info.phi_max


@given(seeds)
def test_accretive_excludes_origin(seed):
    rng = np.random.default_rng(seed)
    C, _ = random_sectorial(rng, 3)
    assert accretivity(C) > 0
    assert not contains_point(C, 0.0)


def test_subadditivity_of_numerical_range(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    for z in boundary_trace(A + B, 24).points:
        # every point of W(A+B) is x*Ax + x*Bx, a sum of points of W(A) and W(B);
        # along every direction the support of W(A+B) is at most the sum of supports
        for g in np.linspace(0, 2 * pi, 13):
            sa = -support_value(-A, g)[0]
            sb = -support_value(-B, g)[0]
            assert np.real(np.exp(-1j * g) * z) <= sa + sb + 1e-9


def test_supporting_rays():
    info = classify_sector(np.diag([1, 1j]))
    rays = supporting_rays(info, 2.0)
    assert np.allclose(rays, [[0, 2], [2, 0]], atol=1e-9)
    assert supporting_rays(classify_sector(np.diag([1, -1])), 1.0) == []
