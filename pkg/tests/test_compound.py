from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasekit.compound import (
    compound,
    compound_spectrum,
    sample_compound_range,
    verify_inclusions,
)
from phasekit.errors import BadOrderError, NotSectorialError
from phasekit.generators import random_sectorial, random_unitary
from phasekit.phases import phases

seeds = st.integers(0, 2**32 - 1)


def cgauss(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def matched(a, b):
    """Largest distance after greedy nearest matching of two multisets."""
    b = list(b)
    worst = 0.0
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(j)))
    return worst


def test_first_compound_is_identity_map(rng):
    A = cgauss(rng, 3, 4)
    assert np.allclose(compound(A, 1).matrix, A)


def test_diagonal_compound():
    a, b, c = 2.0, -3.0, 1j
    Ak = compound(np.diag([a, b, c]), 2)
    assert np.allclose(Ak.matrix, np.diag([a * b, a * c, b * c]))
    assert Ak.row_index == ((0, 1), (0, 2), (1, 2))


def test_top_compound_is_determinant(rng):
    A = cgauss(rng, 5)
    assert compound(A, 5).matrix[0, 0] == pytest.approx(np.linalg.det(A))


def test_entries_are_minors(rng):
    A = cgauss(rng, 4, 5)
    Ak = compound(A, 2)
    assert Ak.matrix.shape == (6, 10)
    for i, r in enumerate(combinations(range(4), 2)):
        for j, c in enumerate(combinations(range(5), 2)):
            assert Ak.matrix[i, j] == pytest.approx(np.linalg.det(A[np.ix_(r, c)]))


def test_bad_order():
    with pytest.raises(BadOrderError):
        compound(np.eye(3), 0)
    with pytest.raises(BadOrderError):
        compound(np.eye(3), 4)
    with pytest.raises(BadOrderError):
        compound_spectrum(np.eye(3), 4)


@given(seeds, st.integers(1, 4))
def test_binet_cauchy(seed, k):
    rng = np.random.default_rng(seed)
    A, B = cgauss(rng, 4), cgauss(rng, 4)
    lhs = compound(A @ B, k).matrix
    rhs = compound(A, k).matrix @ compound(B, k).matrix
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * np.linalg.norm(rhs)


@given(seeds, st.integers(1, 3))
def test_unitary_and_hermitian_compounds(seed, k):
    rng = np.random.default_rng(seed)
    Uk = compound(random_unitary(rng, 4), k).matrix
    assert np.allclose(Uk.conj().T @ Uk, np.eye(Uk.shape[0]), atol=1e-10)
    G = cgauss(rng, 4)
    Hk = compound(G + G.conj().T, k).matrix
    assert np.allclose(Hk, Hk.conj().T, atol=1e-10)


def test_compound_spectrum_examples(rng):
    assert np.allclose(np.sort(compound_spectrum(np.diag([1.0, 2.0, 3.0]), 2).real), [2, 3, 6])
    A = cgauss(rng, 4)
    assert compound_spectrum(A, 4)[0] == pytest.approx(np.linalg.det(A))


def test_compound_spectrum_matches_compound_eigenvalues(rng):
    A = cgauss(rng, 5)
    spec = compound_spectrum(A, 2)
    ref = np.linalg.eigvals(compound(A, 2).matrix)
    assert spec.size == 10
    assert matched(spec, ref) < 1e-7 * np.abs(ref).max()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_identity_compound_range_is_one(k):
    cloud = sample_compound_range(np.eye(4), k, 50, seed=1)
    assert np.allclose(cloud.points, 1.0, atol=1e-12)


def test_pd_compound_range_is_positive(rng):
    G = cgauss(rng, 4)
    P = G @ G.conj().T + 0.1 * np.eye(4)
    for kind in ("isometric", "full-rank"):
        pts = sample_compound_range(P, 2, 100, seed=3, kind=kind).points
        assert np.all(pts.real > 0) and np.allclose(pts.imag, 0, atol=1e-10 * np.abs(pts).max())


@given(seeds, st.sampled_from(["isometric", "full-rank"]))
def test_cloud_recomputes_from_witnesses(seed, kind):
    rng = np.random.default_rng(seed)
    A = cgauss(rng, 4)
    cloud = sample_compound_range(A, 2, 10, seed=seed % 1000, kind=kind)
    for p, X in zip(cloud.points, cloud.witnesses):
        assert p == pytest.approx(np.linalg.det(X.conj().T @ A @ X), rel=1e-10)
        if kind == "isometric":
            assert np.allclose(X.conj().T @ X, np.eye(2), atol=1e-12)
            assert np.linalg.norm(compound(X, 2).matrix) == pytest.approx(1.0)


def test_cloud_is_reproducible(rng):
    A = cgauss(rng, 4)
    a = sample_compound_range(A, 2, 20, seed=9)
    b = sample_compound_range(A, 2, 20, seed=9)
    assert np.array_equal(a.points, b.points)
    with pytest.raises(ValueError):
        sample_compound_range(A, 2, 0)
    with pytest.raises(ValueError):
        sample_compound_range(A, 2, 5, kind="other")


@given(seeds, st.integers(1, 3))
def test_sectorial_compound_range_avoids_zero(seed, k):
    # det(X*AX) has angle equal to a sum of k compression phases, each within
    # [φ_n, φ₁], so it stays in a sector of half-width k·(φ₁ − φ_n)/2
    rng = np.random.default_rng(seed)
    A, _ = random_sectorial(rng, 4, -0.35, 0.35)
    ph = phases(A).phases
    mid, half = (ph[0] + ph[-1]) / 2, (ph[0] - ph[-1]) / 2
    pts = sample_compound_range(A, k, 100, seed=5).points
    assert np.all(np.abs(pts) > 0)
    ang = np.angle(pts * np.exp(-1j * k * mid))
    assert np.abs(ang).max() <= k * half + 1e-9


def test_inclusions_trivial_pairs():
    assert verify_inclusions(np.eye(3), np.eye(3), 2, trials=3).passed
    A = np.diag([2.0, 1j, -1.0 + 0.5j])
    B = np.diag(np.exp(1j * np.array([0.3, -0.2, 0.1])))
    rep = verify_inclusions(A, B, 2, trials=3)
    assert rep.passed and rep.prod_inv < 1e-12 and rep.prod_range < 1e-12


@given(seeds, st.integers(1, 3))
def test_inclusions_random_sectorial_pairs(seed, k):
    rng = np.random.default_rng(seed)
    A = cgauss(rng, 4)
    B, _ = random_sectorial(rng, 4)
    rep = verify_inclusions(A, B, k, trials=4, seed=seed % 1000)
    assert rep.passed, rep
    assert rep.membership_checked > 0


def test_inclusions_require_sectorial_b():
    with pytest.raises(NotSectorialError):
        verify_inclusions(np.eye(2), np.diag([1.0, -1.0]), 1)


def test_inclusions_perturb_defective_input():
    J = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]], dtype=complex)
    for k in (1, 2, 3):
        rep = verify_inclusions(J, np.eye(3), k, trials=2)
        assert rep.perturbed and rep.passed
