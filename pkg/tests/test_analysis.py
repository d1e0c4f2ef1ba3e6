from math import pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasekit.analysis import (
    ConeSpec,
    adversarial_B,
    compress,
    cone_membership,
    extremal_phase_sums,
    hadamard_diagonal,
    hadamard_phase_bounds,
    kronecker_phases,
    mixed_margin_check,
    product_eigen_angles,
    product_phase_check,
    rank_margin,
    rank_status,
    rotated_psd_margin,
    sample_ball,
    sample_sum_cone,
    schmidt_mirsky_B,
    schur_complement,
)
from phasekit.errors import (
    BranchAmbiguityError,
    InfeasibleAlphaError,
    NotSectorialError,
    PhasesOutOfRangeError,
    RankDeficientError,
    SpreadTooWideError,
)
from phasekit.generators import (
    random_congruence,
    random_pd,
    random_sectorial,
    sectorial_from_phases,
)
from phasekit.linalg import singular_values
from phasekit.majorization import is_majorized
from phasekit.phases import eigenphases, phases
from phasekit.verify import HADAMARD_EXAMPLE

seeds = st.integers(0, 2**32 - 1)


def cgauss(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def diag_phased(angles, mags=None):
    angles = np.asarray(angles, dtype=float)
    mags = np.ones_like(angles) if mags is None else np.asarray(mags)
    return np.diag(mags * np.exp(1j * angles))


# compressions and Schur complements ---------------------------------------


def test_compress_identity_and_coordinate_selection():
    C = diag_phased([0.9, 0.4, -0.1, -0.5], [1, 2, 3, 4])
    res = compress(C, np.eye(4))
    assert np.allclose(res.phases, res.parent_phases) and res.holds
    X = np.eye(4)[:, [0, 2]]
    res = compress(C, X)
    assert np.allclose(res.phases, [0.9, -0.1], atol=1e-12) and res.holds


def test_compress_errors():
    C = diag_phased([0.3, -0.3])
    with pytest.raises(RankDeficientError):
        compress(C, np.array([[1.0, 2.0], [1.0, 2.0]]))
    with pytest.raises(NotSectorialError):
        compress(np.diag([1.0, -1.0]), np.eye(2))


@given(seeds, st.integers(2, 6))
def test_compression_interlacing(seed, n):
    rng = np.random.default_rng(seed)
    C, _ = random_sectorial(rng, n)
    k = int(rng.integers(0, n))
    res = compress(C, cgauss(rng, n, n - k))
    assert res.holds, res.slack


def test_schur_block_diagonal_and_pd(rng):
    C1, _ = random_sectorial(rng, 2)
    C2, _ = random_sectorial(rng, 3, -0.3, 0.3)
    C = np.zeros((5, 5), dtype=complex)
    C[:2, :2], C[2:, 2:] = C1, C2
    res = schur_complement(C, 2)
    assert np.allclose(res.matrix, C2)
    P = random_pd(rng, 5)
    res = schur_complement(P, 2)
    assert np.allclose(res.phases, 0, atol=1e-10) and res.holds


@given(seeds, st.integers(2, 6))
def test_schur_interlacing(seed, n):
    rng = np.random.default_rng(seed)
    C, _ = random_sectorial(rng, n)
    res = schur_complement(C, int(rng.integers(1, n)))
    assert res.holds, res.slack


def test_extremal_sums_simple_cases(rng):
    C = diag_phased([0.7, 0.2, -0.4])
    ex = extremal_phase_sums(C, 1)
    assert ex.max_sum == pytest.approx(0.7) and ex.min_sum == pytest.approx(-0.4)
    x = ex.X_max[:, 0]
    assert np.allclose(np.abs(x) / np.abs(x).max(), [1, 0, 0], atol=1e-12)
    C, ph = random_sectorial(rng, 4)
    ex = extremal_phase_sums(C, 4)
    assert ex.max_sum == pytest.approx(ph.sum()) and ex.min_sum == pytest.approx(ph.sum())


@given(seeds)
def test_extremal_sums_bound_random_compressions(seed):
    rng = np.random.default_rng(seed)
    C, ph = random_sectorial(rng, 5)
    k = int(rng.integers(1, 5))
    ex = extremal_phase_sums(C, k)
    for X, target in ((ex.X_max, ex.max_sum), (ex.X_min, ex.min_sum)):
        got = phases(X.conj().T @ C @ X, theta=ex.theta).phases.sum()
        assert got == pytest.approx(target, abs=1e-9)
    for _ in range(20):
        X = cgauss(rng, 5, k)
        s = phases(X.conj().T @ C @ X, theta=ex.theta).phases.sum()
        assert ex.min_sum - 1e-8 <= s <= ex.max_sum + 1e-8


# products ------------------------------------------------------------------


def test_product_identity_and_commuting_diagonal():
    res = product_phase_check(np.eye(3), np.eye(3))
    assert np.allclose(res.eigen_angles, 0) and np.allclose(res.phase_sum, 0)
    A = diag_phased([0.5, 0.1, -0.3], [1, 2, 3])
    B = diag_phased([0.2, 0.3, -0.1])
    res = product_phase_check(A, B)
    assert np.allclose(np.sort(res.eigen_angles), np.sort([0.7, 0.4, -0.4]))
    assert res.report.holds


def test_pd_product_has_zero_angles(rng):
    A, B = random_pd(rng, 4), random_pd(rng, 4)
    res = product_phase_check(A, B)
    assert np.allclose(res.eigen_angles, 0, atol=1e-10) and res.report.holds


@given(seeds, st.integers(1, 6))
def test_product_majorization(seed, n):
    rng = np.random.default_rng(seed)
    A, _ = random_sectorial(rng, n)
    B, _ = random_sectorial(rng, n)
    try:
        res = product_phase_check(A, B)
    except BranchAmbiguityError:
        return
    assert res.report.holds, res.report


def test_product_branch_interval():
    A = diag_phased([2.5, 2.0])
    B = diag_phased([2.4, 2.2])
    pa, pb = phases(A), phases(B)
    ang = product_eigen_angles(A, B, pa.theta, pb.theta)
    lo = pa.theta + pb.theta
    assert np.all(ang > lo) and np.all(ang < lo + 2 * pi)
    assert np.allclose(np.sort(ang), np.sort([4.9, 4.2]))


def test_product_branch_cut_raises():
    A = diag_phased([0.0, 0.5])
    with pytest.raises(BranchAmbiguityError):
        product_eigen_angles(A, np.eye(2), -pi / 2, pi / 2 - 1e-13 + 0.0)


# cones ---------------------------------------------------------------------


def test_cone_membership_examples(rng):
    P = random_pd(rng, 4)
    assert cone_membership(P, ConeSpec.interval(0.0, 0.0))
    for k in (1, 2, 3):
        assert cone_membership(np.eye(3), ConeSpec.sum_cone(k, 0.0))
    assert not cone_membership(np.diag([1.0, -1.0]), ConeSpec.interval(-1.0, 1.0))
    C = diag_phased([0.5, -0.2])
    assert cone_membership(C, ConeSpec.interval(-0.3, 0.6))
    assert not cone_membership(C, ConeSpec.interval(-0.1, 0.6))
    assert cone_membership(C, ConeSpec.sum_cone(1, 0.5))
    assert not cone_membership(C, ConeSpec.sum_cone(1, 0.4))
    assert cone_membership(2 * np.eye(2), ConeSpec.ball(2.0))
    assert not cone_membership(2 * np.eye(2), ConeSpec.ball(1.9))


def test_cone_membership_shifted_window():
    C = diag_phased([3.0, 2.5])
    assert cone_membership(C, ConeSpec.interval(-4.0, -3.0))
    assert cone_membership(C, ConeSpec.interval(2.4, 3.1))


def test_singular_pd_boundary_uses_rotated_test():
    # PSD but singular: not sectorial, yet in the closed cone C[0,0]
    P = np.diag([1.0, 0.0])
    m = cone_membership(P, ConeSpec.interval(0.0, 0.0))
    assert m.member and m.method == "rotated-psd"
    assert rotated_psd_margin(P, -0.2, 0.3) >= -1e-12


@given(seeds)
def test_sum_cone_closure(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-pi, pi)
    b = a + rng.uniform(0.05, pi - 0.05)
    A = sectorial_from_phases(rng, rng.uniform(a, b, 4))
    B = sectorial_from_phases(rng, rng.uniform(a, b, 4))
    spec = ConeSpec.interval(a, b)
    assert cone_membership(A, spec) and cone_membership(B, spec)
    assert cone_membership(A + B, spec)


@given(seeds, st.integers(1, 3))
def test_sampled_sum_cone_members(seed, k):
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0.0, k * pi)
    B, ph = sample_sum_cone(rng, 5, k, alpha)
    assert cone_membership(B, ConeSpec.sum_cone(k, alpha))
    assert np.allclose(phases(B).phases, ph, atol=1e-7)


def test_sample_ball(rng):
    for _ in range(20):
        assert singular_values(sample_ball(rng, 4, 0.7))[0] <= 0.7 + 1e-12


# rank robustness -------------------------------------------------------------


def test_rank_margin_examples():
    m = rank_margin(np.eye(3), 1)
    assert m.phase_margin_alpha == pytest.approx(pi)
    assert m.magnitude_margin_gamma == pytest.approx(1.0)
    m = rank_margin(diag_phased([pi / 3, -pi / 4]), 1)
    assert m.phase_margin_alpha == pytest.approx(2 * pi / 3)
    assert m.binding_side == "upper"


def test_rank_margin_phases_out_of_range():
    A = diag_phased([3.0, 2.0]) @ np.diag([1, 1]) * np.exp(0.5j)
    with pytest.raises(PhasesOutOfRangeError):
        rank_margin(A, 1)


def test_rank_margin_formula(rng):
    A, ph = random_sectorial(rng, 5)
    s = np.linalg.svd(A, compute_uv=False)
    for k in (1, 2, 3):
        m = rank_margin(A, k)
        expect = min(k * pi - ph[:k].sum(), k * pi + ph[-k:].sum())
        assert m.phase_margin_alpha == pytest.approx(expect)
        assert m.magnitude_margin_gamma == pytest.approx(1 / s[k - 1])


def test_adversary_identity_and_scalar():
    # α = kπ lies outside [0, kπ), so only the non-strict construction applies
    with pytest.raises(InfeasibleAlphaError):
        adversarial_B(np.eye(3), 1)
    B, alpha = adversarial_B(np.eye(3), 1, strict=False)
    assert np.allclose(B, np.diag([-1, 1, 1]), atol=1e-12)
    assert alpha == pytest.approx(pi)
    assert rank_status(np.eye(3) + B).rank == 2
    phi = 0.4
    A = np.exp(1j * phi) * np.eye(3)
    B, _ = adversarial_B(A, 3)
    assert np.allclose(np.eye(3) + A @ B, 0, atol=1e-12)


def test_adversary_infeasible():
    # φ₁ = −0.5 ⇒ π − φ₁ > π = kπ for k = 1
    with pytest.raises(InfeasibleAlphaError):
        adversarial_B(diag_phased([-0.5, -0.9]), 1, side="upper")


@given(seeds, st.integers(1, 2), st.sampled_from(["upper", "lower", None]))
def test_adversary_drops_rank_exactly(seed, k, side):
    rng = np.random.default_rng(seed)
    A, _ = random_sectorial(rng, 5)
    try:
        B, alpha = adversarial_B(A, k, side=side)
    except InfeasibleAlphaError:
        assert side is not None
        return
    st_ = rank_status(np.eye(5) + A @ B)
    assert st_.rank == 5 - k
    s = st_.singular_values
    assert s[5 - k - 1] > 100 * s[5 - k]
    assert cone_membership(B, ConeSpec.sum_cone(k, alpha), tol=1e-7)


@given(seeds)
def test_margin_backoff_keeps_rank(seed):
    rng = np.random.default_rng(seed)
    A, _ = random_sectorial(rng, 5)
    for k in (1, 2):
        alpha = rank_margin(A, k).phase_margin_alpha - 0.05
        if alpha < 0:
            continue
        for _ in range(10):
            B, _ = sample_sum_cone(rng, 5, k, alpha)
            assert rank_status(np.eye(5) + A @ B).dropped < k


@given(seeds, st.integers(1, 3))
def test_schmidt_mirsky_drop(seed, k):
    rng = np.random.default_rng(seed)
    A = cgauss(rng, 5)
    B = schmidt_mirsky_B(A, k)
    s = singular_values(A)
    assert singular_values(B)[0] == pytest.approx(1 / s[k - 1])
    assert rank_status(np.eye(5) + A @ B).rank == 5 - k


def test_mixed_margin_identity():
    assert mixed_margin_check(np.eye(3), 0.9, 3.0, trials=50, seed=0).verdict
    assert not mixed_margin_check(np.eye(3), 1.0, 3.0, trials=50, seed=0).verdict
    rep = mixed_margin_check(np.eye(3), 0.5, pi, trials=50, seed=0)
    assert not rep.verdict and rep.construction == "phase-adversary"


def test_mixed_margin_schmidt_mirsky_counterexample(rng):
    A, _ = random_sectorial(rng, 4)
    gamma = 1 / singular_values(A)[0]
    rep = mixed_margin_check(A, gamma, 0.1, seed=0)
    assert not rep.verdict and rep.construction == "schmidt-mirsky"
    U, s, Vh = np.linalg.svd(A)
    expect = -np.outer(Vh[0].conj(), U[:, 0].conj()) / s[0]
    assert np.allclose(rep.counterexample, expect, atol=1e-10)
    assert rank_status(np.eye(4) + A @ rep.counterexample).dropped == 1


@given(seeds)
def test_mixed_margin_backoff_has_no_violations(seed):
    rng = np.random.default_rng(seed)
    A, _ = random_sectorial(rng, 4)
    rep0 = mixed_margin_check(A, 0.0, 0.0, trials=0)
    rep = mixed_margin_check(A, rep0.gamma_limit - 0.05 * rep0.gamma_limit,
                             max(rep0.alpha_limit - 0.05, 0.0), trials=40, seed=seed)
    assert rep.verdict and rep.violations == 0


def test_rank_status_thresholds():
    st_ = rank_status(np.diag([1.0, 1e-7, 1e-12]))
    assert st_.dropped == 1 and st_.indeterminate == 1 and st_.rank is None
    assert rank_status(np.eye(3)).rank == 3


# Kronecker and Hadamard ---------------------------------------------------------


def test_kronecker_examples():
    assert np.allclose(kronecker_phases(np.eye(2), np.eye(3)).phases.phases, 0)
    A = diag_phased([pi / 6, -pi / 6])
    kp = kronecker_phases(A, np.array([[np.exp(1j * pi / 8)]]))
    assert np.allclose(kp.phases.phases, [pi / 6 + pi / 8, -pi / 6 + pi / 8])


@given(seeds)
def test_kronecker_formula(seed):
    rng = np.random.default_rng(seed)
    A, pa = random_sectorial(rng, 3, -0.7, 0.7)
    B, pb = random_sectorial(rng, 3, -0.7, 0.7)
    if pa[0] + pb[0] - pa[-1] - pb[-1] >= pi:
        with pytest.raises(SpreadTooWideError):
            kronecker_phases(A, B)
        return
    kp = kronecker_phases(A, B)
    expect = np.sort(np.add.outer(pa, pb).ravel())[::-1]
    assert np.allclose(kp.phases.phases, expect, atol=1e-7)
    assert kp.max_error <= 1e-7


def test_kronecker_spread_too_wide():
    A = diag_phased([1.0, -1.0])
    with pytest.raises(SpreadTooWideError):
        kronecker_phases(A, A)


def test_hadamard_example_values():
    hb = hadamard_phase_bounds(HADAMARD_EXAMPLE, np.eye(4))
    assert np.allclose(hb.phases, [1.3258, 1.249, 0, -0.588], atol=5e-4)
    assert np.allclose(hb.phase_sum, [1.5303, 0.7684, 0.3561, -0.7926], atol=5e-4)
    assert hb.holds
    assert not is_majorized(hb.phases, hb.phase_sum).holds


def test_hadamard_pd_pair(rng):
    hb = hadamard_phase_bounds(random_pd(rng, 4), random_pd(rng, 4))
    assert np.allclose(hb.phases, 0, atol=1e-10) and hb.holds


@given(seeds)
def test_hadamard_endpoint_bounds(seed):
    rng = np.random.default_rng(seed)
    A, pa = random_sectorial(rng, 4, -0.7, 0.7)
    B, pb = random_sectorial(rng, 4, -0.7, 0.7)
    if pa[0] + pb[0] - pa[-1] - pb[-1] >= pi:
        return
    hb = hadamard_phase_bounds(A, B)
    assert hb.holds, hb.slack
    assert hb.phases[0] <= pa[0] + pb[0] + 1e-7
    assert hb.phases[-1] >= pa[-1] + pb[-1] - 1e-7


def test_hadamard_diagonal_matches_elementwise(rng):
    A = cgauss(rng, 3)
    assert np.allclose(hadamard_diagonal(A), A * np.eye(3))


# negative controls ----------------------------------------------------------------


def test_control_phase_product_not_majorized_for_pd_pair():
    # two PD matrices have zero phases, yet AB is not PD in general
    found = False
    rng = np.random.default_rng(0)
    for _ in range(200):
        A = np.eye(3) + 0.3 * random_pd(rng, 3, 0.0) / 3
        B = np.eye(3) + 0.3 * random_pd(rng, 3, 0.0) / 3
        ph = phases(A @ B).phases
        if not is_majorized(ph, np.zeros(3), tol=1e-9).holds:
            found = True
            break
    assert found


def test_control_entrywise_eigenangle_bound_fails_with_identity():
    rng = np.random.default_rng(1)
    found = False
    for _ in range(200):
        A, _ = random_sectorial(rng, 4)
        pv = phases(A)
        ang = eigenphases(A, theta=pv.theta)
        if np.any(ang > pv.phases + 1e-9):
            found = True
            break
    assert found


def test_control_congruence_does_not_fix_eigenangles(rng):
    # phases are congruence-invariant, eigenvalue angles are not
    C = diag_phased([0.8, 0.1, -0.6])
    P = random_congruence(rng, 3)
    D = P.conj().T @ C @ P
    assert np.allclose(phases(D).phases, [0.8, 0.1, -0.6], atol=1e-9)
    assert not np.allclose(eigenphases(D), [0.8, 0.1, -0.6], atol=1e-3)
