"""Acceptance criteria, one test per criterion at its stated tolerance.

The terminal summary prints one ``criterion N [PASS|FAIL]`` line per test.
"""

import json
import time
from math import pi

import numpy as np
import pytest

from phasekit.analysis import (
    ConeSpec,
    adversarial_B,
    cone_membership,
    hadamard_phase_bounds,
    rank_margin,
    rank_status,
    sample_sum_cone,
    schmidt_mirsky_B,
)
from phasekit.cli import main
from phasekit.completion import BandedPartial, complete, decompose_banded
from phasekit.compound import compound, verify_inclusions
from phasekit.errors import NotSectorialError
from phasekit.generators import (
    random_pd,
    random_real_sectorial,
    random_sectorial,
    sectorial_from_phases,
)
from phasekit.linalg import singular_values
from phasekit.majorization import is_majorized
from phasekit.phases import (
    commuting_unitary,
    gcf,
    phases,
    psi_phases,
    real_sectorial,
    sectorial_decomposition,
    spd,
)
from phasekit.verify import HADAMARD_EXAMPLE, run_suite

SEED = 20240607


def rot(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def test_criterion_1_diagonal_phase_examples():
    phases(np.eye(2))  # load compiled kernels before timing
    t0 = time.perf_counter()
    a = phases(np.diag([1, np.exp(1j * pi / 4), np.exp(-1j * pi / 4)])).phases
    b = phases(np.diag([-1, np.exp(3j * pi / 4), np.exp(-3j * pi / 4)])).phases
    with pytest.raises(NotSectorialError):
        phases(np.diag([1, np.exp(2j * pi / 3), np.exp(-2j * pi / 3)]))
    elapsed = time.perf_counter() - t0
    assert np.abs(a - [pi / 4, 0, -pi / 4]).max() <= 1e-10
    assert np.abs(b - [5 * pi / 4, pi, 3 * pi / 4]).max() <= 1e-10
    assert elapsed < 1.0


def test_criterion_2_rotation_psi_examples():
    for t in (pi / 6, pi / 4, pi / 3):
        assert np.abs(psi_phases(rot(t)) - [t, -t]).max() <= 1e-10
    a, t = pi / 12, pi / 4
    S = np.diag([np.cos(a), np.sin(a)])
    expected = np.arccos(np.cos(t) / np.sqrt(1 - np.sin(t) ** 2 * np.cos(2 * a) ** 2))
    assert np.abs(psi_phases(S @ rot(t) @ S) - [expected, -expected]).max() <= 1e-9
    # the determinant claim concerns diag(cos²α, sin²α)·Rot(θ)
    C = np.diag([np.cos(a) ** 2, np.sin(a) ** 2]) @ rot(t)
    assert np.abs(psi_phases(C) - [t, -t]).max() <= 1e-10
    H = 0.5 * (C + C.T)
    assert np.linalg.det(H) < 0
    assert np.linalg.eigvalsh(H).min() < 0


def test_criterion_3_hadamard_example():
    hb = hadamard_phase_bounds(HADAMARD_EXAMPLE, np.eye(4))
    assert np.abs(hb.phases - [1.3258, 1.249, 0, -0.588]).max() <= 5e-4
    assert np.abs(hb.phase_sum - [1.5303, 0.7684, 0.3561, -0.7926]).max() <= 5e-4
    assert not is_majorized(hb.phases, hb.phase_sum).holds


def test_criterion_4_factorization_suite():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst_rec = worst_uniq = 0.0
    for trial in range(500):
        n = int(rng.integers(2, 9))
        C, _ = random_sectorial(rng, n)
        nrm = np.linalg.norm(C)
        d = sectorial_decomposition(C)
        s = spd(C, d)
        g = gcf(C, d)
        worst_rec = max(worst_rec,
                        np.linalg.norm(C - d.T.conj().T @ d.D @ d.T) / nrm,
                        np.linalg.norm(C - s.P @ s.U @ s.P) / nrm,
                        np.linalg.norm(C - g.R.conj().T @ g.W @ g.R) / nrm)
        Xi = commuting_unitary(d.phases, rng)
        d2 = type(d)(Xi @ d.T, d.D, d.phases, d.gamma_star)
        s2 = spd(C, d2)
        g2 = gcf(C, d2)
        worst_uniq = max(worst_uniq, np.abs(s.P - s2.P).max(), np.abs(s.U - s2.U).max(),
                         np.abs(g.R - g2.R).max(), np.abs(g.W - g2.W).max())
        if trial % 5 == 0:
            Cr = random_real_sectorial(rng, n)
            r = real_sectorial(Cr)
            for M in (r.T, r.D, r.P, r.U, r.R, r.W):
                assert np.isrealobj(M)
            nr = np.linalg.norm(Cr)
            worst_rec = max(worst_rec,
                            np.linalg.norm(Cr - r.T.T @ r.D @ r.T) / nr,
                            np.linalg.norm(Cr - r.P @ r.U @ r.P) / nr,
                            np.linalg.norm(Cr - r.R.T @ r.W @ r.R) / nr)
    elapsed = time.perf_counter() - t0
    print(f"reconstruction {worst_rec:.3g}, uniqueness {worst_uniq:.3g}, {elapsed:.1f} s")
    assert worst_rec <= 1e-9
    assert worst_uniq <= 1e-8
    assert elapsed < 30.0


def test_criterion_5_property_suites(tmp_path, capsys):
    out = tmp_path / "verify.json"
    t0 = time.perf_counter()
    code = main(["verify", "--suite", "all", "--trials", "500", "--seed", "7",
                 "--tol", "1e-7", "--out", str(out),
                 "--reproducer", str(tmp_path / "repro.json")])
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    rep = json.loads(out.read_text())["outputs"]
    for p in rep["properties"]:
        print(f"{p['name']}: {p['passes']}/{p['trials']} (skipped {p['skipped']})")
    assert code == 0
    assert rep["violations"] == 0
    assert all(p["trials"] > 0 for p in rep["properties"])
    assert elapsed < 120.0


def test_criterion_6_compound_inclusions():
    rng = np.random.default_rng(SEED + 6)
    worst_bc = 0.0
    failures = []
    for trial in range(200):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        B, _ = random_sectorial(rng, 4)
        for k in (1, 2, 3):
            rep = verify_inclusions(A, B, k, trials=4, seed=trial,
                                    tol=1e-7, membership_tol=1e-6)
            if not rep.passed:
                failures.append((trial, k, rep))
            lhs = compound(A @ B, k).matrix
            rhs = compound(A, k).matrix @ compound(B, k).matrix
            worst_bc = max(worst_bc, np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
    assert not failures, failures[:3]
    assert worst_bc <= 1e-9


def test_criterion_7_rank_robustness():
    rng = np.random.default_rng(SEED + 7)
    n = 5
    I = np.eye(n)
    t0 = time.perf_counter()
    drops = 0
    samples = 0
    As = [random_sectorial(rng, n)[0] for _ in range(100)]
    for A in As:
        for k in (1, 2):
            B, alpha = adversarial_B(A, k)
            st = rank_status(I + A @ B)
            s = st.singular_values
            assert st.rank == n - k
            assert s[n - k - 1] >= 100 * s[n - k]
            assert cone_membership(B, ConeSpec.sum_cone(k, alpha))
            B = schmidt_mirsky_B(A, k)
            assert singular_values(B)[0] == pytest.approx(1 / singular_values(A)[k - 1])
            assert rank_status(I + A @ B).rank == n - k
    for i in range(2000):
        A = As[i % 100]
        k = 1 + (i // 100) % 2
        alpha = rank_margin(A, k).phase_margin_alpha - 0.05
        if alpha < 0:
            continue
        B, _ = sample_sum_cone(rng, n, k, alpha)
        samples += 1
        drops += rank_status(I + A @ B).singular_values[n - k] <= 1e-8
    elapsed = time.perf_counter() - t0
    assert samples >= 1900
    assert drops == 0
    assert elapsed < 60.0


def _banded(rng, sizes, p, alpha, beta):
    off = np.concatenate([[0], np.cumsum(sizes)])
    C = np.zeros((off[-1], off[-1]), dtype=complex)
    for l in range(len(sizes) - p):
        a, b = off[l], off[l + p + 1]
        C[a:b, a:b] += sectorial_from_phases(rng, rng.uniform(alpha, beta, b - a))
    return C


def test_criterion_8_completion_and_decomposition():
    rng = np.random.default_rng(SEED + 8)
    cone = ConeSpec.interval(-0.3, 0.9)
    for _ in range(200):
        sizes = tuple(int(s) for s in rng.integers(1, 3, 3))
        C0 = sectorial_from_phases(rng, rng.uniform(-0.3, 0.9, sum(sizes)))
        C = complete(BandedPartial.from_matrix(C0, sizes, 1, -0.3, 0.9))
        assert cone_membership(C, cone, tol=1e-7)
    cone = ConeSpec.interval(-0.4, 0.6)
    for _ in range(200):
        sizes = tuple(int(s) for s in rng.integers(1, 3, 3))
        C = _banded(rng, sizes, 1, -0.4, 0.6)
        dec = decompose_banded(C, sizes, 1, -0.4, 0.6)
        assert np.linalg.norm(dec.total() - C) <= 1e-9 * np.linalg.norm(C)
        for part in dec.parts:
            assert cone_membership(part.core, cone, tol=1e-7)
    # PD cone: classical PSD completion and splitting
    for _ in range(20):
        P = random_pd(rng, 6)
        C = complete(BandedPartial.from_matrix(P, (2, 2, 2), 1, 0.0, 0.0))
        assert np.allclose(C, C.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(C).min() >= -1e-10 * np.abs(C).max()
        B = _banded(rng, (2, 2, 2), 1, 0.0, 0.0)
        dec = decompose_banded(B, (2, 2, 2), 1, 0.0, 0.0)
        for part in dec.parts:
            assert np.linalg.eigvalsh(0.5 * (part.core + part.core.conj().T)).min() >= -1e-10
    # band induction on five blocks
    for _ in range(40):
        sizes = tuple(int(s) for s in rng.integers(1, 3, 5))
        C0 = sectorial_from_phases(rng, rng.uniform(-0.3, 0.9, sum(sizes)))
        C = complete(BandedPartial.from_matrix(C0, sizes, 1, -0.3, 0.9))
        assert cone_membership(C, ConeSpec.interval(-0.3, 0.9), tol=1e-7)
        C = _banded(rng, sizes, 1, -0.4, 0.6)
        dec = decompose_banded(C, sizes, 1, -0.4, 0.6)
        assert len(dec.parts) == 4
        assert np.linalg.norm(dec.total() - C) <= 1e-9 * np.linalg.norm(C)
        for part in dec.parts:
            assert cone_membership(part.core, ConeSpec.interval(-0.4, 0.6), tol=1e-7)


def test_criterion_9_negative_controls():
    prod = run_suite("product", trials=1, seed=SEED)
    inter = run_suite("interlacing", trials=1, seed=SEED)
    kh = run_suite("kron-hadamard", trials=1, seed=SEED)
    controls = {c.name: c for r in (prod, inter, kh) for c in r.controls}
    assert controls["product-phase-majorization-pd-pair"].exhibited
    assert controls["product-eigenangle-entrywise-bound"].exhibited
    assert controls["eigenphase-entrywise-bound"].exhibited
    assert controls["hadamard-majorization"].exhibited
    hb = hadamard_phase_bounds(HADAMARD_EXAMPLE, np.eye(4))
    assert not is_majorized(hb.phases, hb.phase_sum).holds
