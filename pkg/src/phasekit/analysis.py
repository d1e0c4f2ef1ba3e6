"""Phase inequalities for compressions, Schur complements, products and sums,
phase-bounded cones, rank-robustness margins, and Kronecker/Hadamard phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .errors import (
    BranchAmbiguityError,
    BranchError,
    InfeasibleAlphaError,
    NotSectorialError,
    PhasesOutOfRangeError,
    RankDeficientError,
    SpreadTooWideError,
)
from .generators import as_rng, complex_gaussian, random_congruence
from .linalg import (
    as_matrix,
    general_eig,
    hermitian_eig,
    hermitian_part,
    inv,
    singular_values,
    solve,
    spectral_norm,
    svd,
)
from .majorization import MajorizationReport, is_majorized
from .numrange import classify_sector
from .phases import PhaseVector, phases, sectorial_decomposition

INTERLACE_TOL = 1e-8
DROP_TOL = 1e-8
KEEP_TOL = 1e-6
BRANCH_CUT_TOL = 1e-10


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeSpec:
    """One of ``C[α, β]`` (``interval``), ``C_k[α]`` (``sum``) or ``B[γ]`` (``ball``)."""

    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    k: int = 1
    gamma: float = 0.0

    @classmethod
    def interval(cls, alpha: float, beta: float) -> "ConeSpec":
        if not 0.0 <= beta - alpha < 2 * pi:
            raise ValueError("C[α, β] needs 0 ≤ β − α < 2π")
        return cls("interval", alpha=float(alpha), beta=float(beta))

    @classmethod
    def sum_cone(cls, k: int, alpha: float) -> "ConeSpec":
        if k < 1 or not 0.0 <= alpha < k * pi:
            raise ValueError("C_k[α] needs k ≥ 1 and α ∈ [0, kπ)")
        return cls("sum", alpha=float(alpha), k=int(k))

    @classmethod
    def ball(cls, gamma: float) -> "ConeSpec":
        if not gamma > 0:
            raise ValueError("B[γ] needs γ > 0")
        return cls("ball", gamma=float(gamma))


@dataclass(frozen=True)
class ConeMembership:
    """Membership verdict.

    ``slack`` is the smallest constraint margin (radians for phase cones, a
    scaled eigenvalue for the rotated-PSD certificate). ``strict`` is true when
    the verdict rests on phases of a strictly sectorial matrix, false when it
    came from the semidefinite certificate.
    """

    member: bool
    slack: float
    strict: bool
    method: str

    def __bool__(self) -> bool:
        return self.member


def rotated_hermitian(C, angle: float) -> np.ndarray:
    """``e^{i·angle}C + e^{-i·angle}C*``."""
    R = np.exp(1j * angle) * C
    return R + R.conj().T


def rotated_psd_margin(C, alpha: float, beta: float) -> float:
    """``min λ_min`` of the two rotated Hermitian matrices bounding the sector ``[α, β]``.

    Non-negative exactly when ``W(C)`` lies in the closed sector, the
    semidefinite form of ``C ∈ C[α, β]`` for ``β − α < π``. For ``α = β`` the two
    matrices are negatives of each other, so the margin is ``−‖skew part‖``
    and positivity must be checked separately.
    """
    mb = hermitian_eig(rotated_hermitian(C, pi / 2 - beta), vectors=False).values[-1]
    ma = hermitian_eig(rotated_hermitian(C, -pi / 2 - alpha), vectors=False).values[-1]
    return float(min(mb, ma))


def _best_shift(vals, score):
    best = -np.inf
    for m in (-2, -1, 0, 1, 2):
        best = max(best, score(vals + 2 * pi * m))
    return best


def cone_membership(C, spec: ConeSpec, tol: float = 1e-7) -> ConeMembership:
    """Test ``C`` against a phase cone or magnitude ball.

    For ``C[α, β]`` phases are compared with the bounds in whichever 2π branch
    fits best. Matrices that are not strictly sectorial (``0`` on the boundary
    of ``W(C)``) fall back to the rotated-PSD certificate, which accepts the
    closed cone.
    """
    C = as_matrix(C, square=True)
    if spec.kind == "ball":
        s = spectral_norm(C)
        slack = spec.gamma - s
        return ConeMembership(bool(slack >= -tol), float(slack), True, "singular-value")
    scale = max(spectral_norm(C), 1e-300)
    info = classify_sector(C) if np.any(C) else None
    if info is not None and info.sectorial:
        vals = phases(C, info=info).phases
        if spec.kind == "interval":
            slack = _best_shift(vals, lambda v: min(spec.beta - v[0], v[-1] - spec.alpha))
        else:
            k = spec.k
            slack = _best_shift(vals, lambda v: min(spec.alpha - v[:k].sum(),
                                                    v[-k:].sum() + spec.alpha))
        return ConeMembership(bool(slack >= -tol), float(slack), True, "phases")
    if spec.kind != "interval" or spec.beta - spec.alpha >= pi:
        return ConeMembership(False, float("-inf"), True, "not-sectorial")
    if spec.beta == spec.alpha:
        R = np.exp(-1j * spec.alpha) * C
        skew = np.linalg.norm(R - R.conj().T) / scale
        lmin = hermitian_eig(hermitian_part(R), vectors=False).values[-1] / scale
        slack = float(min(lmin, -skew))
    else:
        slack = rotated_psd_margin(C, spec.alpha, spec.beta) / scale
    return ConeMembership(bool(slack >= -tol), float(slack), False, "rotated-psd")


# ---------------------------------------------------------------------------
# compressions, Schur complements, extremal sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterlacingResult:
    """Phases of a reduced matrix and the interlacing verdict against ``C``."""

    matrix: np.ndarray
    phases: np.ndarray
    parent_phases: np.ndarray
    holds: bool
    slack: float


def _interlace(parent: np.ndarray, child: np.ndarray, tol: float):
    k = parent.size - child.size
    upper = parent[: child.size] - child
    lower = child - parent[k:]
    slack = float(min(upper.min(initial=np.inf), lower.min(initial=np.inf)))
    return slack >= -tol, slack


def compress(C, X, tol: float = INTERLACE_TOL) -> InterlacingResult:
    """Phases of ``X*CX`` for full-column-rank ``X`` and the interlacing check.

    With ``X ∈ ℂ^{n×(n−k)}``: ``φ_j(C) ≥ φ_j(X*CX) ≥ φ_{j+k}(C)``.
    """
    C = as_matrix(C, square=True)
    X = as_matrix(X)
    if X.shape[0] != C.shape[0] or X.shape[1] > C.shape[0] or X.shape[1] < 1:
        raise ValueError("X must be n × m with 1 ≤ m ≤ n")
    sv = singular_values(X)
    if sv[-1] <= 1e-10 * sv[0]:
        raise RankDeficientError("X must have full column rank")
    pc = phases(C)
    Ct = X.conj().T @ C @ X
    pt = phases(Ct, theta=pc.theta)
    holds, slack = _interlace(pc.phases, pt.phases, tol)
    return InterlacingResult(Ct, pt.phases, pc.phases, holds, slack)


def schur_complement(C, k: int, tol: float = INTERLACE_TOL) -> InterlacingResult:
    """``C/₁₁ = C₂₂ − C₂₁C₁₁⁻¹C₁₂`` for the leading ``k × k`` block, with interlacing check."""
    C = as_matrix(C, square=True)
    n = C.shape[0]
    if not 1 <= k < n:
        raise ValueError("block size must satisfy 1 ≤ k < n")
    pc = phases(C)
    S = C[k:, k:] - C[k:, :k] @ solve(C[:k, :k], C[:k, k:])
    ps = phases(S, theta=pc.theta)
    holds, slack = _interlace(pc.phases, ps.phases, tol)
    return InterlacingResult(S, ps.phases, pc.phases, holds, slack)


@dataclass(frozen=True)
class ExtremalSums:
    max_sum: float
    min_sum: float
    X_max: np.ndarray
    X_min: np.ndarray
    theta: float


def extremal_phase_sums(C, k: int) -> ExtremalSums:
    """Largest and smallest ``Σ_{i≤k} φ_i(X*CX)`` over full-rank ``X ∈ ℂ^{n×k}``.

    The extremes are the top and bottom partial sums of ``φ(C)``, attained at
    ``X = T⁻¹[I_k; 0]`` and ``X = T⁻¹[0; I_k]`` for ``C = T*DT``.
    """
    C = as_matrix(C, square=True)
    n = C.shape[0]
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 ≤ k ≤ n")
    dec = sectorial_decomposition(C)
    Tinv = inv(dec.T)
    return ExtremalSums(float(dec.phases[:k].sum()), float(dec.phases[-k:].sum()),
                        Tinv[:, :k], Tinv[:, n - k:], dec.gamma_star - pi / 2)


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductPhaseResult:
    """``∠λ(AB)`` in ``(θ₁ + θ₂, θ₁ + θ₂ + 2π)`` against ``φ(A) + φ(B)``."""

    eigen_angles: np.ndarray
    phase_sum: np.ndarray
    report: MajorizationReport


def product_eigen_angles(A, B, theta_a: float, theta_b: float) -> np.ndarray:
    """Descending ``∠λ(AB)`` branched into ``(θ_a + θ_b, θ_a + θ_b + 2π)``.

    Computed as ``∠λ(ÂB̂) + π + θ_a + θ_b`` with ``Â = e^{i(−π/2−θ_a)}A`` and
    ``B̂`` likewise, taking ``∠`` in ``(−π, π)``.
    """
    Ah = np.exp(1j * (-pi / 2 - theta_a)) * A
    Bh = np.exp(1j * (-pi / 2 - theta_b)) * B
    lam = general_eig(Ah @ Bh).values
    ang = np.angle(lam)
    if np.any(np.abs(lam) == 0) or np.any(pi - np.abs(ang) <= BRANCH_CUT_TOL):
        raise BranchAmbiguityError("an eigenvalue of AB lies on the branch cut")
    return np.sort(ang + pi + theta_a + theta_b)[::-1]


def product_phase_check(A, B, tol: float = 1e-7) -> ProductPhaseResult:
    """Check ``∠λ(AB) ≺ φ(A) + φ(B)`` for sectorial ``A`` and ``B``."""
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    pa = phases(A)
    pb = phases(B)
    ang = product_eigen_angles(A, B, pa.theta, pb.theta)
    total = pa.phases + pb.phases
    return ProductPhaseResult(ang, total, is_majorized(ang, total, tol))


# ---------------------------------------------------------------------------
# rank robustness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarginReport:
    k: int
    phase_margin_alpha: float
    magnitude_margin_gamma: float
    binding_side: str
    phases: np.ndarray


@dataclass(frozen=True)
class RankStatus:
    """Threshold-based rank decision for ``I + AB``.

    ``dropped`` counts singular values below ``DROP_TOL·(1 + σ₁)``;
    ``indeterminate`` counts those between that and ``KEEP_TOL``.
    """

    dropped: int
    indeterminate: int
    singular_values: np.ndarray

    @property
    def rank(self) -> int | None:
        if self.indeterminate:
            return None
        return self.singular_values.size - self.dropped


def rank_status(M) -> RankStatus:
    s = singular_values(M)
    drop = s < DROP_TOL * (1.0 + s[0])
    keep = s > KEEP_TOL
    return RankStatus(int(drop.sum()), int((~drop & ~keep).sum()), s)


def _phases_pm_pi(A) -> np.ndarray:
    pv = phases(A).phases
    for m in (0, -1, 1):
        v = pv + 2 * pi * m
        if v[0] < pi and v[-1] > -pi:
            return v
    raise PhasesOutOfRangeError("phases of A do not fit in (−π, π)")


def rank_margin(A, k: int) -> MarginReport:
    """Phase and magnitude margins for ``rank(I + AB) > n − k``.

    ``phase_margin_alpha = min{kπ − Σ_{i≤k} φ_i(A), kπ + Σ_{i>n−k} φ_i(A)}``;
    ``magnitude_margin_gamma = 1/σ_k(A)``.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 ≤ k ≤ n")
    ph = _phases_pm_pi(A)
    upper = k * pi - ph[:k].sum()
    lower = k * pi + ph[-k:].sum()
    side = "upper" if upper <= lower else "lower"
    s = singular_values(A)
    return MarginReport(k, float(min(upper, lower)), float(1.0 / s[k - 1]), side, ph)


def _adversary_upper(A, k, strict):
    n = A.shape[0]
    dec = sectorial_decomposition(A)
    ph = dec.phases.copy()
    for m in (0, -1, 1):
        v = ph + 2 * pi * m
        if v[0] < pi and v[-1] > -pi:
            ph = v
            break
    else:
        raise PhasesOutOfRangeError("phases of A do not fit in (−π, π)")
    alpha = float(np.sum(pi - ph[:k]))
    if strict and not 0.0 <= alpha < k * pi:
        raise InfeasibleAlphaError(f"α = {alpha:.6g} is outside [0, {k}π)")
    angles = np.empty(n)
    angles[:k] = pi - ph[:k]
    # remaining directions: angle 0 keeps B sectorial when φ_k > 0 (non-strict
    # mode also accepts the boundary φ_k = 0); otherwise use the middle of the
    # admissible window (−φ_k, π − φ_1]
    zero_ok = ph[k - 1] > 0 or (not strict and ph[k - 1] >= -1e-12)
    angles[k:] = 0.0 if zero_ok else 0.5 * (pi - ph[0] - ph[k - 1])
    Tinv = inv(dec.T)
    E = np.exp(1j * angles)
    return (Tinv * E[None, :]) @ Tinv.conj().T, alpha


def adversarial_B(A, k: int, side: str | None = None, strict: bool = True):
    """Sectorial ``B`` with ``rank(I + AB) = n − k`` on the boundary of ``C_k[α]``.

    For ``A = T*DT`` (phases descending), ``B = T⁻¹ E T⁻*`` with
    ``∠e_i = π − φ_i(A)`` for ``i ≤ k``, so ``AB = T*DET⁻*`` has ``k``
    eigenvalues at ``−1``. ``side`` selects the upper (largest phases) or lower
    (smallest phases) construction; by default the binding side of
    :func:`rank_margin`. Returns ``(B, alpha)`` where ``alpha`` is the cone
    parameter ``B`` attains.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError("k must satisfy 1 ≤ k ≤ n")
    if side is None:
        side = rank_margin(A, k).binding_side
    if side == "upper":
        return _adversary_upper(A, k, strict)
    if side == "lower":
        B, alpha = _adversary_upper(A.conj(), k, strict)
        return B.conj(), alpha
    raise ValueError("side must be 'upper' or 'lower'")


def schmidt_mirsky_B(A, k: int) -> np.ndarray:
    """``B = −Σ_{j≤k} v_j u_j*/σ_j``: smallest-norm ``B`` with ``rank(I + AB) = n − k``."""
    A = as_matrix(A, square=True)
    U, s, Vh = svd(A)
    V = Vh.conj().T
    return -(V[:, :k] / s[:k]) @ U[:, :k].conj().T


def sample_sum_cone(rng, n: int, k: int, alpha: float, boundary: bool | None = None):
    """Random ``B ∈ C_k[α]`` together with its phases.

    Phases come from a random window narrower than π inside ``(−π, π)`` and are
    scaled towards zero until both partial-sum constraints hold; with
    ``boundary`` (default: a coin flip) they are scaled so that the tighter
    constraint is active, when that keeps the spread below π.
    """
    rng = as_rng(rng)
    width = rng.uniform(0.0, pi - 0.02)
    start = rng.uniform(-pi + 0.01, pi - 0.01 - width)
    ph = np.sort(rng.uniform(start, start + width, n))[::-1]
    top = ph[:k].sum()
    bot = ph[-k:].sum()
    limits = []
    if top > 0:
        limits.append(alpha / top)
    if bot < 0:
        limits.append(-alpha / bot)
    t_cone = min(limits) if limits else np.inf
    spread = ph[0] - ph[-1]
    t_geom = min((pi - 0.01) / spread if spread > 0 else np.inf,
                 (pi - 0.01) / max(np.abs(ph).max(), 1e-300))
    if boundary is None:
        boundary = bool(rng.random() < 0.5)
    t = min(t_cone, t_geom) if boundary else min(1.0, t_cone)
    ph = ph * t
    P = random_congruence(rng, n)
    return P.conj().T @ (np.exp(1j * ph)[:, None] * P), ph


def sample_ball(rng, n: int, gamma: float) -> np.ndarray:
    """Random ``B`` with ``σ₁(B) ≤ γ`` (uniform radius, random singular directions)."""
    rng = as_rng(rng)
    G = complex_gaussian(rng, n)
    s = singular_values(G)[0]
    return G * (gamma * rng.uniform(0.0, 1.0) / s)


@dataclass(frozen=True)
class MixedMarginReport:
    """Outcome of the combined magnitude/phase robustness check."""

    verdict: bool
    gamma_limit: float
    alpha_limit: float
    trials: int
    violations: int
    indeterminate: int
    counterexample: np.ndarray | None
    construction: str | None


def mixed_margin_check(A, gamma: float, alpha: float, trials: int = 200,
                       seed=None) -> MixedMarginReport:
    """``rank(I + AB) = n`` for all ``B ∈ B[γ] ∪ C_1[α]`` iff both margins hold.

    When ``γ < 1/σ₁(A)`` and ``α < min{π − φ₁(A), π + φ_n(A)}`` random members of
    both sets are drawn and any rank drop is counted as a violation. Otherwise
    a rank-dropping ``B`` is returned: the Schmidt–Mirsky matrix when the
    magnitude bound fails, the ``k = 1`` phase adversary when the phase bound
    fails.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    ph = _phases_pm_pi(A)
    s1 = singular_values(A)[0]
    g_lim = 1.0 / s1
    a_lim = float(min(pi - ph[0], pi + ph[-1]))
    verdict = gamma < g_lim and alpha < a_lim
    if not verdict:
        if not gamma < g_lim:
            return MixedMarginReport(False, g_lim, a_lim, 0, 0, 0,
                                     schmidt_mirsky_B(A, 1), "schmidt-mirsky")
        B, _ = adversarial_B(A, 1, strict=False)
        return MixedMarginReport(False, g_lim, a_lim, 0, 0, 0, B, "phase-adversary")
    rng = as_rng(seed)
    I = np.eye(n)
    bad = indet = 0
    for t in range(trials):
        if t % 2 == 0:
            B = sample_ball(rng, n, gamma)
        else:
            B, _ = sample_sum_cone(rng, n, 1, alpha)
        st = rank_status(I + A @ B)
        bad += st.dropped > 0
        indet += st.indeterminate > 0
    return MixedMarginReport(True, g_lim, a_lim, trials, bad, indet, None, None)


# ---------------------------------------------------------------------------
# Kronecker and Hadamard products
# ---------------------------------------------------------------------------


def _spread_check(pa: np.ndarray, pb: np.ndarray):
    spread = pa[0] + pb[0] - pa[-1] - pb[-1]
    if not spread < pi:
        raise SpreadTooWideError(f"combined phase spread {spread:.6g} is not below π")


@dataclass(frozen=True)
class KroneckerPhases:
    """Formula phases ``{φ_i(A) + φ_j(B)}`` and, optionally, the direct computation."""

    phases: PhaseVector
    direct: np.ndarray | None
    max_error: float | None


def kronecker_phases(A, B, verify: bool = True) -> KroneckerPhases:
    """Phases of ``A ⊗ B`` as all sums ``φ_i(A) + φ_j(B)``, descending.

    With ``verify`` the phases of ``np.kron(A, B)`` are computed directly in
    the same branch and the largest deviation is reported.
    """
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    pa = phases(A).phases
    pb = phases(B).phases
    _spread_check(pa, pb)
    vals = np.sort(np.add.outer(pa, pb).ravel())[::-1]
    mid = 0.5 * (vals[0] + vals[-1])
    pv = PhaseVector(vals, mid - pi / 2, mid)
    if not verify:
        return KroneckerPhases(pv, None, None)
    direct = phases(np.kron(A, B), theta=pv.theta).phases
    return KroneckerPhases(pv, direct, float(np.abs(direct - vals).max()))


@dataclass(frozen=True)
class HadamardBounds:
    phases: np.ndarray
    upper_bound: float
    lower_bound: float
    holds: bool
    slack: float
    phase_sum: np.ndarray


def hadamard_phase_bounds(A, B, tol: float = 1e-7) -> HadamardBounds:
    """Endpoint bounds ``φ₁(A⊙B) ≤ φ₁(A)+φ₁(B)`` and ``φ_n(A⊙B) ≥ φ_n(A)+φ_n(B)``."""
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    pa = phases(A).phases
    pb = phases(B).phases
    _spread_check(pa, pb)
    up = float(pa[0] + pb[0])
    lo = float(pa[-1] + pb[-1])
    H = A * B
    mid = 0.5 * (up + lo)
    try:
        ph = phases(H, theta=mid - pi / 2).phases
    except (NotSectorialError, BranchError):
        nan = float("nan")
        return HadamardBounds(np.full(A.shape[0], nan), up, lo, False, -np.inf, pa + pb)
    slack = float(min(up - ph[0], ph[-1] - lo))
    return HadamardBounds(ph, up, lo, slack >= -tol, slack, pa + pb)


def hadamard_diagonal(A) -> np.ndarray:
    """``A ⊙ I``."""
    A = as_matrix(A, square=True)
    return np.diag(np.diag(A))


__all__ = [
    "ConeSpec",
    "ConeMembership",
    "cone_membership",
    "rotated_hermitian",
    "rotated_psd_margin",
    "InterlacingResult",
    "compress",
    "schur_complement",
    "ExtremalSums",
    "extremal_phase_sums",
    "ProductPhaseResult",
    "product_eigen_angles",
    "product_phase_check",
    "MarginReport",
    "RankStatus",
    "rank_status",
    "rank_margin",
    "adversarial_B",
    "schmidt_mirsky_B",
    "sample_sum_cone",
    "sample_ball",
    "MixedMarginReport",
    "mixed_margin_check",
    "KroneckerPhases",
    "kronecker_phases",
    "HadamardBounds",
    "hadamard_phase_bounds",
    "hadamard_diagonal",
]
