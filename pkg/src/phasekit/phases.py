"""Phases of sectorial matrices and the factorizations built on them.

A sectorial matrix ``C`` is congruent to a diagonal unitary matrix,
``C = T* D T``, and the angles of ``D`` are its phases. Rotating by the
canonical angle ``γ⋆`` gives ``e^{-iγ⋆}C = H̃ + iK̃`` with ``H̃ ≻ 0``; then
``H̃^{-1/2} C̃ H̃^{-1/2} = I + iM`` with ``M`` Hermitian, and the phases are
``γ⋆ + arctan(λ(M))``. Only Hermitian eigenproblems are involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .errors import BranchError, NotRealError, NotSectorialError
from .linalg import (
    as_matrix,
    general_eig,
    hermitian_eig,
    hermitian_part,
    pd_inv_sqrt,
    pd_sqrt,
    polar_right,
    qr_decompose,
    skew_part,
    solve,
    svd,
)
from .numrange import SectorInfo, classify_sector

GROUP_TOL = 1e-8


@dataclass(frozen=True)
class PhaseVector:
    """Phases sorted in descending order, all inside ``(theta, theta + π)``."""

    phases: np.ndarray
    theta: float
    gamma_star: float

    def __len__(self) -> int:
        return self.phases.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.phases, dtype=dtype)


@dataclass(frozen=True)
class SectorialDecomposition:
    """``C = T* D T`` with ``D`` diagonal unitary, phases descending along ``D``."""

    T: np.ndarray
    D: np.ndarray
    phases: np.ndarray
    gamma_star: float


@dataclass(frozen=True)
class SymmetricPolar:
    """``C = P U P`` with ``P`` positive definite and ``U`` unitary."""

    P: np.ndarray
    U: np.ndarray


@dataclass(frozen=True)
class GeneralizedCholesky:
    """``C = R* W R`` with ``R`` upper triangular (positive diagonal), ``W`` unitary."""

    R: np.ndarray
    W: np.ndarray


@dataclass(frozen=True)
class RealSectorial:
    """Real factorizations of a real sectorial matrix.

    ``C = Tᵀ D T`` where ``D`` is orthogonal and block diagonal with 2×2
    rotation blocks ``[[cos ω, −sin ω], [sin ω, cos ω]]`` (``ω > 0``) followed by
    1×1 blocks. When the Hermitian part of ``C`` is negative definite the
    factors describe ``−C`` and ``D`` absorbs the sign, so ``negated`` is
    informational only: ``C = Tᵀ D T`` holds either way. ``P, U`` and ``R, W``
    are the real symmetric polar and generalized Cholesky factors.
    """

    T: np.ndarray
    D: np.ndarray
    block_angles: np.ndarray
    P: np.ndarray
    U: np.ndarray
    R: np.ndarray
    W: np.ndarray
    negated: bool


def _require_sectorial(C, info: SectorInfo | None) -> SectorInfo:
    if info is None:
        info = classify_sector(C)
    if not info.sectorial:
        raise NotSectorialError("matrix is not sectorial (0 lies in its numerical range)")
    return info


def _rebranch(values: np.ndarray, theta: float) -> np.ndarray:
    """Shift ``values`` by a common multiple of 2π into ``(theta, theta + π)``."""
    lo, hi = values.min(), values.max()
    m = np.floor((theta - lo) / (2 * pi)) + 1.0
    shifted = values + 2 * pi * m
    if not (shifted.min() > theta and shifted.max() < theta + pi):
        raise BranchError(
            f"phases spanning [{lo:.6g}, {hi:.6g}] do not fit in ({theta:.6g}, {theta:.6g} + π)"
        )
    return shifted


def _congruence_spectrum(C, gamma):
    """Hermitian ``M`` and ``H̃^{1/2}`` for ``e^{-iγ}C = H̃^{1/2}(I + iM)H̃^{1/2}``."""
    Ct = np.exp(-1j * gamma) * C
    Ht = hermitian_part(Ct)
    Kt = skew_part(Ct)
    R = pd_inv_sqrt(Ht)
    M = hermitian_part(R @ Kt @ R)
    return M, Ht


def phases(C, theta: float | None = None, info: SectorInfo | None = None) -> PhaseVector:
    """Phases ``φ₁ ≥ … ≥ φ_n`` of a sectorial matrix.

    Parameters
    ----------
    C : array_like
        Square sectorial matrix.
    theta : float, optional
        Anchor of the branch interval ``(theta, theta + π)``. By default
        ``theta = γ⋆ − π/2`` where ``γ⋆`` is the angle of maximal accretivity.
        Passing another anchor shifts every phase by the same multiple of 2π.
    info : SectorInfo, optional
        Precomputed :func:`classify_sector` result for ``C``.

    Raises
    ------
    NotSectorialError
        If ``0`` lies in the numerical range of ``C``.
    BranchError
        If the phases cannot be placed in the requested interval.
    """
    C = as_matrix(C, square=True)
    info = _require_sectorial(C, info)
    g = info.gamma_star
    if C.shape[0] == 1:
        vals = np.array([g])
    else:
        M, _ = _congruence_spectrum(C, g)
        lam = hermitian_eig(M, vectors=False).values
        vals = g + np.arctan(lam)
    anchor = g - pi / 2
    if theta is not None:
        vals = _rebranch(vals, theta)
        anchor = float(theta)
    return PhaseVector(vals, anchor, g)


def phases_via_inverse_conjugate(C, theta: float | None = None,
                                 info: SectorInfo | None = None) -> PhaseVector:
    """Phases from the similarity ``C⁻¹C* ~ D̄²``: ``φ = −½∠λ(C⁻¹C*)``.

    ``−½∠λ`` is only defined modulo π; each value is placed in
    ``(γ⋆ − π/2, γ⋆ + π/2]``, which contains all phases of a sectorial matrix.
    """
    C = as_matrix(C, square=True)
    info = _require_sectorial(C, info)
    g = info.gamma_star
    G = solve(C, C.conj().T)
    lam = general_eig(G).values
    raw = -0.5 * np.angle(lam)
    top = g + pi / 2
    vals = np.sort(top - np.mod(top - raw, pi))[::-1]
    anchor = g - pi / 2
    if theta is not None:
        vals = _rebranch(vals, theta)
        anchor = float(theta)
    return PhaseVector(vals, anchor, g)


def sectorial_decomposition(C, info: SectorInfo | None = None) -> SectorialDecomposition:
    """Sectorial decomposition ``C = T* D T``.

    With ``M = QΛQ*`` as in :func:`phases`,
    ``D = diag(e^{iγ⋆}(1 + iΛ)/|1 + iΛ|)`` and
    ``T = diag(|1 + iΛ|^{1/2}) Q* H̃^{1/2}``.
    """
    C = as_matrix(C, square=True)
    info = _require_sectorial(C, info)
    g = info.gamma_star
    n = C.shape[0]
    if n == 1:
        c = complex(C[0, 0])
        return SectorialDecomposition(np.array([[np.sqrt(abs(c))]], dtype=np.complex128),
                                      np.array([[np.exp(1j * g)]]), np.array([g]), g)
    M, Ht = _congruence_spectrum(C, g)
    eig = hermitian_eig(M)
    lam, Q = eig.values, eig.vectors
    mod = np.sqrt(1.0 + lam**2)
    angles = g + np.arctan(lam)
    D = np.diag(np.exp(1j * angles))
    T = (np.sqrt(mod)[:, None] * Q.conj().T) @ pd_sqrt(Ht)
    return SectorialDecomposition(T, D, angles, g)


def spd(C, decomposition: SectorialDecomposition | None = None) -> SymmetricPolar:
    """Symmetric polar decomposition ``C = P U P``.

    Built from the right polar factorization ``T = V P`` of any sectorial
    decomposition, with ``U = V* D V``. The result does not depend on which
    sectorial decomposition is supplied.
    """
    if decomposition is None:
        decomposition = sectorial_decomposition(C)
    V, P = polar_right(decomposition.T)
    U = V.conj().T @ decomposition.D @ V
    return SymmetricPolar(P, U)


def gcf(C, decomposition: SectorialDecomposition | None = None) -> GeneralizedCholesky:
    """Generalized Cholesky factorization ``C = R* W R`` from ``T = QR``."""
    if decomposition is None:
        decomposition = sectorial_decomposition(C)
    Q, R = qr_decompose(decomposition.T)
    W = Q.conj().T @ decomposition.D @ Q
    return GeneralizedCholesky(R, W)


def _real_normal_basis(N: np.ndarray, tol: float):
    """Orthogonal ``Q`` and rates ``μ`` with ``QᵀNQ`` block diagonal.

    ``N`` is real skew-symmetric. Each 2×2 block is ``[[0, −μ], [μ, 0]]``
    (``μ > 0``, descending), followed by the kernel directions. An eigenvector
    ``x + iy`` of the Hermitian matrix ``iN`` for ``μ > 0`` gives ``Nx = μy`` and
    ``Ny = −μx`` with ``x ⊥ y`` and ``‖x‖ = ‖y‖``.
    """
    n = N.shape[0]
    eig = hermitian_eig(1j * N)
    vals, vecs = eig.values, eig.vectors
    scale = max(1.0, abs(vals[0]) if n else 0.0)
    cols, mus = [], []
    for j in range(n):
        if vals[j] <= tol * scale:
            break
        v = vecs[:, j]
        x, y = v.real, v.imag
        nx = np.linalg.norm(x)
        cols.extend([x / nx, y / nx])
        mus.append(float(vals[j]))
    m = len(mus)
    if 2 * m < n:
        # real basis of the kernel from the remaining eigenvectors
        rest = vecs[:, m:n - m]
        stacked = np.hstack([rest.real, rest.imag])
        if cols:
            Qp = np.column_stack(cols)
            stacked = stacked - Qp @ (Qp.T @ stacked)
        u, _, _ = svd(stacked)
        cols.extend(u[:, : n - 2 * m].real.T)
    Q = np.column_stack(cols) if cols else np.zeros((n, 0))
    return Q, np.array(mus)


def real_sectorial(C, info: SectorInfo | None = None, real_tol: float = 1e-12) -> RealSectorial:
    """Real sectorial decomposition plus real SPD and GCF of a real sectorial matrix."""
    C = as_matrix(C, square=True)
    scale = max(np.abs(C).max(), 1e-300)
    if np.abs(C.imag).max(initial=0.0) > real_tol * scale:
        raise NotRealError("matrix has a non-negligible imaginary part")
    info = _require_sectorial(C, info)
    A = C.real.copy()
    n = A.shape[0]
    Hs = 0.5 * (A + A.T)
    hmin = hermitian_eig(Hs.astype(np.complex128), vectors=False).values if n else np.zeros(1)
    negated = False
    if hmin.max() < 0:
        A = -A
        Hs = -Hs
        negated = True
    elif not hmin.min() > 0:
        raise NotSectorialError("real matrix with indefinite symmetric part is not sectorial")
    S = 0.5 * (A - A.T)
    Hh = pd_sqrt(Hs).real
    Hi = pd_inv_sqrt(Hs).real
    N = Hi @ S @ Hi
    N = 0.5 * (N - N.T)
    Q, mus = _real_normal_basis(N, 1e-8)
    m = mus.size
    omegas = np.arctan(mus)
    D = np.eye(n)
    svec = np.ones(n)
    for b, (mu, om) in enumerate(zip(mus, omegas)):
        i = 2 * b
        D[i:i + 2, i:i + 2] = [[np.cos(om), -np.sin(om)], [np.sin(om), np.cos(om)]]
        svec[i:i + 2] = (1.0 + mu * mu) ** 0.25
    if negated:
        D = -D
    T = (svec[:, None] * Q.T) @ Hh
    V, P = polar_right(T)
    V, P = V.real, P.real
    U = V.T @ D @ V
    Qr, R = qr_decompose(T)
    Qr, R = Qr.real, R.real
    W = Qr.T @ D @ Qr
    return RealSectorial(T, D, omegas[:m], P, U, R, W, negated)


def psi_phases(C) -> np.ndarray:
    """Angles of the eigenvalues of the unitary polar factor of ``C``.

    Branch ``(γ − π, γ + π]`` where ``γ`` is the angle of the eigenvalue sum;
    sorted descending.
    """
    C = as_matrix(C, square=True)
    V, _ = polar_right(C)
    lam = general_eig(V).values
    lam = lam / np.abs(lam)
    g = float(np.angle(lam.sum()))
    vals = g + np.angle(lam * np.exp(-1j * g))
    return np.sort(vals)[::-1]


def eigenphases(C, theta: float | None = None, info: SectorInfo | None = None) -> np.ndarray:
    """Angles of the eigenvalues placed in the phase interval of ``C``, descending."""
    pv = phases(C, theta=theta, info=info)
    lam = general_eig(as_matrix(C, square=True)).values
    vals = pv.theta + np.mod(np.angle(lam) - pv.theta, 2 * pi)
    return np.sort(vals)[::-1]


def commuting_unitary(angles, rng: np.random.Generator, tol: float = GROUP_TOL) -> np.ndarray:
    """Random block-diagonal unitary commuting with ``diag(e^{i·angles})``.

    ``angles`` must be sorted; entries closer than ``tol`` share a block. Used
    to generate the alternative sectorial decompositions ``(ΞT, D)``.
    """
    angles = np.asarray(angles, dtype=float)
    n = angles.size
    Xi = np.zeros((n, n), dtype=np.complex128)
    i = 0
    while i < n:
        j = i + 1
        while j < n and abs(angles[j] - angles[i]) <= tol:
            j += 1
        k = j - i
        G = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        Q, _ = qr_decompose(G)
        Xi[i:j, i:j] = Q
        i = j
    return Xi
