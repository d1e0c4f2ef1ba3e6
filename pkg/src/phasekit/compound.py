"""Compound matrices, compound spectra and compound numerical ranges.

The kth compound ``A_(k)`` collects all k×k minors of ``A`` in lexicographic
order of the row and column index sets. The kth compound numerical range
``W_(k)(A)`` is the set of ``det(X*AX)`` over isometric ``X ∈ ℂ^{n×k}``; the
angular variant ``W'_(k)(A)`` allows any full-rank ``X``. ``W_(k)`` is not
convex, so membership is only ever certified positively, through witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import BadOrderError, DefectiveEigenvectorsError, NotSectorialError
from .linalg import (
    as_matrix,
    det_stack,
    general_eig,
    inv,
    lu_det,
    polar_right,
    qr_decompose,
    singular_values,
    solve,
)
from .numrange import classify_sector, contains_point

RANK_TOL = 1e-10
EIGVEC_TOL = 1e-6


@dataclass(frozen=True)
class CompoundMatrix:
    k: int
    base_dims: tuple[int, int]
    matrix: np.ndarray
    row_index: tuple[tuple[int, ...], ...]
    col_index: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class CompoundSampleCloud:
    """Sampled points of ``W_(k)`` (``isometric``) or ``W'_(k)`` (``full-rank``)."""

    k: int
    kind: str
    points: np.ndarray
    witnesses: np.ndarray


@dataclass
class InclusionReport:
    """Worst relative residuals of the witness identities for one ``(A, B, k)``.

    ``prod_inv`` checks ``λ_S(AB⁻¹)·det(U*BU) = det(U*AU)``; ``spectrum`` the
    ``B = I`` case; ``prod_range`` checks ``λ_S(AB) = det(U*AU)·det(Z*BZ)``;
    ``compression_identity`` checks ``det(X*AX) = X_(k)* A_(k) X_(k)`` with unit
    ``X_(k)``. ``membership_failures`` counts sampled or witness points of
    ``W_(k)(A)`` that were not found in ``W(A_(k))``.
    """

    k: int
    prod_inv: float = 0.0
    spectrum: float = 0.0
    prod_range: float = 0.0
    compression_identity: float = 0.0
    membership_checked: int = 0
    membership_failures: int = 0
    perturbed: bool = False
    tol: float = 1e-7
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        worst = max(self.prod_inv, self.spectrum, self.prod_range, self.compression_identity)
        return worst <= self.tol and self.membership_failures == 0


def _check_order(k, *dims):
    if not 1 <= k <= min(dims):
        raise BadOrderError(f"order k={k} must satisfy 1 <= k <= {min(dims)}")


def compound(A, k: int) -> CompoundMatrix:
    """kth compound matrix of an ``n × m`` matrix."""
    A = as_matrix(A)
    n, m = A.shape
    _check_order(k, n, m)
    rows = tuple(combinations(range(n), k))
    cols = tuple(combinations(range(m), k))
    r = np.array(rows)
    c = np.array(cols)
    subs = A[r[:, None, :, None], c[None, :, None, :]]
    minors = det_stack(np.ascontiguousarray(subs.reshape(-1, k, k)))
    return CompoundMatrix(k, (n, m), minors.reshape(len(rows), len(cols)), rows, cols)


def _subset_products(values: np.ndarray, k: int) -> np.ndarray:
    idx = np.array(list(combinations(range(values.size), k)))
    return np.prod(values[idx], axis=1)


def compound_spectrum(A, k: int) -> np.ndarray:
    """Products of ``k`` distinct-index eigenvalues, in lexicographic subset order."""
    A = as_matrix(A, square=True)
    _check_order(k, A.shape[0])
    return _subset_products(general_eig(A).values, k)


def _gaussian(rng, n, k):
    return rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))


def sample_compound_range(A, k: int, n_samples: int, seed: int = 0,
                          kind: str = "isometric") -> CompoundSampleCloud:
    """Random points ``det(X*AX)`` of ``W_(k)(A)`` or ``W'_(k)(A)``.

    Isometric ``X`` are Q factors of complex Gaussian draws; full-rank ``X``
    are the raw draws, redrawn while ``σ_k(X) ≤ RANK_TOL·σ₁(X)``.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    _check_order(k, n)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if kind not in ("isometric", "full-rank"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    Xs = np.empty((n_samples, n, k), dtype=np.complex128)
    for s in range(n_samples):
        while True:
            G = _gaussian(rng, n, k)
            sv = singular_values(G)
            if sv[-1] > RANK_TOL * sv[0]:
                break
        Xs[s] = qr_decompose(G)[0] if kind == "isometric" else G
    comp = np.conj(np.swapaxes(Xs, 1, 2)) @ A @ Xs
    pts = det_stack(np.ascontiguousarray(comp))
    return CompoundSampleCloud(k, kind, pts, Xs)


def _left_eigvectors(M, cond_limit=1e8):
    """Eigenvalues of ``M`` and unit left eigenvectors ``x_j* M = λ_j x_j*``."""
    Mh = M.conj().T
    eig = general_eig(Mh, vectors=True)
    X = eig.vectors
    sv = singular_values(X)
    if sv[-1] <= sv[0] / cond_limit:
        raise DefectiveEigenvectorsError("eigenvector matrix is (nearly) singular")
    # inside a defective cluster the orthogonalized iterates are not eigenvectors
    resid = np.abs(Mh @ X - X * eig.values).max()
    if resid > EIGVEC_TOL * max(np.abs(M).max(), 1e-300):
        raise DefectiveEigenvectorsError("no eigenvector basis (defective eigenvalue)")
    return np.conj(eig.values), X


def _relerr(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _polar_isometry(X):
    """Isometric ``U`` with ``X = U P`` (``P`` positive definite)."""
    Q, R = qr_decompose(X)
    V, _ = polar_right(R)
    return Q @ V


def _witness_residuals(A, B, k, spectrum, L):
    """Worst residual of ``λ_S · det(U*BU) = det(U*AU)`` over all k-subsets.

    ``L`` holds left eigenvectors of ``AB⁻¹`` (columns) and ``spectrum`` the
    matching eigenvalues.
    """
    worst = 0.0
    witnesses = []
    for S in combinations(range(A.shape[0]), k):
        S = list(S)
        U = _polar_isometry(L[:, S])
        lam = np.prod(spectrum[S])
        wa = lu_det(U.conj().T @ A @ U)
        wb = lu_det(U.conj().T @ B @ U)
        worst = max(worst, _relerr(lam * wb, wa))
        witnesses.append((S, U, lam, wa, wb))
    return worst, witnesses


def verify_inclusions(A, B, k: int, trials: int = 8, seed: int = 0, tol: float = 1e-7,
                      membership_tol: float = 1e-6) -> InclusionReport:
    """Witness-based checks of the compound inclusions for one pair ``(A, B)``.

    * ``Λ_(k)(AB⁻¹) ⊂ W_(k)(A)/W_(k)(B)``: for each k-subset ``S`` of left
      eigenvectors of ``AB⁻¹``, the isometric polar factor ``U`` satisfies
      ``det(U*AU) = λ_S(AB⁻¹)·det(U*BU)``.
    * ``Λ_(k)(A) ⊂ W_(k)(A) ⊂ W(A_(k))``: the ``B = I`` witnesses, plus
      ``trials`` random isometric samples, are tested for membership in the
      numerical range of ``A_(k)``.
    * ``Λ_(k)(AB) ⊂ W'_(k)(A)·W'_(k)(B)``: with ``U`` from ``AB`` and
      ``Z = t·B⁻¹U`` scaled so that ``det(Z*BZ) = 1/det(U*B⁻¹U)``, the identity
      ``λ_S(AB) = det(U*AU)·det(Z*BZ)`` is checked.

    If an eigenvector basis is numerically defective, ``A`` is replaced by a
    seeded perturbation of relative size 1e−10 and ``perturbed`` is set.
    """
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    n = A.shape[0]
    if B.shape != A.shape:
        raise ValueError("A and B must have the same shape")
    _check_order(k, n)
    if not classify_sector(B).sectorial:
        raise NotSectorialError("B must be sectorial")
    rng = np.random.default_rng(seed)
    rep = InclusionReport(k=k, tol=tol)
    Binv = inv(B)
    I = np.eye(n, dtype=np.complex128)
    Awork = A
    for attempt in range(4):
        try:
            lam_q, L_q = _left_eigvectors(Awork @ Binv)
            lam_a, L_a = _left_eigvectors(Awork)
            lam_p, L_p = _left_eigvectors(Awork @ B)
            break
        except DefectiveEigenvectorsError:
            if attempt == 3:
                raise
            rep.perturbed = True
            scale = 1e-10 * max(np.abs(A).max(), 1e-300)
            Awork = A + scale * _gaussian(rng, n, n)
    rep.prod_inv, _ = _witness_residuals(Awork, B, k, lam_q, L_q)
    rep.spectrum, spec_w = _witness_residuals(Awork, I, k, lam_a, L_a)

    worst = 0.0
    for S in combinations(range(n), k):
        S = list(S)
        U = _polar_isometry(L_p[:, S])
        lam = np.prod(lam_p[S])
        wa = lu_det(U.conj().T @ Awork @ U)
        c = 1.0 / lu_det(U.conj().T @ Binv @ U)
        Y = solve(B, U)
        d = lu_det(Y.conj().T @ B @ Y)
        t = (abs(c) / abs(d)) ** (1.0 / (2 * k))
        Z = t * Y
        wb = lu_det(Z.conj().T @ B @ Z)
        worst = max(worst, _relerr(wa * wb, lam), _relerr(wb, c))
    rep.prod_range = worst

    Ak = compound(Awork, k).matrix
    cloud = sample_compound_range(Awork, k, max(trials, 1), seed=int(rng.integers(2**31)))
    pts = list(cloud.points[:trials]) + [w[3] for w in spec_w]
    Xs = list(cloud.witnesses[:trials]) + [w[1] for w in spec_w]
    ident = 0.0
    for p, X in zip(pts, Xs):
        xk = compound(X, k).matrix[:, 0]
        ident = max(ident, abs(np.linalg.norm(xk) - 1.0),
                    _relerr(np.vdot(xk, Ak @ xk), p))
        rep.membership_checked += 1
        if not contains_point(Ak, p, membership_tol=membership_tol):
            rep.membership_failures += 1
    rep.compression_identity = ident
    return rep
