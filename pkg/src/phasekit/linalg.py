"""Dense complex linear algebra kernel.

Every other module goes through these routines for eigenvalues, QR, polar
factors, square roots and pseudoinverses. The heavy loops are compiled with
numba (``cache=True``), so the first call in a fresh environment pays a
one-off compilation cost.

Algorithms
----------
* Hermitian eigenproblem: cyclic complex Jacobi, stopping when the
  off-diagonal Frobenius mass drops below ``tol * ||H||_F``.
* General eigenproblem: Householder reduction to Hessenberg form followed by
  Wilkinson-shifted complex QR with deflation; eigenvectors (on request) by
  inverse iteration on the original matrix.
* Singular values: one-sided (Hestenes) Jacobi, which keeps tiny singular
  values accurate to ``eps * ||A||``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from numba import njit

from .errors import (
    NoConvergenceError,
    NonFiniteError,
    NonSquareError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)

RANK_TOL = 1e-10
PD_TOL = 1e-10
HERM_TOL = 1e-8
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class HermEigen:
    """Eigenvalues (descending) and unitary eigenvector matrix."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class GenEigen:
    values: np.ndarray
    vectors: np.ndarray | None = None


def as_matrix(A, square: bool = False) -> np.ndarray:
    """Return ``A`` as a finite 2-D complex128 array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise NonSquareError(f"matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteError("matrix has NaN or Inf entries")
    return M


def hermitian_part(C: np.ndarray) -> np.ndarray:
    return 0.5 * (C + C.conj().T)


def skew_part(C: np.ndarray) -> np.ndarray:
    """Hermitian ``K`` with ``C = H + iK``."""
    return (C - C.conj().T) / 2j


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _rotation(app, aqq, apq):
    # (c, s, e) for J = [[c, s], [-s*conj(e), c*conj(e)]] zeroing apq
    mag = abs(apq)
    e = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / sqrt(1.0 + t * t)
    return c, t * c, e


@njit(cache=True)
def _jacobi_herm(h, want_vectors, tol, max_sweeps):
    n = h.shape[0]
    a = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        a[i, i] = h[i, i].real
        for j in range(i + 1, n):
            x = 0.5 * (h[i, j] + np.conj(h[j, i]))
            a[i, j] = x
            a[j, i] = np.conj(x)
    v = np.eye(n, dtype=np.complex128)
    fro2 = 0.0
    for i in range(n):
        for j in range(n):
            fro2 += a[i, j].real ** 2 + a[i, j].imag ** 2
    thresh = tol * sqrt(fro2)
    converged = fro2 == 0.0
    sweep = 0
    while not converged and sweep < max_sweeps:
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * (a[i, j].real ** 2 + a[i, j].imag ** 2)
        if sqrt(off) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s, e = _rotation(a[p, p].real, a[q, q].real, apq)
                ce = np.conj(e)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ce * akq
                    a[k, q] = s * akp + c * ce * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * e * aqk
                    a[q, k] = s * apk + c * e * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - s * ce * vkq
                        v[k, q] = s * vkp + c * ce * vkq
        sweep += 1
    if not converged:
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * (a[i, j].real ** 2 + a[i, j].imag ** 2)
        converged = sqrt(off) <= thresh
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(-w, kind="mergesort")
    return w[order], v[:, order], converged


@njit(cache=True)
def _eigvalsh_stack(hs, tol, max_sweeps):
    m = hs.shape[0]
    n = hs.shape[1]
    out = np.empty((m, n))
    ok = True
    for b in range(m):
        w, _, conv = _jacobi_herm(hs[b], False, tol, max_sweeps)
        out[b] = w
        ok = ok and conv
    return out, ok


@njit(cache=True)
def _support_grid(H, K, gammas, tol, max_sweeps):
    # min and max eigenvalues of cos(g) H + sin(g) K for each g
    m = gammas.shape[0]
    lo = np.empty(m)
    hi = np.empty(m)
    ok = True
    for b in range(m):
        g = gammas[b]
        M = np.cos(g) * H + np.sin(g) * K
        w, _, conv = _jacobi_herm(M, False, tol, max_sweeps)
        lo[b] = w[-1]
        hi[b] = w[0]
        ok = ok and conv
    return lo, hi, ok


@njit(cache=True)
def _svd_jacobi(a_in, want_vectors, tol, max_sweeps):
    # one-sided Jacobi on the columns of a (m x n, m >= n)
    a = a_in.copy()
    m, n = a.shape
    v = np.eye(n, dtype=np.complex128)
    converged = False
    sweep = 0
    while sweep < max_sweeps:
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0 + 0.0j
                for k in range(m):
                    alpha += a[k, p].real ** 2 + a[k, p].imag ** 2
                    beta += a[k, q].real ** 2 + a[k, q].imag ** 2
                    gamma += np.conj(a[k, p]) * a[k, q]
                if abs(gamma) <= tol * sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                c, s, e = _rotation(alpha, beta, gamma)
                ce = np.conj(e)
                for k in range(m):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ce * akq
                    a[k, q] = s * akp + c * ce * akq
                if want_vectors:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - s * ce * vkq
                        v[k, q] = s * vkp + c * ce * vkq
        sweep += 1
        if not rotated:
            converged = True
            break
    s_vals = np.empty(n)
    for j in range(n):
        acc = 0.0
        for k in range(m):
            acc += a[k, j].real ** 2 + a[k, j].imag ** 2
        s_vals[j] = sqrt(acc)
    order = np.argsort(-s_vals, kind="mergesort")
    return s_vals[order], a[:, order], v[:, order], converged


@njit(cache=True)
def _singular_values_stack(As, tol, max_sweeps):
    nb = As.shape[0]
    n = As.shape[2]
    out = np.empty((nb, n))
    ok = True
    for b in range(nb):
        s, _, _, conv = _svd_jacobi(As[b], False, tol, max_sweeps)
        out[b] = s
        ok = ok and conv
    return out, ok


@njit(cache=True)
def _lu(a_in, floor):
    # partial pivoting; pivots below floor are replaced by floor (inverse iteration)
    a = a_in.copy()
    n = a.shape[0]
    piv = np.arange(n)
    sign = 1.0
    min_piv = np.inf
    for k in range(n):
        p = k
        best = abs(a[k, k])
        for i in range(k + 1, n):
            if abs(a[i, k]) > best:
                best = abs(a[i, k])
                p = i
        if p != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
            t = piv[k]
            piv[k] = piv[p]
            piv[p] = t
            sign = -sign
        if abs(a[k, k]) < min_piv:
            min_piv = abs(a[k, k])
        if abs(a[k, k]) <= floor:
            a[k, k] = floor if floor > 0.0 else 0.0
        if a[k, k] == 0.0:
            continue
        for i in range(k + 1, n):
            f = a[i, k] / a[k, k]
            a[i, k] = f
            for j in range(k + 1, n):
                a[i, j] -= f * a[k, j]
    return a, piv, sign, min_piv


@njit(cache=True)
def _lu_solve(lu, piv, b):
    n = lu.shape[0]
    ncol = b.shape[1]
    x = np.empty((n, ncol), dtype=np.complex128)
    for i in range(n):
        x[i] = b[piv[i]]
    for i in range(n):
        for k in range(i):
            x[i] -= lu[i, k] * x[k]
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            x[i] -= lu[i, k] * x[k]
        x[i] /= lu[i, i]
    return x


@njit(cache=True)
def _det_stack(As):
    nb = As.shape[0]
    out = np.empty(nb, dtype=np.complex128)
    for b in range(nb):
        lu, _, sign, _ = _lu(As[b], 0.0)
        d = sign + 0.0j
        for i in range(lu.shape[0]):
            d *= lu[i, i]
        out[b] = d
    return out


@njit(cache=True)
def _householder_qr(a_in):
    a = a_in.copy()
    m, n = a.shape
    vs = np.zeros((m, n), dtype=np.complex128)
    for k in range(n):
        alpha = 0.0
        for i in range(k, m):
            alpha += a[i, k].real ** 2 + a[i, k].imag ** 2
        alpha = sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = a[k, k]
        ph = x0 / abs(x0) if x0 != 0.0 else 1.0 + 0.0j
        v = a[k:, k].copy()
        v[0] += ph * alpha
        nv = 0.0
        for i in range(v.shape[0]):
            nv += v[i].real ** 2 + v[i].imag ** 2
        nv = sqrt(nv)
        v /= nv
        vs[k:, k] = v
        for j in range(k, n):
            dot = 0.0 + 0.0j
            for i in range(k, m):
                dot += np.conj(v[i - k]) * a[i, j]
            for i in range(k, m):
                a[i, j] -= 2.0 * v[i - k] * dot
    q = np.zeros((m, n), dtype=np.complex128)
    for i in range(n):
        q[i, i] = 1.0
    for k in range(n - 1, -1, -1):
        v = vs[k:, k]
        for j in range(n):
            dot = 0.0 + 0.0j
            for i in range(k, m):
                dot += np.conj(v[i - k]) * q[i, j]
            for i in range(k, m):
                q[i, j] -= 2.0 * v[i - k] * dot
    r = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(i, n):
            r[i, j] = a[i, j]
    for k in range(n):
        d = r[k, k]
        if d != 0.0:
            ph = d / abs(d)
            for j in range(k, n):
                r[k, j] *= np.conj(ph)
            for i in range(m):
                q[i, k] *= ph
    return q, r


@njit(cache=True)
def _cholesky(a):
    n = a.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = a[j, j].real
        for k in range(j):
            d -= L[j, k].real ** 2 + L[j, k].imag ** 2
        if not d > 0.0:
            return L, False
        L[j, j] = sqrt(d)
        for i in range(j + 1, n):
            s = a[i, j]
            for k in range(j):
                s -= L[i, k] * np.conj(L[j, k])
            L[i, j] = s / L[j, j]
    return L, True


@njit(cache=True)
def _givens(a, b):
    # c real, s complex with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]
    if b == 0.0:
        return 1.0, 0.0 + 0.0j
    if a == 0.0:
        return 0.0, np.conj(b) / abs(b)
    r = sqrt(abs(a) ** 2 + abs(b) ** 2)
    return abs(a) / r, (a / abs(a)) * np.conj(b) / r


@njit(cache=True)
def _hessenberg(a_in):
    a = a_in.copy()
    n = a.shape[0]
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += a[i, k].real ** 2 + a[i, k].imag ** 2
        alpha = sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = a[k + 1, k]
        ph = x0 / abs(x0) if x0 != 0.0 else 1.0 + 0.0j
        v = a[k + 1:, k].copy()
        v[0] += ph * alpha
        nv = 0.0
        for i in range(v.shape[0]):
            nv += v[i].real ** 2 + v[i].imag ** 2
        v /= sqrt(nv)
        for j in range(n):
            dot = 0.0 + 0.0j
            for i in range(k + 1, n):
                dot += np.conj(v[i - k - 1]) * a[i, j]
            for i in range(k + 1, n):
                a[i, j] -= 2.0 * v[i - k - 1] * dot
        for i in range(n):
            dot = 0.0 + 0.0j
            for j in range(k + 1, n):
                dot += a[i, j] * v[j - k - 1]
            for j in range(k + 1, n):
                a[i, j] -= 2.0 * dot * np.conj(v[j - k - 1])
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@njit(cache=True)
def _eig2(a, b, c, d):
    half = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    l1 = half + disc
    l2 = half - disc
    # recover the smaller root from the determinant when cancellation bites
    det = a * d - b * c
    if abs(l1) >= abs(l2):
        if l1 != 0.0:
            l2 = det / l1
    else:
        if l2 != 0.0:
            l1 = det / l2
    return l1, l2


@njit(cache=True)
def _hqr(a_in, defl, max_iter):
    h = _hessenberg(a_in)
    n = h.shape[0]
    w = np.zeros(n, dtype=np.complex128)
    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm = max(norm, abs(h[i, j]))
    hi = n - 1
    its = 0
    total = 0
    cs = np.empty(n)
    ss = np.empty(n, dtype=np.complex128)
    while hi >= 0:
        if hi == 0:
            w[0] = h[0, 0]
            break
        l = hi
        while l > 0:
            s = abs(h[l, l]) + abs(h[l - 1, l - 1])
            if s == 0.0:
                s = norm
            if abs(h[l, l - 1]) <= defl * s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if l == hi - 1:
            l1, l2 = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            w[hi - 1] = l1
            w[hi] = l2
            hi -= 2
            its = 0
            continue
        if total >= max_iter:
            return w, False
        its += 1
        total += 1
        if its % 11 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * (1.0 + 0.5j)
        else:
            l1, l2 = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            mu = l1 if abs(l1 - h[hi, hi]) <= abs(l2 - h[hi, hi]) else l2
        for i in range(l, hi + 1):
            h[i, i] -= mu
        for k in range(l, hi):
            c, s = _givens(h[k, k], h[k + 1, k])
            cs[k] = c
            ss[k] = s
            for j in range(k, hi + 1):
                x = h[k, j]
                y = h[k + 1, j]
                h[k, j] = c * x + s * y
                h[k + 1, j] = -np.conj(s) * x + c * y
        for k in range(l, hi):
            c = cs[k]
            s = ss[k]
            top = min(k + 2, hi)
            for i in range(l, top + 1):
                x = h[i, k]
                y = h[i, k + 1]
                h[i, k] = c * x + np.conj(s) * y
                h[i, k + 1] = -s * x + c * y
        for i in range(l, hi + 1):
            h[i, i] += mu
    return w, True


@njit(cache=True)
def _inverse_iteration(a, w, cluster_tol):
    n = a.shape[0]
    norm = 0.0
    for i in range(n):
        for j in range(n):
            norm = max(norm, abs(a[i, j]))
    if norm == 0.0:
        norm = 1.0
    floor = 1e-14 * norm
    X = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        m = a.copy()
        for i in range(n):
            m[i, i] -= w[j]
        lu, piv, _, _ = _lu(m, floor)
        x = np.empty((n, 1), dtype=np.complex128)
        for i in range(n):
            x[i, 0] = 1.0 + 0.3 * np.sin(1.7 * (i + 1) * (j + 1)) + 0.2j * np.cos(0.9 * (i + 1) + j)
        for it in range(4):
            # keep eigenvectors of a cluster independent
            for pcol in range(j):
                if abs(w[pcol] - w[j]) <= cluster_tol:
                    dot = 0.0 + 0.0j
                    for i in range(n):
                        dot += np.conj(X[i, pcol]) * x[i, 0]
                    for i in range(n):
                        x[i, 0] -= dot * X[i, pcol]
            nx = 0.0
            for i in range(n):
                nx += abs(x[i, 0]) ** 2
            nx = sqrt(nx)
            if nx == 0.0:
                x[j % n, 0] = 1.0
                nx = 1.0
            for i in range(n):
                x[i, 0] /= nx
            if it == 3:
                break
            x = _lu_solve(lu, piv, x)
        # fix the phase: largest component real positive
        big = 0
        for i in range(n):
            if abs(x[i, 0]) > abs(x[big, 0]):
                big = i
        ph = x[big, 0] / abs(x[big, 0])
        for i in range(n):
            X[i, j] = x[i, 0] / ph
    return X


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def hermitian_eig(H, vectors: bool = True, tol: float = 1e-14,
                  max_sweeps: int = 100, herm_tol: float = HERM_TOL) -> HermEigen:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Values come back sorted in descending order with the matching unitary
    eigenvector matrix. ``H`` is symmetrized first; a matrix further than
    ``herm_tol * ||H||_F`` from Hermitian is rejected.
    """
    H = as_matrix(H, square=True)
    n = H.shape[0]
    if n == 0:
        return HermEigen(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    nrm = np.linalg.norm(H)
    if np.linalg.norm(H - H.conj().T) > herm_tol * max(nrm, 1e-300):
        raise ValueError("matrix is not Hermitian")
    w, v, ok = _jacobi_herm(H, vectors, tol, max_sweeps)
    if not ok:
        raise NoConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return HermEigen(w, v if vectors else None)


def eigvalsh(H, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix or a stack of them."""
    H = np.asarray(H, dtype=np.complex128)
    if H.shape[-1] != H.shape[-2]:
        raise NonSquareError(f"matrix must be square, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise NonFiniteError("matrix has NaN or Inf entries")
    lead = H.shape[:-2]
    n = H.shape[-1]
    flat = np.ascontiguousarray(H.reshape(-1, n, n))
    w, ok = _eigvalsh_stack(flat, tol, max_sweeps)
    if not ok:
        raise NoConvergenceError("Jacobi did not converge")
    return w.reshape(lead + (n,))


def support_grid(H, K, gammas, tol: float = 1e-14):
    """Extreme eigenvalues of ``cos(g) H + sin(g) K`` over an angle grid."""
    lo, hi, ok = _support_grid(np.ascontiguousarray(H, dtype=np.complex128),
                               np.ascontiguousarray(K, dtype=np.complex128),
                               np.ascontiguousarray(gammas, dtype=np.float64), tol, 100)
    if not ok:
        raise NoConvergenceError("Jacobi did not converge on the support grid")
    return lo, hi


def general_eig(A, vectors: bool = False, max_iter: int | None = None) -> GenEigen:
    """Eigenvalues of a general complex matrix (Hessenberg + shifted QR).

    Eigenvectors, when requested, come from inverse iteration on ``A`` and are
    normalized to unit 2-norm. For clustered eigenvalues the iterates are
    orthogonalized against each other, which gives a basis of the eigenspace
    for non-defective clusters.
    """
    A = as_matrix(A, square=True)
    n = A.shape[0]
    if n == 0:
        return GenEigen(np.zeros(0, dtype=np.complex128),
                        np.zeros((0, 0), dtype=np.complex128) if vectors else None)
    if max_iter is None:
        max_iter = 40 * n
    w, ok = _hqr(A, 1e-14, max_iter)
    if not ok:
        raise NoConvergenceError(f"shifted QR did not converge in {max_iter} iterations")
    if not vectors:
        return GenEigen(w)
    scale = max(np.abs(A).max(), 1e-300)
    X = _inverse_iteration(A, w, 1e-8 * scale)
    return GenEigen(w, X)


def lu_det(A) -> complex:
    """Determinant through LU with partial pivoting."""
    A = as_matrix(A, square=True)
    if A.shape[0] == 0:
        return 1.0 + 0.0j
    return complex(_det_stack(A[None])[0])


def det_stack(As) -> np.ndarray:
    As = np.ascontiguousarray(As, dtype=np.complex128)
    if As.shape[-1] == 0:
        return np.ones(As.shape[0], dtype=np.complex128)
    return _det_stack(As)


def solve(A, B, rank_tol: float = 1e-14) -> np.ndarray:
    """Solve ``A X = B`` by LU with partial pivoting."""
    A = as_matrix(A, square=True)
    B_arr = np.asarray(B, dtype=np.complex128)
    vec = B_arr.ndim == 1
    B2 = as_matrix(B_arr.reshape(-1, 1) if vec else B_arr)
    n = A.shape[0]
    if B2.shape[0] != n:
        raise ValueError(f"shape mismatch: A is {A.shape}, B is {B2.shape}")
    if n == 0:
        return np.zeros(B_arr.shape, dtype=np.complex128)
    lu, piv, _, min_piv = _lu(A, 0.0)
    scale = np.abs(A).max()
    if scale == 0.0 or min_piv <= rank_tol * scale:
        raise SingularMatrixError("matrix is singular to working precision")
    X = _lu_solve(lu, piv, np.ascontiguousarray(B2))
    return X.ravel() if vec else X


def inv(A) -> np.ndarray:
    A = as_matrix(A, square=True)
    return solve(A, np.eye(A.shape[0], dtype=np.complex128))


def qr_decompose(A, rank_tol: float = RANK_TOL):
    """Householder QR with ``R`` carrying a strictly positive real diagonal.

    Works for square and tall matrices (thin factorization). Raises
    :class:`SingularMatrixError` when the matrix is (numerically) rank deficient.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ValueError("qr_decompose needs rows >= cols")
    if n == 0:
        return np.zeros((m, 0), dtype=np.complex128), np.zeros((0, 0), dtype=np.complex128)
    Q, R = _householder_qr(A)
    d = np.abs(np.diag(R))
    if d.min() <= rank_tol * max(d.max(), 1e-300):
        raise SingularMatrixError("matrix is rank deficient")
    return Q, R


def cholesky(P) -> np.ndarray:
    """Lower-triangular ``L`` with ``P = L L*``."""
    P = as_matrix(P, square=True)
    L, ok = _cholesky(hermitian_part(P))
    if not ok:
        raise NotPositiveDefiniteError("matrix is not positive definite")
    return L


def svd(A, tol: float = 1e-15, max_sweeps: int = 100):
    """Thin SVD ``A = U diag(s) Vh`` by one-sided Jacobi; ``s`` descending."""
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        U, s, Vh = svd(A.conj().T, tol, max_sweeps)
        return Vh.conj().T, s, U.conj().T
    if n == 0:
        return np.zeros((m, 0), dtype=np.complex128), np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    s, AV, V, ok = _svd_jacobi(A, True, tol, max_sweeps)
    if not ok:
        raise NoConvergenceError("one-sided Jacobi did not converge")
    U = np.zeros((m, n), dtype=np.complex128)
    big = s > 0
    U[:, big] = AV[:, big] / s[big]
    if not big.all():
        # complete U with an orthonormal basis for the null directions
        k = int(big.sum())
        basis = U[:, :k]
        j = k
        for e in np.eye(m, dtype=np.complex128):
            if j == n:
                break
            x = e - basis @ (basis.conj().T @ e)
            x -= basis @ (basis.conj().T @ x)
            nx = np.linalg.norm(x)
            if nx > 1e-8:
                U[:, j] = x / nx
                basis = U[:, :j + 1]
                j += 1
    return U, s, V.conj().T


def singular_values(A, tol: float = 1e-15) -> np.ndarray:
    """Singular values in descending order; accepts stacks ``(..., m, n)``."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim < 2:
        raise ValueError("expected a matrix")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("matrix has NaN or Inf entries")
    if A.shape[-2] < A.shape[-1]:
        A = np.swapaxes(A, -1, -2).conj()
    lead = A.shape[:-2]
    m, n = A.shape[-2:]
    if n == 0:
        return np.zeros(lead + (0,))
    flat = np.ascontiguousarray(A.reshape(-1, m, n))
    s, ok = _singular_values_stack(flat, tol, 100)
    if not ok:
        raise NoConvergenceError("one-sided Jacobi did not converge")
    return s.reshape(lead + (n,))


def spectral_norm(A) -> float:
    s = singular_values(A)
    return float(s[0]) if s.size else 0.0


def polar_right(A, rank_tol: float = RANK_TOL):
    """Right polar decomposition ``A = V P`` (``V`` unitary, ``P`` positive definite)."""
    A = as_matrix(A, square=True)
    if A.shape[0] == 0:
        return A.copy(), A.copy()
    U, s, Vh = svd(A)
    if s[-1] <= rank_tol * s[0]:
        raise SingularMatrixError("polar decomposition needs a nonsingular matrix")
    V = U @ Vh
    P = Vh.conj().T @ (s[:, None] * Vh)
    return V, hermitian_part(P)


def _pd_eig(P, pd_tol):
    P = as_matrix(P, square=True)
    eig = hermitian_eig(P)
    top = max(abs(eig.values[0]), abs(eig.values[-1])) if eig.values.size else 0.0
    if eig.values.size and eig.values[-1] <= pd_tol * max(top, 1e-300):
        raise NotPositiveDefiniteError("matrix is not positive definite")
    return eig


def pd_sqrt(P, pd_tol: float = PD_TOL) -> np.ndarray:
    """Unique positive definite square root."""
    eig = _pd_eig(P, pd_tol)
    V = eig.vectors
    return hermitian_part(V @ (np.sqrt(eig.values)[:, None] * V.conj().T))


def pd_inv_sqrt(P, pd_tol: float = PD_TOL) -> np.ndarray:
    """Inverse of the positive definite square root."""
    eig = _pd_eig(P, pd_tol)
    V = eig.vectors
    return hermitian_part(V @ ((1.0 / np.sqrt(eig.values))[:, None] * V.conj().T))


def pseudoinverse(A, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse, discarding singular values below ``rank_tol * s1``."""
    A = as_matrix(A)
    m, n = A.shape
    if A.size == 0:
        return np.zeros((n, m), dtype=np.complex128)
    U, s, Vh = svd(A)
    if s[0] == 0.0:
        return np.zeros((n, m), dtype=np.complex128)
    keep = s > rank_tol * s[0]
    return Vh[keep].conj().T @ ((1.0 / s[keep])[:, None] * U[:, keep].conj().T)


def numerical_rank(A, rank_tol: float = RANK_TOL) -> int:
    s = singular_values(A)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))
