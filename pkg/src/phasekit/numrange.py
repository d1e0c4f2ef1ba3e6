"""Numerical range geometry: sectoriality, supporting rays and membership.

Everything here is driven by the support function

    f(γ) = λ_min(Herm(e^{-iγ} C)) = λ_min(cos γ · H + sin γ · K),

with ``C = H + iK``. ``f(γ)`` is the signed distance from the origin to the
supporting line of ``W(C)`` with inner normal ``e^{iγ}``, so ``C`` is sectorial
exactly when ``max f > 0``. On the arc where ``f`` is positive it is concave,
and that arc is ``(φ_max − π/2, φ_min + π/2)``; its endpoints give the two
supporting-ray angles.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin

import numpy as np
from numba import njit

from .errors import ZeroMatrixError
from .linalg import (
    _jacobi_herm,
    as_matrix,
    hermitian_eig,
    hermitian_part,
    skew_part,
    spectral_norm,
)

GRID_SIZE = 720
SECTOR_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9
_JACOBI_TOL = 1e-14


@dataclass(frozen=True)
class SectorInfo:
    """Sectoriality verdict and supporting-ray data for a square matrix.

    ``gamma_star``, ``phi_max``, ``phi_min`` and ``field_angle`` are ``nan``
    when the matrix is not sectorial.
    """

    sectorial: bool
    gamma_star: float
    phi_max: float
    phi_min: float
    field_angle: float
    accretivity: float
    sector_tol: float


@dataclass(frozen=True)
class BoundaryTrace:
    points: np.ndarray
    angles: np.ndarray
    witnesses: np.ndarray


@njit(cache=True)
def _fmin(H, K, g):
    w, _, _ = _jacobi_herm(cos(g) * H + sin(g) * K, False, _JACOBI_TOL, 100)
    return w[-1]


@njit(cache=True)
def _grid_argmax(H, K, m):
    best = -np.inf
    best_j = 0
    for j in range(m):
        g = -pi + 2.0 * pi * (j + 1) / m
        f = _fmin(H, K, g)
        if f > best:
            best = f
            best_j = j
    return -pi + 2.0 * pi * (best_j + 1) / m, best


@njit(cache=True)
def _fmin_slope(H, K, g):
    w, v, _ = _jacobi_herm(cos(g) * H + sin(g) * K, True, _JACOBI_TOL, 100)
    x = np.ascontiguousarray(v[:, -1])
    dM = -sin(g) * H + cos(g) * K
    return w[-1], np.real(np.vdot(x, dM @ x))


@njit(cache=True)
def _slope_bisect_max(H, K, a, b, tol):
    # f is concave near its positive maximum, so the slope changes sign once;
    # this also pins down kinks where two eigenvalue branches cross
    fa, da = _fmin_slope(H, K, a)
    fb, db = _fmin_slope(H, K, b)
    if da <= 0.0:
        return a, fa
    if db >= 0.0:
        return b, fb
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm, dm = _fmin_slope(H, K, mid)
        if dm > 0.0:
            a = mid
        else:
            b = mid
    g = 0.5 * (a + b)
    return g, _fmin(H, K, g)


@njit(cache=True)
def _bisect_zero(H, K, pos, neg, tol):
    # f(pos) > 0 >= f(neg); returns the crossing
    while abs(neg - pos) > tol:
        mid = 0.5 * (pos + neg)
        if _fmin(H, K, mid) > 0.0:
            pos = mid
        else:
            neg = mid
    return 0.5 * (pos + neg)


@njit(cache=True)
def _maximize_support(H, K, m, tol):
    g0, f0 = _grid_argmax(H, K, m)
    h = 2.0 * pi / m
    g, f = _slope_bisect_max(H, K, g0 - h, g0 + h, tol)
    if f0 > f:
        return g0, f0
    return g, f


@njit(cache=True)
def _crossings(H, K, gstar, tol):
    hi = _bisect_zero(H, K, gstar, gstar + pi, tol)
    lo = _bisect_zero(H, K, gstar, gstar - pi, tol)
    return lo, hi


def _wrap(g: float) -> float:
    """Map an angle into (−π, π], snapping values within 1e−9 of −π to π."""
    g = float(np.angle(np.exp(1j * g)))
    if g <= -pi + 1e-9:
        g += 2.0 * pi
    return g


def support_value(C, gamma: float):
    """Smallest eigenvalue of ``Herm(e^{-iγ}C)`` and a unit eigenvector for it."""
    C = as_matrix(C, square=True)
    Hg = hermitian_part(np.exp(-1j * gamma) * C)
    eig = hermitian_eig(Hg)
    return float(eig.values[-1]), eig.vectors[:, -1]


def _support_max(C, grid_size=GRID_SIZE, angle_tol=1e-13):
    H = np.ascontiguousarray(hermitian_part(C))
    K = np.ascontiguousarray(skew_part(C))
    g, f = _maximize_support(H, K, grid_size, angle_tol)
    return H, K, float(g), float(f)


def classify_sector(C, sector_tol: float | None = None, grid_size: int = GRID_SIZE,
                    angle_tol: float = 1e-13) -> SectorInfo:
    """Decide sectoriality and locate the supporting rays of ``W(C)``.

    Parameters
    ----------
    C : array_like
        Square complex matrix, not identically zero.
    sector_tol : float, optional
        Absolute threshold on the accretivity; defaults to ``1e−9·‖C‖₂``.
        Matrices whose numerical range touches the origin fall below it and
        are reported as non-sectorial.
    grid_size : int
        Number of coarse angles on (−π, π] before refinement.
    """
    C = as_matrix(C, square=True)
    n = C.shape[0]
    nrm = spectral_norm(C) if n else 0.0
    if nrm == 0.0:
        raise ZeroMatrixError("the zero matrix has no sector")
    tol = SECTOR_TOL * nrm if sector_tol is None else sector_tol
    if n == 1:
        c = complex(C[0, 0])
        a = float(np.angle(c))
        a = _wrap(a)
        return SectorInfo(True, a, a, a, 0.0, abs(c), tol)
    H, K, g, f = _support_max(C, grid_size, angle_tol)
    if not f > tol:
        nan = float("nan")
        return SectorInfo(False, nan, nan, nan, nan, f, tol)
    gstar = _wrap(g)
    lo, hi = _crossings(H, K, gstar, 1e-13)
    phi_max = lo + pi / 2.0
    phi_min = hi - pi / 2.0
    phi_max = max(phi_max, gstar)
    phi_min = min(phi_min, gstar)
    return SectorInfo(True, gstar, phi_max, phi_min, phi_max - phi_min, f, tol)


def boundary_trace(C, n_samples: int = 256) -> BoundaryTrace:
    """Sample ``∂W(C)`` through the top eigenvectors of ``Herm(e^{-iγ}C)``.

    Each point ``x*Cx`` lies on the supporting line with outer normal ``e^{iγ}``;
    the witnesses ``x`` are returned column-wise.
    """
    if n_samples < 8:
        raise ValueError("n_samples must be at least 8")
    C = as_matrix(C, square=True)
    n = C.shape[0]
    angles = 2.0 * pi * np.arange(n_samples) / n_samples
    pts = np.empty(n_samples, dtype=np.complex128)
    wit = np.empty((n, n_samples), dtype=np.complex128)
    for j, g in enumerate(angles):
        eig = hermitian_eig(hermitian_part(np.exp(-1j * g) * C))
        x = eig.vectors[:, 0]
        wit[:, j] = x
        pts[j] = np.vdot(x, C @ x)
    return BoundaryTrace(pts, angles, wit)


def contains_point(C, z: complex, membership_tol: float | None = None,
                   grid_size: int = GRID_SIZE) -> bool:
    """Membership of ``z`` in the numerical range ``W(C)``.

    ``z ∈ W(C)`` exactly when no supporting line separates it, i.e. when
    ``max_γ λ_min(Herm(e^{-iγ}(C − zI))) ≤ 0``. The maximum is found on a
    coarse angle grid refined by bisection on the slope and compared with
    ``membership_tol`` (default ``1e−9·max(1, ‖C‖₂)``).
    """
    C = as_matrix(C, square=True)
    n = C.shape[0]
    if n == 0:
        return False
    if membership_tol is None:
        membership_tol = MEMBERSHIP_TOL * max(1.0, spectral_norm(C))
    Cz = C - z * np.eye(n)
    if n == 1:
        return abs(Cz[0, 0]) <= membership_tol
    _, _, _, f = _support_max(Cz, grid_size)
    return bool(f <= membership_tol)


def accretivity(C) -> float:
    """``max_γ λ_min(Herm(e^{-iγ}C))``; positive exactly for sectorial ``C``."""
    C = as_matrix(C, square=True)
    if C.shape[0] == 1:
        return float(abs(C[0, 0]))
    return _support_max(C)[3]


def supporting_rays(info: SectorInfo, radius: float = 1.0) -> list[list[float]]:
    """End points of the two supporting rays as ``[[re, im], [re, im]]``."""
    if not info.sectorial:
        return []
    return [[radius * cos(a), radius * sin(a)] for a in (info.phi_max, info.phi_min)]


__all__ = [
    "SectorInfo",
    "BoundaryTrace",
    "support_value",
    "classify_sector",
    "boundary_trace",
    "contains_point",
    "accretivity",
    "supporting_rays",
]
