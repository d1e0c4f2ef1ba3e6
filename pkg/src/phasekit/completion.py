"""Banded completion and decomposition inside a phase cone ``C[α, β]``.

Membership ``C ∈ C[α, β]`` (``0 ≤ β − α < π``) is equivalent to two rotated
Hermitian matrices being positive semidefinite,

    M_β = e^{i(π/2−β)}C + h.c. ⪰ 0,    M_α = e^{i(−π/2−α)}C + h.c. ⪰ 0,

so each step of both constructions is a classical PSD completion (or
splitting) applied to ``M_β`` and ``M_α`` separately. The two corner blocks
that result are turned back into the unknown blocks of ``C`` by solving a 2×2
linear system with determinant ``2i·sin(β − α − π)``, which is nonzero for
``β − α < π``. When ``β = α`` the two rotated matrices coincide up to sign and
the step reduces to the Hermitian case ``e^{−iα}C ⪰ 0``.

Blocks are indexed from 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .analysis import ConeSpec, cone_membership, rotated_hermitian
from .errors import (
    DegenerateConeError,
    InfeasibleWindowError,
    NotBandedError,
    NotInConeError,
    NotSectorialError,
    RangeConditionError,
)
from .linalg import RANK_TOL, as_matrix, pseudoinverse, singular_values
from .phases import phases

RANGE_TOL = 1e-8
WINDOW_TOL = 1e-9
BAND_TOL = 1e-12
#: singular values within this factor above the rank cutoff trigger a warning
NEAR_RANK_FACTOR = 1e3


class ConditioningWarning(UserWarning):
    """A pseudoinverse step sits close to a rank transition."""


@dataclass
class BandedPartial:
    """``p``-banded partial block matrix with target cone ``C[α, β]``.

    ``blocks`` maps ``(i, j)`` with ``|i − j| ≤ p`` to an ``n_i × n_j`` array;
    every such block must be present and no other block may be.
    """

    block_sizes: tuple[int, ...]
    p: int
    blocks: dict
    alpha: float
    beta: float

    def __post_init__(self):
        self.block_sizes = tuple(int(s) for s in self.block_sizes)
        if not self.block_sizes or min(self.block_sizes) < 1:
            raise ValueError("block sizes must be positive")
        q = len(self.block_sizes)
        if not 0 <= self.p <= q - 1:
            raise ValueError(f"bandwidth p={self.p} must satisfy 0 ≤ p ≤ {q - 1}")
        blocks = {}
        for (i, j), M in self.blocks.items():
            i, j = int(i), int(j)
            if abs(i - j) > self.p or not (0 <= i < q and 0 <= j < q):
                raise ValueError(f"block ({i}, {j}) lies outside the band")
            M = as_matrix(M)
            if M.shape != (self.block_sizes[i], self.block_sizes[j]):
                raise ValueError(f"block ({i}, {j}) has shape {M.shape}, expected "
                                 f"{(self.block_sizes[i], self.block_sizes[j])}")
            blocks[(i, j)] = M
        missing = [(i, j) for i in range(q) for j in range(q)
                   if abs(i - j) <= self.p and (i, j) not in blocks]
        if missing:
            raise ValueError(f"band blocks missing: {missing}")
        self.blocks = blocks
        self.alpha = float(self.alpha)
        self.beta = float(self.beta)

    @property
    def cone(self) -> ConeSpec:
        return ConeSpec.interval(self.alpha, self.beta)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_sizes)])

    @classmethod
    def from_matrix(cls, C, block_sizes, p: int, alpha: float, beta: float) -> "BandedPartial":
        """Keep the band of a full matrix and forget everything outside it."""
        C = as_matrix(C, square=True)
        off = np.concatenate([[0], np.cumsum(block_sizes)])
        if off[-1] != C.shape[0]:
            raise ValueError("block sizes do not add up to the matrix size")
        q = len(block_sizes)
        blocks = {(i, j): C[off[i]:off[i + 1], off[j]:off[j + 1]].copy()
                  for i in range(q) for j in range(q) if abs(i - j) <= p}
        return cls(tuple(block_sizes), p, blocks, alpha, beta)


@dataclass(frozen=True)
class BandedPart:
    """Core ``C̃_l`` covering blocks ``offset … offset + p``."""

    offset: int
    core: np.ndarray


@dataclass
class BandedDecomposition:
    """``C = Σ_l diag(0, C̃_l, 0)`` with every core in ``C[α, β]``."""

    block_sizes: tuple[int, ...]
    p: int
    alpha: float
    beta: float
    parts: list = field(default_factory=list)

    def embedded(self, part: BandedPart) -> np.ndarray:
        off = np.concatenate([[0], np.cumsum(self.block_sizes)])
        n = int(off[-1])
        out = np.zeros((n, n), dtype=np.complex128)
        a = off[part.offset]
        b = a + part.core.shape[0]
        out[a:b, a:b] = part.core
        return out

    def total(self) -> np.ndarray:
        n = int(sum(self.block_sizes))
        out = np.zeros((n, n), dtype=np.complex128)
        for part in self.parts:
            out += self.embedded(part)
        return out


def _angles(alpha: float, beta: float):
    return pi / 2 - beta, -pi / 2 - alpha


def solve_rotated_pair(R1, R2, alpha: float, beta: float):
    """Solve ``e^{iγ₁}X + e^{−iγ₁}Z = R1`` and ``e^{iγ₂}X + e^{−iγ₂}Z = R2``.

    ``γ₁ = π/2 − β`` and ``γ₂ = −π/2 − α``. Returns ``(X, Z)``. In the
    completion ``Z = Y*`` for the mirrored unknown block; in the decomposition
    ``Z = X*``.
    """
    g1, g2 = _angles(alpha, beta)
    det = 2j * np.sin(g1 - g2)
    X = (np.exp(-1j * g2) * R1 - np.exp(-1j * g1) * R2) / det
    Z = (np.exp(1j * g1) * R2 - np.exp(1j * g2) * R1) / det
    return X, Z


def _pinv_checked(P, rank_tol):
    s = singular_values(P)
    if s.size and s[0] > 0.0:
        cut = rank_tol * s[0]
        near = (s > cut) & (s <= NEAR_RANK_FACTOR * cut)
        if near.any():
            warnings.warn(f"window block has singular value {s[near].min():.3g} within "
                          f"{NEAR_RANK_FACTOR:g}× of the rank cutoff {cut:.3g}",
                          ConditioningWarning, stacklevel=4)
    return pseudoinverse(P, rank_tol)


def _check_range(P, Pinv, B, side: str):
    """``ℛ(B) ⊂ ℛ(P)`` (``side='left'``) or ``ℛ(B*) ⊂ ℛ(P)`` (``side='right'``)."""
    nb = np.linalg.norm(B)
    if nb == 0.0:
        return
    if side == "left":
        res = B - P @ (Pinv @ B)
    else:
        res = B - (B @ Pinv) @ P
    if np.linalg.norm(res) > RANGE_TOL * nb:
        raise RangeConditionError(
            f"range inclusion fails: residual {np.linalg.norm(res) / nb:.3g} relative"
        )


def _psd_bridge(M, i0, i1, i2, i3, rank_tol):
    """``B E† F`` for the window of Hermitian ``M`` split at ``i0 < i1 ≤ i2 < i3``."""
    B = M[i0:i1, i1:i2]
    E = M[i1:i2, i1:i2]
    F = M[i1:i2, i2:i3]
    if E.size == 0:
        return np.zeros((i1 - i0, i3 - i2), dtype=np.complex128)
    Ed = _pinv_checked(E, rank_tol)
    _check_range(E, Ed, F, "left")
    _check_range(E, Ed, B, "right")
    return B @ Ed @ F


def _window_phase_bounds(W):
    try:
        ph = phases(W).phases
        return float(ph[-1]), float(ph[0])
    except (NotSectorialError, ValueError):
        return None, None


def _check_windows(partial: BandedPartial, tol: float):
    off = partial.offsets
    q = len(partial.block_sizes)
    spec = partial.cone
    for l in range(q - partial.p):
        a, b = off[l], off[l + partial.p + 1]
        W = np.zeros((b - a, b - a), dtype=np.complex128)
        for i in range(l, l + partial.p + 1):
            for j in range(l, l + partial.p + 1):
                W[off[i] - a:off[i + 1] - a, off[j] - a:off[j + 1] - a] = partial.blocks[(i, j)]
        if not cone_membership(W, spec, tol=tol).member:
            lo, hi = _window_phase_bounds(W)
            raise InfeasibleWindowError(l, lo, hi)


def complete(partial: BandedPartial, window_tol: float = WINDOW_TOL,
             rank_tol: float = RANK_TOL) -> np.ndarray:
    """Fill the unspecified blocks so that the result lies in ``C[α, β]``.

    Unknown block diagonals are filled outward, ``d = p+1, …, q−1``. The pair
    ``(C[i, i+d], C[i+d, i])`` is fixed from the window of blocks ``i … i+d``:
    the corners of ``M_β`` and ``M_α`` are set to ``B E† F`` with ``E`` the
    middle blocks, and the pair is recovered with :func:`solve_rotated_pair`.

    Raises
    ------
    DegenerateConeError
        If ``β − α ≥ π`` (or ``β < α``).
    InfeasibleWindowError
        If a specified ``(p+1)``-block window is outside ``C[α, β]``.
    RangeConditionError
        If a pseudoinverse step meets a numerically violated range inclusion.
    """
    alpha, beta = partial.alpha, partial.beta
    if not 0.0 <= beta - alpha < pi:
        raise DegenerateConeError("completion needs 0 ≤ β − α < π")
    _check_windows(partial, window_tol)
    off = partial.offsets
    q = len(partial.block_sizes)
    n = int(off[-1])
    C = np.zeros((n, n), dtype=np.complex128)
    for (i, j), M in partial.blocks.items():
        C[off[i]:off[i + 1], off[j]:off[j + 1]] = M
    g1, g2 = _angles(alpha, beta)
    for d in range(partial.p + 1, q):
        for i in range(q - d):
            j = i + d
            a, b = off[i], off[j + 1]
            i1, i2 = off[i + 1] - a, off[j] - a
            W = C[a:b, a:b]
            m = b - a
            if beta == alpha:
                R = np.exp(-1j * alpha) * W
                R = 0.5 * (R + R.conj().T)
                corner = _psd_bridge(R, 0, i1, i2, m, rank_tol)
                X = np.exp(1j * alpha) * corner
                Ys = np.exp(-1j * alpha) * corner
            else:
                R1 = _psd_bridge(rotated_hermitian(W, g1), 0, i1, i2, m, rank_tol)
                R2 = _psd_bridge(rotated_hermitian(W, g2), 0, i1, i2, m, rank_tol)
                X, Ys = solve_rotated_pair(R1, R2, alpha, beta)
            C[off[i]:off[i + 1], off[j]:off[j + 1]] = X
            C[off[j]:off[j + 1], off[i]:off[i + 1]] = Ys.conj().T
    return C


def _schur_split(M, k1, rank_tol):
    """``B* A† B`` for Hermitian ``M = [[A, B], [B*, E]]`` with ``A`` of size ``k1``."""
    A = M[:k1, :k1]
    B = M[:k1, k1:]
    Ad = _pinv_checked(A, rank_tol)
    _check_range(A, Ad, B, "left")
    return B.conj().T @ Ad @ B


def decompose_banded(C, block_sizes, p: int, alpha: float, beta: float,
                     cone_tol: float = WINDOW_TOL, band_tol: float = BAND_TOL,
                     rank_tol: float = RANK_TOL) -> BandedDecomposition:
    """Split a ``p``-banded ``C ∈ C[α, β]`` into window-supported cores in ``C[α, β]``.

    Works on the leading window: with block ``l`` as the first block and
    blocks ``l+1 … l+p`` as the second, ``X₂₂`` is fixed by setting the
    corresponding corners of ``M_β`` and ``M_α`` to ``B* A† B``; the part
    ``[[C₁₁, C₁₂], [C₂₁, X₂₂]]`` is split off and the procedure repeats on the
    remainder with ``C₂₂ − X₂₂`` in place of ``C₂₂``.

    Raises
    ------
    NotBandedError
        If blocks outside the band exceed ``band_tol·max|C|``.
    NotInConeError
        If ``C`` is not in ``C[α, β]``.
    """
    C = as_matrix(C, square=True)
    block_sizes = tuple(int(s) for s in block_sizes)
    off = np.concatenate([[0], np.cumsum(block_sizes)])
    if off[-1] != C.shape[0]:
        raise ValueError("block sizes do not add up to the matrix size")
    q = len(block_sizes)
    if not 0 <= p <= q - 1:
        raise ValueError(f"bandwidth p={p} must satisfy 0 ≤ p ≤ {q - 1}")
    if not 0.0 <= beta - alpha < pi:
        raise DegenerateConeError("decomposition needs 0 ≤ β − α < π")
    scale = max(np.abs(C).max(), 1e-300)
    for i in range(q):
        for j in range(q):
            if abs(i - j) > p:
                blk = C[off[i]:off[i + 1], off[j]:off[j + 1]]
                if blk.size and np.abs(blk).max() > band_tol * scale:
                    raise NotBandedError(f"block ({i}, {j}) lies outside the band but is nonzero")
    spec = ConeSpec.interval(alpha, beta)
    memb = cone_membership(C, spec, tol=cone_tol)
    if not memb.member:
        raise NotInConeError(f"matrix is not in C[{alpha:.6g}, {beta:.6g}] (slack {memb.slack:.3g})")
    g1, g2 = _angles(alpha, beta)
    rest = C.copy()
    dec = BandedDecomposition(block_sizes, p, float(alpha), float(beta))
    for l in range(q - p - 1):
        a = off[l]
        k1 = off[l + 1] - a
        b = off[l + p + 1]
        W = rest[a:b, a:b]
        if beta == alpha:
            R = np.exp(-1j * alpha) * W
            R = 0.5 * (R + R.conj().T)
            X = np.exp(1j * alpha) * _schur_split(R, k1, rank_tol)
        else:
            R1 = _schur_split(rotated_hermitian(W, g1), k1, rank_tol)
            R2 = _schur_split(rotated_hermitian(W, g2), k1, rank_tol)
            X, _ = solve_rotated_pair(R1, R2, alpha, beta)
        core = W.copy()
        core[k1:, k1:] = X
        dec.parts.append(BandedPart(l, core))
        rest[a + k1:b, a + k1:b] -= X
        rest[a:b, a:b][:k1, :] = 0.0
        rest[a:b, a:b][:, :k1] = 0.0
    last = q - p - 1
    a = off[last]
    dec.parts.append(BandedPart(last, rest[a:, a:].copy()))
    return dec


__all__ = [
    "ConditioningWarning",
    "BandedPartial",
    "BandedPart",
    "BandedDecomposition",
    "solve_rotated_pair",
    "complete",
    "decompose_banded",
]
