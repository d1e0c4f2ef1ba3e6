"""Seeded random matrices with known phase structure."""

from __future__ import annotations

import os
from math import pi

import numpy as np

from .linalg import qr_decompose, singular_values

DEFAULT_SEED = 20240607
MIN_CONGRUENCE_SIGMA = 0.05


def default_seed() -> int:
    """Seed from ``PHASEKIT_SEED`` when set, else a fixed default."""
    value = os.environ.get("PHASEKIT_SEED")
    return int(value) if value not in (None, "") else DEFAULT_SEED


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def random_congruence(rng, n: int, spread: float = 0.5,
                      min_sigma: float = MIN_CONGRUENCE_SIGMA) -> np.ndarray:
    """``P = I + spread·G`` with complex Gaussian ``G``, redrawn until ``σ_min(P) ≥ min_sigma``."""
    while True:
        P = np.eye(n) + spread * complex_gaussian(rng, n)
        if singular_values(P)[-1] >= min_sigma:
            return P


def random_unitary(rng, n: int) -> np.ndarray:
    Q, _ = qr_decompose(complex_gaussian(rng, n))
    return Q


def random_pd(rng, n: int, shift: float = 0.1) -> np.ndarray:
    G = complex_gaussian(rng, n)
    return G @ G.conj().T + shift * np.eye(n)


def random_phase_vector(rng, n: int, low: float = -1.2, high: float = 1.2) -> np.ndarray:
    """Descending phases drawn uniformly from ``[low, high]`` (``high − low < π``)."""
    if not high - low < pi:
        raise ValueError("phase window must be narrower than π")
    return np.sort(rng.uniform(low, high, n))[::-1]


def sectorial_from_phases(rng, phases, spread: float = 0.5) -> np.ndarray:
    """``P* diag(e^{iφ}) P`` for a random well-conditioned congruence ``P``."""
    phases = np.asarray(phases, dtype=float)
    P = random_congruence(rng, phases.size, spread)
    return P.conj().T @ (np.exp(1j * phases)[:, None] * P)


def random_sectorial(rng, n: int, low: float = -1.2, high: float = 1.2,
                     spread: float = 0.5):
    """Random sectorial matrix and its ground-truth phases (descending)."""
    ph = random_phase_vector(rng, n, low, high)
    return sectorial_from_phases(rng, ph, spread), ph


def random_real_sectorial(rng, n: int, max_angle: float = 1.2) -> np.ndarray:
    """Real sectorial matrix ``Sᵀ·D·S`` with ``D`` a block rotation (angles ≤ ``max_angle``)."""
    D = np.eye(n)
    for i in range(0, n - 1, 2):
        if rng.random() < 0.75:
            w = rng.uniform(0.05, max_angle)
            D[i:i + 2, i:i + 2] = [[np.cos(w), -np.sin(w)], [np.sin(w), np.cos(w)]]
    while True:
        S = np.eye(n) + 0.5 * rng.normal(size=(n, n))
        if singular_values(S)[-1] >= MIN_CONGRUENCE_SIGMA:
            break
    return S.T @ D @ S


def random_window_phases(rng, n: int, max_width: float = pi - 0.05,
                         low: float = -pi + 0.02, high: float = pi - 0.02) -> np.ndarray:
    """Descending phases inside a random window of width below ``max_width`` within ``(low, high)``."""
    width = rng.uniform(0.0, min(max_width, high - low))
    start = rng.uniform(low, high - width)
    return np.sort(rng.uniform(start, start + width, n))[::-1]
