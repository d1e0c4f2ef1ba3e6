"""Majorization, weak majorization and log-majorization of real vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError, NonFiniteError, NonPositiveEntryError

DEFAULT_TOL = 1e-8
POSITIVITY_FLOOR = 1e-300


@dataclass(frozen=True)
class MajorizationReport:
    """Outcome of a prefix-sum comparison ``x ≺ y``.

    Attributes
    ----------
    holds : bool
        Every prefix inequality (and, for ``strong``/``log``, the final
        equality) is satisfied within the tolerance.
    kind : str
        ``"strong"``, ``"weak"`` or ``"log"``.
    partial_sums_lhs, partial_sums_rhs : ndarray
        Prefix sums of the descending rearrangements (of the logs for ``log``).
    first_violation_index : int or None
        Length ``k`` of the first violated prefix (1-based), ``n`` when only the
        total fails, ``None`` when the relation holds.
    slack : float
        Smallest margin over all constraints; negative means violated.
    """

    holds: bool
    kind: str
    partial_sums_lhs: np.ndarray
    partial_sums_rhs: np.ndarray
    first_violation_index: int | None
    slack: float

    def __bool__(self) -> bool:
        return self.holds


def _prepare(x, y):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise LengthMismatchError(f"length mismatch: {x.size} vs {y.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteError("vectors must be finite")
    return np.sort(x)[::-1], np.sort(y)[::-1]


def _compare(xs, ys, tol, kind, equality):
    n = xs.size
    sx = np.cumsum(xs)
    sy = np.cumsum(ys)
    if n == 0:
        return MajorizationReport(True, kind, sx, sy, None, 0.0)
    margins = sy - sx
    # prefix constraints k < n; the total is either an inequality or an equality
    prefix = margins[:-1]
    total = -abs(margins[-1]) if equality else margins[-1]
    all_margins = np.append(prefix, total)
    slack = float(all_margins.min())
    bad = np.flatnonzero(all_margins < -tol)
    first = int(bad[0]) + 1 if bad.size else None
    return MajorizationReport(first is None, kind, sx, sy, first, slack)


def is_majorized(x, y, tol: float = DEFAULT_TOL) -> MajorizationReport:
    """Test ``x ≺ y``: prefix sums of ``x↓`` below those of ``y↓``, equal totals."""
    xs, ys = _prepare(x, y)
    return _compare(xs, ys, tol, "strong", True)


def is_weakly_majorized(x, y, tol: float = DEFAULT_TOL) -> MajorizationReport:
    """Test ``x ≺_w y`` (weak majorization from below)."""
    xs, ys = _prepare(x, y)
    return _compare(xs, ys, tol, "weak", False)


def is_log_majorized(x, y, tol: float = DEFAULT_TOL) -> MajorizationReport:
    """Test ``x ≺_log y`` for strictly positive vectors.

    The comparison runs on logarithms, so ``tol`` acts as a relative tolerance
    on prefix products (``log1p(tol)`` in log space).
    """
    xs, ys = _prepare(x, y)
    if xs.size and (xs[-1] <= POSITIVITY_FLOOR or ys[-1] <= POSITIVITY_FLOOR):
        raise NonPositiveEntryError("log-majorization needs strictly positive entries")
    return _compare(np.log(xs), np.log(ys), np.log1p(tol), "log", True)
