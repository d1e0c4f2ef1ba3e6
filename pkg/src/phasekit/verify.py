"""Randomized property suites for the phase inequalities.

Each suite draws seeded random instances, evaluates one or more inequalities
per instance, and tallies passes, violations and the worst slack. Every
trial has its own generator seeded from ``(seed, suite, property, trial)``,
so a violation can be replayed from the reproducer record alone.

Negative controls are inequalities that are known to fail in general. A
suite reports them as satisfied only when a failing instance was found.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import pi

import numpy as np

from .analysis import (
    ConeSpec,
    adversarial_B,
    compress,
    cone_membership,
    extremal_phase_sums,
    hadamard_phase_bounds,
    kronecker_phases,
    product_phase_check,
    rank_margin,
    rank_status,
    sample_sum_cone,
    schur_complement,
)
from .compound import compound, verify_inclusions
from .errors import BranchAmbiguityError, NotSectorialError, SpreadTooWideError
from .generators import (
    complex_gaussian,
    random_pd,
    random_sectorial,
    sectorial_from_phases,
)
from .majorization import is_majorized
from .phases import eigenphases, phases

SUITES = ("interlacing", "product", "cones", "compound", "kron-hadamard")
DEFAULT_TOL = 1e-7
EXTREMAL_TOL = 1e-8
CONTROL_BUDGET = 400

#: 4×4 matrix whose Hadamard product with ``I`` breaks any majorization-type
#: relation between ``φ(A ⊙ I)`` and ``φ(A) + φ(I)``.
HADAMARD_EXAMPLE = np.array([
    [3 - 2j, 1 - 2j, 1, 1 + 1j],
    [1 - 2j, 2, -1j, -1j],
    [1, -1j, 1 + 3j, 3j],
    [1 + 1j, -1j, 3j, 1 + 4j],
])


@dataclass
class PropertyTally:
    name: str
    trials: int = 0
    passes: int = 0
    violations: int = 0
    skipped: int = 0
    worst_slack: float = float("inf")

    def record(self, ok: bool, slack: float):
        self.trials += 1
        if ok:
            self.passes += 1
        else:
            self.violations += 1
        if np.isfinite(slack):
            self.worst_slack = min(self.worst_slack, float(slack))


@dataclass
class ControlResult:
    """A relation that must fail on at least one instance."""

    name: str
    searched: int = 0
    failed_at: int | None = None
    slack: float | None = None
    skipped: bool = False

    @property
    def exhibited(self) -> bool:
        return self.failed_at is not None


@dataclass
class VerifyReport:
    suite: str
    trials: int
    seed: int
    n: int | None
    tol: float
    properties: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    reproducers: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(p.violations for p in self.properties)

    @property
    def passed(self) -> bool:
        controls_ok = all(c.skipped or c.exhibited for c in self.controls)
        return self.violations == 0 and controls_ok

    def to_dict(self) -> dict:
        def clean(d):
            return {k: (None if isinstance(v, float) and not np.isfinite(v) else v)
                    for k, v in d.items()}
        return {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "n": self.n,
            "tol": self.tol,
            "passed": self.passed,
            "violations": self.violations,
            "properties": [clean(asdict(p)) for p in self.properties],
            "controls": [dict(clean(asdict(c)), exhibited=c.exhibited) for c in self.controls],
        }


def _rng(seed: int, *keys) -> np.random.Generator:
    words = [int(seed) & 0xFFFFFFFF]
    for k in keys:
        if isinstance(k, str):
            words.append(sum((i + 1) * ord(ch) for i, ch in enumerate(k)) & 0xFFFFFFFF)
        else:
            words.append(int(k) & 0xFFFFFFFF)
    return np.random.default_rng(words)


class _Runner:
    def __init__(self, suite, trials, seed, n, tol):
        self.report = VerifyReport(suite, trials, seed, n, tol)
        self.trials, self.seed, self.n, self.tol = trials, seed, n, tol

    def size(self, rng, lo=2, hi=6):
        return self.n if self.n is not None else int(rng.integers(lo, hi + 1))

    def tally(self, name) -> PropertyTally:
        t = PropertyTally(name)
        self.report.properties.append(t)
        return t

    def run(self, name, body):
        """``body(rng) -> (ok, slack, inputs) or None`` (``None`` marks a skip)."""
        t = self.tally(name)
        for trial in range(self.trials):
            rng = _rng(self.seed, self.report.suite, name, trial)
            try:
                out = body(rng)
            except (BranchAmbiguityError, SpreadTooWideError):
                out = None
            if out is None:
                t.skipped += 1
                continue
            ok, slack, inputs = out
            t.record(ok, slack)
            if not ok:
                self.report.reproducers.append({
                    "property": name, "suite": self.report.suite, "seed": self.seed,
                    "trial": trial, "slack": float(slack), "inputs": inputs,
                })
        return t

    def control(self, name, body, budget=CONTROL_BUDGET):
        """``body(rng) -> slack or None``; negative slack exhibits the failure."""
        c = ControlResult(name)
        self.report.controls.append(c)
        if self.trials == 0:
            c.skipped = True
            return c
        for trial in range(budget):
            rng = _rng(self.seed, self.report.suite, name, trial)
            slack = body(rng)
            c.searched += 1
            if slack is not None and slack < -self.tol:
                c.failed_at = trial
                c.slack = float(slack)
                break
        return c


def _window(rng, width_max=pi - 0.1):
    width = rng.uniform(0.05, width_max)
    lo = rng.uniform(-pi + 0.05, pi - 0.05 - width)
    return lo, lo + width


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_interlacing(r: _Runner):
    tol = r.tol

    def eig_major(rng):
        n = r.size(rng)
        lo, hi = _window(rng)
        C, _ = random_sectorial(rng, n, lo, hi)
        pv = phases(C)
        ang = eigenphases(C, theta=pv.theta)
        rep = is_majorized(ang, pv.phases, tol)
        return rep.holds, rep.slack, {"C": C}

    def comp(rng):
        n = r.size(rng)
        k = int(rng.integers(1, n))
        C, _ = random_sectorial(rng, n, *_window(rng))
        X = complex_gaussian(rng, n, n - k)
        res = compress(C, X, tol)
        return res.holds, res.slack, {"C": C, "X": X}

    def schur(rng):
        n = r.size(rng)
        k = int(rng.integers(1, n))
        C, _ = random_sectorial(rng, n, *_window(rng))
        res = schur_complement(C, k, tol)
        return res.holds, res.slack, {"C": C, "k": k}

    def extremal(rng):
        n = r.size(rng)
        k = int(rng.integers(1, n + 1))
        C, _ = random_sectorial(rng, n, *_window(rng))
        ex = extremal_phase_sums(C, k)
        slack = np.inf
        for _ in range(4):
            X = complex_gaussian(rng, n, k)
            s = phases(X.conj().T @ C @ X, theta=ex.theta).phases.sum()
            slack = min(slack, ex.max_sum - s, s - ex.min_sum)
        attained_max = phases(ex.X_max.conj().T @ C @ ex.X_max, theta=ex.theta).phases.sum()
        attained_min = phases(ex.X_min.conj().T @ C @ ex.X_min, theta=ex.theta).phases.sum()
        gap = max(abs(attained_max - ex.max_sum), abs(attained_min - ex.min_sum))
        ok = slack >= -EXTREMAL_TOL and gap <= EXTREMAL_TOL
        return ok, min(slack, -gap), {"C": C, "k": k}

    r.run("eigenphase-majorization", eig_major)
    r.run("compression-interlacing", comp)
    r.run("schur-interlacing", schur)
    r.run("extremal-phase-sums", extremal)

    def entrywise(rng):
        n = r.size(rng, 3, 6)
        C, _ = random_sectorial(rng, n, *_window(rng))
        pv = phases(C)
        ang = eigenphases(C, theta=pv.theta)
        return float(np.min(pv.phases - ang))

    r.control("eigenphase-entrywise-bound", entrywise)


def _product_phase_bounds(A, B):
    """Margins of ``φ(AB) ≺ φ(A) + φ(B)`` (``None`` when ``AB`` is not sectorial)."""
    try:
        ph = phases(A @ B).phases
    except NotSectorialError:
        return None
    total = phases(A).phases + phases(B).phases
    for m in (0, -1, 1):
        rep = is_majorized(ph + 2 * pi * m, total)
        if rep.holds:
            return rep.slack
    return is_majorized(ph, total).slack


def _suite_product(r: _Runner, generator: str = "sectorial"):
    tol = r.tol

    def draw(rng, n):
        if generator == "pd":
            return random_pd(rng, n), random_pd(rng, n)
        A, _ = random_sectorial(rng, n, *_window(rng))
        B, _ = random_sectorial(rng, n, *_window(rng))
        return A, B

    def prod(rng):
        n = r.size(rng)
        A, B = draw(rng, n)
        res = product_phase_check(A, B, tol)
        return res.report.holds, res.report.slack, {"A": A, "B": B}

    r.run("product-eigenangle-majorization", prod)

    def pd_phase_major(rng):
        n = r.size(rng, 2, 6)
        A = np.eye(n) + 0.3 * random_pd(rng, n, 0.0) / n
        B = np.eye(n) + 0.3 * random_pd(rng, n, 0.0) / n
        return _product_phase_bounds(A, B)

    def entrywise(rng):
        n = r.size(rng, 3, 6)
        A, _ = random_sectorial(rng, n, *_window(rng))
        pv = phases(A)
        ang = eigenphases(A, theta=pv.theta)
        return float(np.min(pv.phases - ang))

    r.control("product-phase-majorization-pd-pair", pd_phase_major)
    r.control("product-eigenangle-entrywise-bound", entrywise)


def _suite_cones(r: _Runner):
    tol = r.tol

    def closure(rng):
        n = r.size(rng)
        alpha, beta = _window(rng)
        A = sectorial_from_phases(rng, rng.uniform(alpha, beta, n))
        B = sectorial_from_phases(rng, rng.uniform(alpha, beta, n))
        spec = ConeSpec.interval(alpha, beta)
        ma = cone_membership(A, spec, tol)
        mb = cone_membership(B, spec, tol)
        if not (ma.member and mb.member):
            return None
        m = cone_membership(A + B, spec, tol)
        return m.member, m.slack, {"A": A, "B": B, "alpha": alpha, "beta": beta}

    def margin_sufficiency(rng):
        n = r.size(rng, 2, 6)
        k = int(rng.integers(1, min(n, 2) + 1))
        A, _ = random_sectorial(rng, n, *_window(rng))
        alpha = rank_margin(A, k).phase_margin_alpha - 0.05
        if alpha < 0:
            return None
        worst = np.inf
        I = np.eye(n)
        for _ in range(4):
            B, _ = sample_sum_cone(rng, n, k, alpha)
            s = rank_status(I + A @ B).singular_values
            worst = min(worst, s[n - k] - 1e-8)
        return worst > 0, worst, {"A": A, "k": k, "alpha": alpha}

    def margin_adversary(rng):
        n = r.size(rng, 2, 6)
        k = int(rng.integers(1, min(n, 2) + 1))
        A, _ = random_sectorial(rng, n, *_window(rng))
        B, _ = adversarial_B(A, k, strict=False)
        st = rank_status(np.eye(n) + A @ B)
        ok = st.dropped == k and st.indeterminate == 0
        return ok, 0.0 if ok else -1.0, {"A": A, "k": k}

    r.run("sum-cone-closure", closure)
    r.run("rank-margin-sufficiency", margin_sufficiency)
    r.run("rank-margin-adversary", margin_adversary)


def _suite_compound(r: _Runner):
    tol = r.tol

    def binet(rng):
        n = r.size(rng, 2, 4)
        k = int(rng.integers(1, n + 1))
        A = complex_gaussian(rng, n)
        B = complex_gaussian(rng, n)
        lhs = compound(A @ B, k).matrix
        rhs = compound(A, k).matrix @ compound(B, k).matrix
        res = np.abs(lhs - rhs).max() / max(np.abs(rhs).max(), 1e-300)
        return res <= 1e-9, 1e-9 - res, {"A": A, "B": B, "k": k}

    def inclusions(rng):
        n = r.size(rng, 2, 4)
        k = int(rng.integers(1, n + 1))
        A = complex_gaussian(rng, n)
        B, _ = random_sectorial(rng, n, *_window(rng))
        rep = verify_inclusions(A, B, k, trials=2, seed=int(rng.integers(2**31)), tol=tol)
        worst = max(rep.prod_inv, rep.spectrum, rep.prod_range, rep.compression_identity)
        return rep.passed, tol - worst, {"A": A, "B": B, "k": k}

    r.run("binet-cauchy", binet)
    r.run("compound-inclusions", inclusions)


def _suite_kron_hadamard(r: _Runner):
    tol = r.tol

    def pair(rng, n, m):
        w = rng.uniform(0.1, pi - 0.15)
        w1 = rng.uniform(0.0, w)
        lo1 = rng.uniform(-1.0, 1.0)
        lo2 = rng.uniform(-1.0, 1.0)
        A = sectorial_from_phases(rng, np.sort(rng.uniform(lo1, lo1 + w1, n))[::-1])
        B = sectorial_from_phases(rng, np.sort(rng.uniform(lo2, lo2 + (w - w1), m))[::-1])
        return A, B

    def kron(rng):
        n = r.size(rng, 2, 3) if r.n is None else min(r.n, 3)
        m = int(rng.integers(2, 4))
        A, B = pair(rng, n, m)
        kp = kronecker_phases(A, B)
        return kp.max_error <= tol, tol - kp.max_error, {"A": A, "B": B}

    def hada(rng):
        n = r.size(rng)
        A, B = pair(rng, n, n)
        hb = hadamard_phase_bounds(A, B, tol)
        return hb.holds, hb.slack, {"A": A, "B": B}

    r.run("kronecker-phase-sums", kron)
    r.run("hadamard-endpoint-bounds", hada)

    def hadamard_major(rng):
        hb = hadamard_phase_bounds(HADAMARD_EXAMPLE, np.eye(4))
        return is_majorized(hb.phases, hb.phase_sum).slack

    r.control("hadamard-majorization", hadamard_major, budget=1)


_SUITE_FUNCS = {
    "interlacing": _suite_interlacing,
    "product": _suite_product,
    "cones": _suite_cones,
    "compound": _suite_compound,
    "kron-hadamard": _suite_kron_hadamard,
}


def run_suite(suite: str = "all", trials: int = 100, seed: int = 0, n: int | None = None,
              tol: float = DEFAULT_TOL, generator: str = "sectorial") -> VerifyReport:
    """Run one suite (or ``"all"``) and collect tallies, controls and reproducers.

    ``n`` fixes the matrix size where the property allows it; by default sizes
    are drawn from ``2 … 6`` (``2 … 4`` for compound checks). ``generator``
    set to ``"pd"`` draws positive definite pairs in the product suite.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    if n is not None and n < 2:
        raise ValueError("n must be at least 2")
    names = SUITES if suite == "all" else (suite,)
    for s in names:
        if s not in _SUITE_FUNCS:
            raise ValueError(f"unknown suite {s!r}")
    r = _Runner(suite, trials, seed, n, tol)
    for s in names:
        r.report.suite = s
        if s == "product":
            _SUITE_FUNCS[s](r, generator)
        else:
            _SUITE_FUNCS[s](r)
    r.report.suite = suite
    return r.report


__all__ = [
    "SUITES",
    "HADAMARD_EXAMPLE",
    "PropertyTally",
    "ControlResult",
    "VerifyReport",
    "run_suite",
]
