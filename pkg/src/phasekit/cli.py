"""Command-line front end.

Every command writes a JSON report (to ``--out`` or stdout) and a one-line
summary to stderr. When ``--out`` is given, figures are rendered next to the
report as ``<stem>.<name>.png`` unless ``--no-figures`` is passed.

Exit codes: 0 ok, 1 property violation, 2 parse error, 3 not sectorial,
4 domain error, 5 infeasible.
"""

from __future__ import annotations

import argparse
import sys
import time
from math import degrees, pi
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    ConeSpec,
    adversarial_B,
    cone_membership,
    mixed_margin_check,
    rank_margin,
    rank_status,
    sample_sum_cone,
)
from .completion import complete, decompose_banded
from .errors import (
    BadOrderError,
    BranchAmbiguityError,
    BranchError,
    DegenerateConeError,
    InfeasibleAlphaError,
    InfeasibleWindowError,
    NonFiniteError,
    NonSquareError,
    NotBandedError,
    NotInConeError,
    NotRealError,
    NotSectorialError,
    PhasesOutOfRangeError,
    PhasekitError,
    RangeConditionError,
    SpreadTooWideError,
    ZeroMatrixError,
)
from .generators import as_rng, default_seed
from .io import (
    MatrixParseError,
    dumps_report,
    file_digest,
    read_matrix,
    read_partial,
    write_matrix,
)
from .linalg import general_eig
from .numrange import boundary_trace, classify_sector, supporting_rays
from .phases import (
    gcf,
    phases,
    phases_via_inverse_conjugate,
    real_sectorial,
    sectorial_decomposition,
    spd,
)
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_NOT_SECTORIAL = 3
EXIT_DOMAIN = 4
EXIT_INFEASIBLE = 5

_EXIT_FOR = (
    (MatrixParseError, EXIT_PARSE),
    (NonFiniteError, EXIT_PARSE),
    (NotSectorialError, EXIT_NOT_SECTORIAL),
    (InfeasibleWindowError, EXIT_INFEASIBLE),
    (NotInConeError, EXIT_INFEASIBLE),
    (PhasesOutOfRangeError, EXIT_DOMAIN),
    (BranchError, EXIT_DOMAIN),
    (BranchAmbiguityError, EXIT_DOMAIN),
    (SpreadTooWideError, EXIT_DOMAIN),
    (InfeasibleAlphaError, EXIT_DOMAIN),
    (DegenerateConeError, EXIT_DOMAIN),
    (NotBandedError, EXIT_DOMAIN),
    (NotRealError, EXIT_DOMAIN),
    (NonSquareError, EXIT_DOMAIN),
    (ZeroMatrixError, EXIT_DOMAIN),
    (BadOrderError, EXIT_DOMAIN),
    (RangeConditionError, EXIT_DOMAIN),
)


class _Context:
    """Shared report plumbing for one invocation."""

    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.t0 = time.perf_counter()

    def angle(self, x) -> str:
        if self.args.degrees:
            return f"{degrees(x):.6g}°"
        return f"{x:.6g}"

    def angles(self, xs) -> str:
        return "[" + ", ".join(self.angle(x) for x in np.asarray(xs, dtype=float)) + "]"

    def figure_path(self, name: str):
        out = self.args.out
        if out is None or self.args.no_figures:
            return None
        out = Path(out)
        return out.with_name(f"{out.stem}.{name}.png")

    def emit(self, outputs: dict, *, inputs=(), seed=None, tolerances=None,
             verdicts=None, figures=None, summary: str = "") -> None:
        report = {
            "command": self.command,
            "version": __version__,
            "inputs_digest": file_digest(*inputs) if inputs else None,
            "seed": seed,
            "tolerances": tolerances or {},
            "outputs": outputs,
            "verdicts": verdicts or {},
        }
        if figures:
            report["figures"] = [str(Path(f).name) for f in figures]
        if self.args.timings:
            report["timings"] = {"total_s": time.perf_counter() - self.t0}
        text = dumps_report(report, hexfloat=self.args.hexfloat)
        if self.args.out:
            Path(self.args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if summary:
            print(summary, file=sys.stderr)


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_phases(args) -> int:
    ctx = _Context(args, "phases")
    C = read_matrix(args.file)
    info = classify_sector(C) if np.any(C) else None
    if info is None or not info.sectorial:
        ctx.emit({"sectorial": False}, inputs=[args.file],
                 summary="not sectorial: 0 lies in the numerical range")
        return EXIT_NOT_SECTORIAL
    fn = phases if args.method == "congruence" else phases_via_inverse_conjugate
    pv = fn(C, theta=args.theta, info=info)
    eig = np.sort_complex(general_eig(C).values)
    figs = []
    path = ctx.figure_path("phases")
    if path is not None:
        from .plotting import plot_phases
        ea = pv.theta + np.mod(np.angle(eig) - pv.theta, 2 * pi)
        plot_phases(pv.phases, ea, path=path)
        figs.append(path)
    outputs = {
        "sectorial": True,
        "method": args.method,
        "phases": pv.phases,
        "theta": pv.theta,
        "gamma_star": info.gamma_star,
        "phi_max": info.phi_max,
        "phi_min": info.phi_min,
        "field_angle": info.field_angle,
        "accretivity": info.accretivity,
    }
    ctx.emit(outputs, inputs=[args.file], tolerances={"sector_tol": info.sector_tol},
             figures=figs, summary=f"phases {ctx.angles(pv.phases)}")
    return EXIT_OK


def _residual(C, R) -> float:
    return float(np.linalg.norm(C - R) / max(np.linalg.norm(C), 1e-300))


def cmd_decomp(args) -> int:
    ctx = _Context(args, "decomp")
    C = read_matrix(args.file)
    factors = {}
    if args.kind == "sectorial":
        d = sectorial_decomposition(C)
        factors = {"T": d.T, "D": d.D}
        rec = d.T.conj().T @ d.D @ d.T
        extra = {"phases": d.phases}
    elif args.kind == "spd":
        s = spd(C)
        factors = {"P": s.P, "U": s.U}
        rec = s.P @ s.U @ s.P
        extra = {}
    elif args.kind == "gcf":
        g = gcf(C)
        factors = {"R": g.R, "W": g.W}
        rec = g.R.conj().T @ g.W @ g.R
        extra = {}
    else:
        r = real_sectorial(C)
        factors = {"T": r.T, "D": r.D, "P": r.P, "U": r.U, "R": r.R, "W": r.W}
        rec = r.T.T @ r.D @ r.T
        extra = {"block_angles": r.block_angles, "negated": r.negated,
                 "spd_residual": _residual(C, r.P @ r.U @ r.P),
                 "gcf_residual": _residual(C, r.R.T @ r.W @ r.R)}
    written = []
    if args.factors_dir:
        outdir = Path(args.factors_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, M in factors.items():
            p = outdir / f"{args.kind}.{name}.json"
            write_matrix(p, M, hexfloat=args.hexfloat)
            written.append(p.name)
    res = _residual(C, rec)
    outputs = dict(kind=args.kind, residual=res, factor_files=written, **extra)
    if not args.factors_dir:
        outputs["factors"] = factors
    ctx.emit(outputs, inputs=[args.file], summary=f"{args.kind}: relative residual {res:.3g}")
    return EXIT_OK


def cmd_numrange(args) -> int:
    ctx = _Context(args, "numrange")
    C = read_matrix(args.file)
    trace = boundary_trace(C, args.samples)
    info = classify_sector(C) if np.any(C) else None
    sectorial = info is not None and info.sectorial
    radius = 1.15 * float(np.abs(trace.points).max())
    plot = {
        "points": [[float(z.real), float(z.imag)] for z in trace.points],
        "phi_max": info.phi_max if sectorial else None,
        "phi_min": info.phi_min if sectorial else None,
        "supporting_rays": supporting_rays(info, radius) if sectorial else [],
        "eigenvalues": np.sort_complex(general_eig(C).values),
    }
    if args.plot_out:
        Path(args.plot_out).write_text(dumps_report(plot, hexfloat=args.hexfloat))
    figs = []
    path = ctx.figure_path("numrange")
    if path is not None:
        from .plotting import plot_numerical_range
        plot_numerical_range(trace.points, plot["eigenvalues"], plot["phi_max"],
                             plot["phi_min"], path=path)
        figs.append(path)
    outputs = dict(plot, sectorial=sectorial,
                   gamma_star=info.gamma_star if sectorial else None,
                   field_angle=info.field_angle if sectorial else None)
    if sectorial:
        summary = f"supporting rays at {ctx.angle(info.phi_max)} and {ctx.angle(info.phi_min)}"
    else:
        summary = "not sectorial: 0 lies in the numerical range"
    ctx.emit(outputs, inputs=[args.file], figures=figs, summary=summary)
    return EXIT_OK if sectorial else EXIT_NOT_SECTORIAL


def cmd_margin(args) -> int:
    ctx = _Context(args, "margin")
    A = read_matrix(args.file)
    n = A.shape[0]
    if not 1 <= args.k <= n:
        raise BadOrderError(f"k={args.k} must satisfy 1 ≤ k ≤ {n}")
    m = rank_margin(A, args.k)
    seed = _seed(args)
    outputs = {
        "k": m.k,
        "phases": m.phases,
        "phase_margin_alpha": m.phase_margin_alpha,
        "magnitude_margin_gamma": m.magnitude_margin_gamma,
        "binding_side": m.binding_side,
    }
    verdicts = {}
    code = EXIT_OK
    alpha = m.phase_margin_alpha - args.backoff
    if args.trials > 0 and alpha >= 0:
        rng = as_rng(seed)
        drops = indet = 0
        I = np.eye(n)
        for _ in range(args.trials):
            B, _ = sample_sum_cone(rng, n, args.k, alpha)
            st = rank_status(I + A @ B)
            drops += st.singular_values[n - args.k] <= 1e-8
            indet += st.indeterminate > 0
        verdicts["sampled_alpha"] = alpha
        verdicts["sampled_trials"] = args.trials
        verdicts["sampled_rank_drops"] = int(drops)
        verdicts["sampled_indeterminate"] = int(indet)
        if drops:
            code = EXIT_VIOLATION
    if args.emit_adversary:
        B, a = adversarial_B(A, args.k, strict=False)
        st = rank_status(np.eye(n) + A @ B)
        write_matrix(args.emit_adversary, B, hexfloat=args.hexfloat)
        outputs["adversary"] = {"file": Path(args.emit_adversary).name, "alpha": a,
                                "rank": st.rank, "dropped": st.dropped}
    if args.gamma is not None or args.alpha is not None:
        g = args.gamma if args.gamma is not None else 0.5 * m.magnitude_margin_gamma
        al = args.alpha if args.alpha is not None else 0.0
        mm = mixed_margin_check(A, g, al, trials=args.trials, seed=seed)
        outputs["mixed"] = {"gamma": g, "alpha": al, "verdict": mm.verdict,
                            "gamma_limit": mm.gamma_limit, "alpha_limit": mm.alpha_limit,
                            "violations": mm.violations, "construction": mm.construction}
        if mm.verdict and mm.violations:
            code = EXIT_VIOLATION
    ctx.emit(outputs, inputs=[args.file], seed=seed, verdicts=verdicts,
             tolerances={"drop": 1e-8, "keep": 1e-6, "backoff": args.backoff},
             summary=f"phase margin {ctx.angle(m.phase_margin_alpha)}, "
                     f"magnitude margin {m.magnitude_margin_gamma:.6g} ({m.binding_side})")
    return code


def cmd_complete(args) -> int:
    ctx = _Context(args, "complete")
    partial = read_partial(args.file)
    try:
        C = complete(partial)
    except InfeasibleWindowError as exc:
        ctx.emit({"window": exc.window, "lower_phase": exc.lower_phase,
                  "upper_phase": exc.upper_phase}, inputs=[args.file],
                 verdicts={"feasible": False}, summary=f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    if args.matrix_out:
        write_matrix(args.matrix_out, C, hexfloat=args.hexfloat)
    memb = cone_membership(C, ConeSpec.interval(partial.alpha, partial.beta))
    outputs = {"matrix": C, "cone_slack": memb.slack, "strict": memb.strict}
    ctx.emit(outputs, inputs=[args.file], verdicts={"feasible": True, "in_cone": memb.member},
             tolerances={"membership": 1e-7},
             summary=f"completed {C.shape[0]}×{C.shape[1]}, cone slack {memb.slack:.3g}")
    return EXIT_OK if memb.member else EXIT_VIOLATION


def cmd_split(args) -> int:
    ctx = _Context(args, "split")
    C = read_matrix(args.file)
    sizes = [int(s) for s in args.block_sizes.split(",")] if args.block_sizes else [1] * C.shape[0]
    try:
        dec = decompose_banded(C, sizes, args.p, args.alpha, args.beta)
    except NotInConeError as exc:
        ctx.emit({}, inputs=[args.file], verdicts={"in_cone": False},
                 summary=f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    files = []
    if args.parts_dir:
        outdir = Path(args.parts_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for part in dec.parts:
            p = outdir / f"part{part.offset}.json"
            write_matrix(p, part.core, hexfloat=args.hexfloat)
            files.append(p.name)
    residual = float(np.abs(dec.total() - C).max())
    parts = [{"offset": part.offset, "core": part.core} for part in dec.parts]
    ctx.emit({"parts": parts, "part_files": files, "sum_residual": residual},
             inputs=[args.file], summary=f"{len(parts)} parts, sum residual {residual:.3g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    ctx = _Context(args, "verify")
    seed = _seed(args)
    rep = run_suite(args.suite, trials=args.trials, seed=seed, n=args.n, tol=args.tol,
                    generator=args.generator)
    lines = []
    for p in rep.properties:
        worst = "n/a" if not np.isfinite(p.worst_slack) else f"{p.worst_slack:.3g}"
        lines.append(f"{p.name}: {p.passes}/{p.trials} pass, worst slack {worst}"
                     + (f", {p.skipped} skipped" if p.skipped else ""))
    for c in rep.controls:
        state = "skipped" if c.skipped else ("fails as required" if c.exhibited else "NOT exhibited")
        lines.append(f"control {c.name}: {state}")
    if rep.reproducers:
        path = Path(args.reproducer)
        path.write_text(dumps_report({"reproducers": rep.reproducers}, hexfloat=args.hexfloat))
        lines.append(f"reproducers written to {path}")
    ctx.emit(rep.to_dict(), seed=seed, tolerances={"property": args.tol},
             verdicts={"passed": rep.passed}, summary="\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here (default: stdout)")
    common.add_argument("--degrees", action="store_true",
                        help="show angles in degrees in the summary (reports stay in radians)")
    common.add_argument("--hexfloat", action="store_true",
                        help="write numbers as hex floats for bit-exact round trips")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (reports are then not reproducible)")
    common.add_argument("--no-figures", action="store_true",
                        help="do not render figures next to the report")

    parser = argparse.ArgumentParser(prog="phasekit",
                                     description="Phases of sectorial matrices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phases", parents=[common], help="phases of a sectorial matrix")
    p.add_argument("file")
    p.add_argument("--theta", type=float, default=None,
                   help="anchor of the branch interval (theta, theta + π)")
    p.add_argument("--method", choices=("congruence", "inverse-conjugate"),
                   default="congruence")
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("decomp", parents=[common], help="sectorial, SPD, GCF or real factors")
    p.add_argument("file")
    p.add_argument("--kind", choices=("sectorial", "spd", "gcf", "real"), default="sectorial")
    p.add_argument("--factors-dir", help="write each factor as a matrix file here")
    p.set_defaults(func=cmd_decomp)

    p = sub.add_parser("numrange", parents=[common], help="boundary of the numerical range")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--plot-out", help="write plot data {points, phi_max, phi_min, ...} here")
    p.set_defaults(func=cmd_numrange)

    p = sub.add_parser("margin", parents=[common], help="rank-robustness margins")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--trials", type=int, default=0,
                   help="sampled perturbations inside the backed-off phase cone")
    p.add_argument("--backoff", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--emit-adversary", metavar="PATH",
                   help="write the rank-dropping adversarial B here")
    p.add_argument("--gamma", type=float, default=None, help="magnitude bound for the mixed check")
    p.add_argument("--alpha", type=float, default=None, help="phase bound for the mixed check")
    p.set_defaults(func=cmd_margin)

    p = sub.add_parser("complete", parents=[common], help="banded completion in C[α, β]")
    p.add_argument("file", help="banded partial matrix JSON")
    p.add_argument("--matrix-out", help="write the completed matrix here")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("split", parents=[common], help="banded decomposition in C[α, β]")
    p.add_argument("file")
    p.add_argument("--p", type=int, required=True, help="bandwidth in blocks")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--block-sizes", help="comma-separated block sizes (default: all 1)")
    p.add_argument("--parts-dir", help="write each core as a matrix file here")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("verify", parents=[common], help="randomized property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=None, help="fix the matrix size")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--generator", choices=("sectorial", "pd"), default="sectorial",
                   help="matrix pairs for the product suite")
    p.add_argument("--reproducer", default="phasekit-reproducer.json",
                   help="where to write failing instances")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PhasekitError as exc:
        for cls, code in _EXIT_FOR:
            if isinstance(exc, cls):
                print(f"phasekit {args.command}: {exc}", file=sys.stderr)
                return code
        print(f"phasekit {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
