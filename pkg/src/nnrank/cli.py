"""Command-line front end: ``nnrank <command> ...``.

Every command prints one JSON document on stdout and a short human summary
on stderr.  The exit status is 0 exactly when the report status is ``pass``,
1 on ``fail`` and 2 on ``error`` (including usage errors).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import boundprop, nestedgeom, numnmf, paperdata, typeclass
from .exactnum import SQRT2, Number, format_entry, parse_entry
from .linalg import ExactMatrix, format_matrix, read_matrix

SCHEMA_VERSION = 1
EXIT = {"pass": 0, "fail": 1, "error": 2}


def num(x: Number) -> dict[str, Any]:
    return {"exact": format_entry(x), "approx": float(x)}


def point(p: Sequence[Number]) -> list[dict[str, Any]]:
    return [num(c) for c in p]


@dataclass
class Check:
    id: str
    description: str
    status: str
    defect: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.id, "description": self.description, "status": self.status, "defect": self.defect}


@dataclass
class RunReport:
    command: str
    checks: list[Check] = field(default_factory=list)
    result: dict[str, Any] = field(default_factory=dict)
    timing_ms: float = 0.0
    error: str | None = None

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "pass" if all(c.status == "pass" for c in self.checks) else "fail"

    def add(self, cid: str, description: str, ok: bool, defect: str | None = None) -> None:
        self.checks.append(Check(cid, description, "pass" if ok else "fail", None if ok else defect))

    def run(self, cid: str, description: str, fn: Callable[[], tuple[bool, str | None]]) -> None:
        """Record a check, turning exceptions into a failed entry."""
        try:
            ok, defect = fn()
        except Exception as exc:  # reported, not raised
            ok, defect = False, f"{type(exc).__name__}: {exc}"
        self.add(cid, description, ok, defect)

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": self.status,
            "checks": [c.to_dict() for c in self.checks],
            "timing_ms": round(self.timing_ms, 3),
        }
        if self.result:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        return out


def parse_number(text: str) -> Fraction:
    """Entry grammar (rational only) or a decimal literal such as ``1e-6``."""
    try:
        v = parse_entry(text)
    except ValueError:
        return Fraction(text)
    if not isinstance(v, Fraction):
        raise ValueError(f"expected a rational number, got {text!r}")
    return v


def apply_mutation(pc: paperdata.PaperConstants, spec: str) -> paperdata.PaperConstants:
    """``NAME:i,j:DELTA`` adds DELTA to entry (i, j) (1-based) of a matrix."""
    try:
        name, pos, delta = spec.split(":")
        i, j = (int(t) for t in pos.split(","))
    except ValueError as exc:
        raise ValueError(f"mutation must look like W:1,2:+1e-6, got {spec!r}") from exc
    names = ("Mprime", "Weps", "W", "Hprime", "Heps")
    if name not in names:
        raise ValueError(f"can only mutate one of {', '.join(names)}")
    A: ExactMatrix = getattr(pc, name)
    if not (1 <= i <= A.rows and 1 <= j <= A.cols):
        raise ValueError(f"entry ({i},{j}) is outside {name} ({A.rows}x{A.cols})")
    return pc.replace(**{name: A.with_entry(i - 1, j - 1, A[i - 1, j - 1] + parse_number(delta))})


def load_table(path: str | None, eps: Fraction) -> paperdata.ConstraintTable:
    if path is None:
        return paperdata.figure4_constraints(eps)
    return paperdata.ConstraintTable.from_csv(Path(path).read_text(encoding="utf-8"))


# commands


def cmd_verify(args: argparse.Namespace, report: RunReport) -> None:
    pc = paperdata.constants()
    for m in args.mutate or ():
        pc = apply_mutation(pc, m)
    eps = parse_number(args.eps) if args.eps else paperdata.EPSILON
    table = load_table(args.constraints, eps)

    cert = paperdata.verify_certificate(pc, table)
    for c in cert.checks:
        report.add(f"certificate.{c.id}", c.description, c.passed, c.defect)

    u_star = 2 - SQRT2
    q_xy, q_xz = nestedgeom.qstar_2d("xy"), nestedgeom.qstar_2d("xz")

    def threshold(check, u, verdict, vertices=None):
        def fn():
            res = check(u)
            ok = res.verdict == verdict and res.consistent
            if vertices is not None:
                ok = ok and res.vertices == vertices
            return ok, f"verdict {res.verdict} with {res.vertex_count} vertices"
        return fn

    report.run("lemma41.threshold", "face z=0 from (2-sqrt2, 0): triangle q1* q3* q2*",
               threshold(nestedgeom.lemma41_threshold_check, u_star, "three_vertices", (q_xy[1], q_xy[3], q_xy[2])))
    report.run("lemma41.quadrilateral", "face z=0 from (1/8, 0): more than three vertices",
               threshold(nestedgeom.lemma41_threshold_check, Fraction(1, 8), "more_than_three"))
    report.run("lemma42.threshold", "face y=0 from (2-sqrt2, 0): triangle q1* q5* q4*",
               threshold(nestedgeom.lemma42_threshold_check, u_star, "three_vertices", (q_xz[1], q_xz[5], q_xz[4])))
    report.run("lemma42.quadrilateral", "face y=0 from (7/8, 0): more than three vertices",
               threshold(nestedgeom.lemma42_threshold_check, Fraction(7, 8), "more_than_three"))

    excl = nestedgeom.exclude_types_2_3()
    for tag, inst in zip(("type2", "type3"), excl.instances):
        report.add(f"exclusion.{tag}", f"{inst.name}: no apex contains {', '.join(inst.required)}",
                   (not inst.feasible) and inst.certificate_valid,
                   None if inst.witness is None else f"feasible apex {inst.witness.format()}")

    def uniqueness():
        u = nestedgeom.verify_type1_uniqueness()
        return u.passed, f"{len(u.counterexamples)} nesting samples"
    report.run("uniqueness.type1", "supporting triangles from q1* are unique on the sampled facets", uniqueness)

    def replay():
        try:
            out = boundprop.replay_type4_proof(table, eps)
        except boundprop.ProofAssertionError as exc:
            report.result["proof_failed_step"] = exc.step
            return False, str(exc)
        return out.contradiction_in_all_branches, None
    report.run("replay.type4", "type-4 refutation replays with a contradiction in every branch", replay)
    report.result["certificate_ms"] = round(cert.elapsed_ms, 3)


def cmd_constants(args: argparse.Namespace, report: RunReport) -> None:
    mats = paperdata.constants().matrices()
    if args.action == "dump":
        for name, A in mats.items():
            sys.stdout.write(f"# {name}\n{format_matrix(A)}\n")
        report.result["matrices"] = list(mats)
        report.add("constants.dump", "all constant matrices written", True)
    else:
        bad = [n for n in paperdata.GOLDEN_NAMES if paperdata.load_golden(n) != mats[n]]
        report.add("constants.golden", "bundled matrix files equal the built-in constants", not bad, ", ".join(bad) or None)


def cmd_classify(args: argparse.Namespace, report: RunReport) -> None:
    L = read_matrix(args.matrix)
    prof = typeclass.classify(L)
    report.result["profile"] = prof.to_dict()
    report.add("classify", "profile computed", True)


def _support_dict(res: nestedgeom.SupportResult) -> dict[str, Any]:
    return {"vertices": [point(v) for v in res.vertices], "closed": res.closed, "vertex_count": res.vertex_count}


def cmd_geometry(args: argparse.Namespace, report: RunReport) -> None:
    inner, outer = nestedgeom.inner_triangle(args.plane), nestedgeom.face_polygon(args.plane)
    check = nestedgeom.lemma41_threshold_check if args.plane == "xy" else nestedgeom.lemma42_threshold_check
    if args.sweep:
        a, b, n = parse_number(args.sweep[0]), parse_number(args.sweep[1]), int(args.sweep[2])
        if n < 1:
            raise ValueError("sweep needs at least one point")
        rows = []
        for k in range(n):
            u = a if n == 1 else a + (b - a) * Fraction(k, n - 1)
            res = check(u)
            rows.append({"u": num(u), "verdict": res.verdict, "vertex_count": res.vertex_count,
                         "algebraic_verdict": res.algebraic_verdict})
        report.result["sweep"] = rows
        report.add("geometry.sweep", f"{n} starts on plane {args.plane}", True)
        return
    start = parse_entry(args.start)
    res = nestedgeom.supporting_polygon(inner, outer, (start, Fraction(0)))
    report.result["support"] = _support_dict(res)
    if args.verbose:
        for v in res.vertices:
            sys.stderr.write(f"  {v.format()}\n")
    report.add("geometry.support", f"supporting polygon from ({args.start}, 0)", True)


def cmd_propagate(args: argparse.Namespace, report: RunReport) -> None:
    eps = parse_number(args.eps) if args.eps else paperdata.EPSILON
    table = load_table(args.constraints, eps)
    if args.mode == "fixpoint":
        out = boundprop.fixpoint(table)
        report.result["fixpoint"] = out.to_dict()
        report.add("propagate.fixpoint", "blind fixpoint reaches a contradiction", out.contradiction is not None,
                   f"stopped after {out.firings} firings without contradiction")
        return
    try:
        proof = boundprop.replay_type4_proof(table, eps)
    except boundprop.ProofAssertionError as exc:
        report.result["failed_step"] = exc.step
        report.result["trace"] = [f.to_dict() for f in exc.trace]
        report.add("propagate.script", "scripted refutation", False, str(exc))
        return
    report.result["proof"] = proof.to_dict()
    report.add("propagate.script", "scripted refutation", proof.contradiction_in_all_branches)


def cmd_nmf(args: argparse.Namespace, report: RunReport) -> None:
    V = read_matrix(args.matrix) if args.matrix else paperdata.constants().M
    seed = numnmf.default_seed() if args.seed is None else args.seed
    cfg = numnmf.SolveConfig(args.dim, max_iters=args.max_iters, restarts=args.restarts, seed=seed)
    res = numnmf.nmf_solve(V, cfg)
    hist = res.history
    step = max(1, len(hist) // 100)
    report.result.update({
        "best_residual": res.residual,
        "best_restart": res.best_restart,
        "restart_residuals": [float(x) for x in res.residuals],
        "history": [float(x) for x in hist[::step]],
        "history_stride": step,
        "seed": seed,
    })
    report.add("nmf.solve", f"best residual {res.residual:.3e}", True)
    if args.compare_w:
        al = numnmf.align_to_reference(res.W, paperdata.constants().W)
        report.result["alignment"] = {"permutation": list(al.permutation), "scalings": list(al.scalings),
                                      "max_abs_deviation": al.max_abs_deviation}


COMMANDS = {
    "verify": cmd_verify,
    "constants": cmd_constants,
    "classify": cmd_classify,
    "geometry": cmd_geometry,
    "propagate": cmd_propagate,
    "nmf": cmd_nmf,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit with status 2 via SystemExit
        self.print_usage(sys.stderr)
        self.exit(EXIT["error"], f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nnrank", description="Exact checks of a nonnegative-rank separation certificate.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run every machine check")
    v.add_argument("--mutate", action="append", metavar="NAME:i,j:DELTA", help="perturb one constant entry")
    v.add_argument("--constraints", metavar="CSV", help="constraint table (row,col,kind,bound)")
    v.add_argument("--eps", help="epsilon for the default table and the proof thresholds")

    c = sub.add_parser("constants", help="print or check the constant matrices")
    c.add_argument("action", choices=("dump", "check"))

    k = sub.add_parser("classify", help="zero-pattern profile of a 6-row left factor")
    k.add_argument("--matrix", required=True)

    g = sub.add_parser("geometry", help="supporting polygons on a face")
    g.add_argument("--plane", choices=("xy", "xz"), required=True)
    mode = g.add_mutually_exclusive_group(required=True)
    mode.add_argument("--start", help="x-coordinate of the start point on the base edge")
    mode.add_argument("--sweep", nargs=3, metavar=("A", "B", "N"))
    g.add_argument("--verbose", action="store_true")

    pr = sub.add_parser("propagate", help="bound propagation for type-4 factorizations")
    pr.add_argument("--constraints", metavar="CSV")
    pr.add_argument("--mode", choices=("script", "fixpoint"), default="script")
    pr.add_argument("--eps")

    n = sub.add_parser("nmf", help="numerical multiplicative-update NMF")
    n.add_argument("--matrix", help="matrix file (default: M)")
    n.add_argument("--dim", type=int, required=True)
    n.add_argument("--restarts", type=int, default=32)
    n.add_argument("--max-iters", type=int, default=50_000)
    n.add_argument("--seed", type=int, default=None)
    n.add_argument("--compare-w", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    report = RunReport(args.command)
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, report)
    except (OSError, ValueError, ArithmeticError) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
    report.timing_ms = (time.perf_counter() - t0) * 1000
    if args.command != "constants" or args.action != "dump":
        json.dump(report.to_dict(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    failed = [c for c in report.checks if c.status != "pass"]
    sys.stderr.write(f"{args.command}: {report.status} ({len(report.checks) - len(failed)}/{len(report.checks)} checks)\n")
    for c in failed:
        sys.stderr.write(f"  FAIL {c.id}: {c.defect}\n")
    if report.error:
        sys.stderr.write(f"  ERROR {report.error}\n")
    return EXIT[report.status]


if __name__ == "__main__":
    sys.exit(main())
