"""Command-line interface: ``framegeo check|soliton|classify|report|random-audit``.

Exit codes: 0 when every verdict passes, 1 when one fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import audit
from .errors import FrameGeoError
from .expr import parse, to_text
from .report import (
    KENMOTSU_CHECKS,
    PointJob,
    assemble,
    check_verdicts,
    joint_soliton,
    max_defects,
    render_json,
    render_text,
    run_points,
)
from .specfile import resolve, sample_points

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="verdict threshold on defects (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    common.add_argument("--degree", type=int, default=4, help="jet truncation degree (default 4)")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-point work (default 1)")

    manifold = argparse.ArgumentParser(add_help=False, parents=[common])
    manifold.add_argument("spec", help="builtin name or path to a spec file")
    manifold.add_argument("--points", type=int, default=5, help="sampled points when the spec lists none (default 5)")
    manifold.add_argument("--mode", choices=("rational", "float"), default="float")

    soliton_opts = argparse.ArgumentParser(add_help=False)
    soliton_opts.add_argument(
        "--potential", default="xi", help="'xi' or comma-separated frame components of V in the chart coordinates"
    )
    soliton_opts.add_argument("--mu-zero", action="store_true", help="fit a plain Ricci soliton (mu = 0)")

    ap = argparse.ArgumentParser(prog="framegeo", description="Frame-based curvature and Kenmotsu soliton workbench.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[manifold], help="curvature identities and Kenmotsu conditions")
    sub.add_parser("soliton", parents=[manifold, soliton_opts], help="fit an eta-Ricci soliton")
    sub.add_parser("classify", parents=[manifold, soliton_opts], help="Ricci-tensor conditions and space forms")
    sub.add_parser("report", parents=[manifold, soliton_opts], help="everything, per point")
    ra = sub.add_parser("random-audit", parents=[common], help="fuzz universal identities on random frames")
    ra.add_argument("--count", type=int, default=100, help="number of random frames (default 100)")
    return ap


def _potential(args, spec):
    if args.potential == "xi":
        if spec.contact is None:
            raise FrameGeoError(f"{spec.name} has no contact structure; give --potential components")
        return None
    comps = [c for c in args.potential.split(",")]
    if len(comps) != spec.dim:
        raise FrameGeoError(f"--potential needs {spec.dim} comma-separated components")
    return tuple(parse(c.strip(), spec.chart) for c in comps)


def run_manifold(args) -> dict:
    spec = resolve(args.spec)
    exact = args.mode == "rational"
    points = sample_points(spec, args.points, args.seed)
    cmd = args.command
    want_soliton = cmd == "soliton" or (cmd == "report" and (spec.contact is not None or args.potential != "xi"))
    potential = _potential(args, spec) if want_soliton or cmd == "classify" and spec.contact else None
    mu_mode = "frozen_zero" if getattr(args, "mu_zero", False) else "free"
    jobs = [
        PointJob(
            spec,
            p,
            args.degree,
            exact,
            args.tol,
            checks=cmd in ("check", "report"),
            soliton=want_soliton,
            classification=cmd in ("classify", "report"),
            potential=potential,
            mu_mode=mu_mode,
        )
        for p in points
    ]
    results = run_points(jobs, args.jobs)
    records = [r for r, _ in results]

    header = {
        "command": cmd,
        "manifold": spec.name,
        "frame_mode": spec.frame.mode,
        "mode": args.mode,
        "degree": args.degree,
        "tol": args.tol,
    }
    if want_soliton:
        header["potential"] = "xi" if potential is None else ", ".join(to_text(e) for e in potential)
    aggregate = {}
    verdicts = {}
    if cmd in ("check", "report"):
        aggregate["max_check_defects"] = max_defects(records, "checks")
        verdicts.update(check_verdicts(records, args.tol))
    if want_soliton:
        rows = [rows for _, rows in results]
        aggregate["soliton"] = joint_soliton(rows, points, mu_mode, exact, args.tol)
        if cmd == "soliton":
            verdicts["soliton"] = aggregate["soliton"]["global_soliton"]
    if cmd == "classify":
        aggregate["max_classification_defects"] = max_defects(records, "classification")
        if spec.contact is not None:
            verdicts["kenmotsu"] = all(check_verdicts(records, args.tol, KENMOTSU_CHECKS).values())
        if spec.dim == 3:
            verdicts["rr_qsr"] = all(r["classification"]["rr_qsr_defect"] <= args.tol for r in records)
        aggregate["properties"] = _properties(records, args.tol)
    if cmd == "report" and spec.dim == 3:
        aggregate["max_classification_defects"] = max_defects(records, "classification")
        aggregate["properties"] = _properties(records, args.tol)
    return assemble(header, records, aggregate, verdicts)


def _properties(records, tol) -> dict:
    """Classification outcomes; informative, they do not drive the exit code."""
    def holds(key):
        vals = [r["classification"][key] for r in records]
        return None if any(v is None for v in vals) else all(v <= tol for v in vals)

    labels = {r["classification"]["label"] for r in records}
    return {
        "codazzi": holds("codazzi_defect"),
        "cyclic_parallel": holds("cyclic_defect"),
        "phi_ricci_symmetric": holds("phi_ricci_defect"),
        "einstein": holds("einstein_defect"),
        "space_form": labels.pop() if len(labels) == 1 else None,
    }


def run_audit(args) -> dict:
    start = time.perf_counter()
    tasks = [(args.seed, k, args.degree) for k in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            frames = list(pool.map(audit.audit_frame, tasks))
    else:
        frames = [audit.audit_frame(t) for t in tasks]
    worst = {}
    for f in frames:
        for k, v in f["defects"].items():
            worst[k] = max(worst.get(k, 0.0), v)
    verdicts = {k: worst[k] <= thr for k, thr in audit.THRESHOLDS.items() if k in worst}
    report = {
        "command": "random-audit",
        "seed": args.seed,
        "count": args.count,
        "degree": args.degree,
        "thresholds": dict(audit.THRESHOLDS),
        "frames": frames,
        "aggregate": {"max_defects": worst, "seconds": time.perf_counter() - start},
        "verdicts": verdicts,
    }
    report["passed"] = all(verdicts.values())
    return report


def _render_audit_text(report) -> str:
    lines = [f"random-audit: {report['count']} frames, seed {report['seed']}, degree {report['degree']}"]
    for k, v in report["aggregate"]["max_defects"].items():
        thr = report["thresholds"].get(k)
        status = "" if thr is None else ("  pass" if v <= thr else "  FAIL") + f" (<= {thr:g})"
        lines.append(f"  {k:<28} max {v:.3e}{status}")
    lines.append(f"  elapsed {report['aggregate']['seconds']:.2f} s")
    lines.append("result: " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "random-audit":
            report = run_audit(args)
            text = render_json(report) if args.json else _render_audit_text(report)
        else:
            report = run_manifold(args)
            text = render_json(report) if args.json else render_text(report)
    except (FrameGeoError, OSError, ValueError) as exc:
        print(f"framegeo: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
