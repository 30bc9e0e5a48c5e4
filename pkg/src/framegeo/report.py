"""Per-point report records, their JSON serialization and text rendering.

A report is one plain dict; JSON and text are both rendered from it so the
two never disagree.  Exact values are written as ``"p/q"`` strings, floats
with 17 significant digits, so ``parse_json(render_json(r)) == r``.
"""

from __future__ import annotations

import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classify import classify
from .contact import check_3d_closed_forms, check_almost_contact, check_kenmotsu, check_kenmotsu_curvature
from .frame import compute, identity_suite, values
from .soliton import SolitonFit, fit_from_rows, soliton_rows
from .specfile import ManifoldSpec

REPORT_KEYS = ("point", "gamma", "riemann", "ricci", "scalar_curvature", "checks", "soliton", "classification")
# string fields that must never be read back as numbers
TEXT_KEYS = frozenset({"manifold", "command", "mode", "kind", "label", "mu_mode", "potential", "frame_mode", "space_form"})

KENMOTSU_CHECKS = ("phi_squared", "eta_xi", "phi_xi", "eta_phi", "compatibility", "nabla_phi", "nabla_xi", "nabla_eta")


# -- scalar normalization -------------------------------------------------------------
def scalar(x, exact: bool):
    """Python Fraction (exact) or float for any numeric scalar."""
    if exact and isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool):
        return Fraction(x)
    return float(x)


def tree(arr, exact: bool):
    """Nested lists of normalized scalars from a value array."""
    arr = np.asarray(arr, dtype=object)
    if arr.ndim == 0:
        return scalar(arr.item(), exact)
    return [tree(a, exact) for a in arr]


# -- per-point work -------------------------------------------------------------------
@dataclass(frozen=True)
class PointJob:
    spec: ManifoldSpec
    point: tuple
    degree: int
    exact: bool
    tol: float
    checks: bool = True
    soliton: bool = False
    classification: bool = False
    potential: tuple | None = None  # frame components as Expr; None means xi
    mu_mode: str = "free"


def _fit_dict(fit: SolitonFit, exact: bool, tol: float) -> dict:
    return {
        "lambda": scalar(fit.lam, exact),
        "mu": scalar(fit.mu, exact),
        "residual_max": scalar(fit.residual_max, exact),
        "residual_rms": scalar(fit.residual_rms, exact),
        "mu_mode": fit.mu_mode,
        "kind": fit.kind(tol),
        "proper": bool(fit.proper(tol)),
    }


def run_point(job: PointJob):
    """Compute one point's record; returns ``(record, soliton_rows or None)``."""
    spec, ex = job.spec, job.exact
    fd, pack = compute(spec.frame, job.point, job.degree, ex)
    cs = spec.contact
    rec = {
        "point": [scalar(v, ex) for v in job.point],
        "structure": tree(values(fd.c), ex),
        "gamma": tree(values(pack.gamma), ex),
        "riemann": tree(values(pack.riem), ex),
        "ricci": tree(values(pack.ricci), ex),
        "scalar_curvature": scalar(pack.scalar.value, ex),
        "checks": None,
        "soliton": None,
        "classification": None,
    }
    checks = {}
    if job.checks or job.classification:
        if job.checks:
            checks.update(identity_suite(pack, fd))
        if cs is not None:
            checks.update(check_almost_contact(cs, fd))
            checks.update(check_kenmotsu(cs, fd, pack))
            if job.checks:
                checks.update(check_kenmotsu_curvature(cs, fd, pack))
                if fd.dim == 3:
                    checks.update(check_3d_closed_forms(cs, fd, pack))
        rec["checks"] = {k: scalar(v, ex) for k, v in checks.items()}

    rows = None
    pointwise = None
    if job.soliton or (job.classification and cs is not None):
        rows = soliton_rows(job.potential, cs, fd, pack)
        pointwise = fit_from_rows([rows], [job.point], job.mu_mode, ex)
        if job.soliton:
            rec["soliton"] = _fit_dict(pointwise, ex, job.tol)

    if job.classification:
        rep = classify(pack, fd, cs, pointwise, job.tol)
        sf = rep.space_form
        opt = lambda v: None if v is None else scalar(v, ex)  # noqa: E731
        rec["classification"] = {
            "codazzi_defect": scalar(rep.codazzi_defect, ex),
            "cyclic_defect": scalar(rep.cyclic_defect, ex),
            "phi_ricci_defect": opt(rep.phi_ricci_defect),
            "rr_qsr_defect": scalar(rep.rr_qsr_defect, ex),
            "einstein_defect": scalar(rep.einstein_defect, ex),
            "nabla_s_closed_form_defect": opt(rep.nabla_s_closed_form_defect),
            "kappa": None if sf is None else scalar(sf.kappa, ex),
            "space_form_defect": None if sf is None else scalar(sf.defect, ex),
            "label": None if sf is None else sf.label(job.tol),
        }
    return rec, rows


def run_points(jobs: list[PointJob], workers: int = 1):
    """Run jobs in order; ``workers > 1`` spreads them over processes."""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_point, jobs))
    return [run_point(j) for j in jobs]


# -- verdicts -------------------------------------------------------------------------
def check_verdicts(records, tol: float, names=None) -> dict[str, bool]:
    out = {}
    for rec in records:
        for name, v in (rec["checks"] or {}).items():
            if names is None or name in names:
                out[name] = out.get(name, True) and v <= tol
    return out


def max_defects(records, section: str) -> dict:
    out = {}
    for rec in records:
        for name, v in (rec[section] or {}).items():
            if not name.endswith("defect") and section == "classification":
                continue
            if v is None:
                continue
            out[name] = v if name not in out else max(out[name], v)
    return out


def joint_soliton(rows, points, mu_mode: str, exact: bool, tol: float) -> dict:
    fit = fit_from_rows(rows, points, mu_mode, exact)
    d = _fit_dict(fit, exact, tol)
    d["spread"] = scalar(fit.spread, exact)
    d["global_soliton"] = bool(fit.is_soliton(tol))
    return d


def assemble(header: dict, records: list[dict], aggregate: dict, verdicts: dict[str, bool]) -> dict:
    report = dict(header)
    report["points"] = records
    report["aggregate"] = aggregate
    report["verdicts"] = verdicts
    report["passed"] = all(verdicts.values())
    return report


# -- JSON -----------------------------------------------------------------------------
def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _write(obj, out: list[str], indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, Fraction):
        out.append(f'"{obj.numerator}/{obj.denominator}"')
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(str(k)) + ": ")
            _write(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(not isinstance(v, (list, tuple, dict)) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                out.append(", " if i else "")
                _write(v, out, indent, level + 1)
            out.append("]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append(("," if i else "") + pad)
            _write(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(report: dict, indent: int = 2) -> str:
    out: list[str] = []
    _write(report, out, indent, 0)
    return "".join(out) + "\n"


_RATIONAL = re.compile(r"-?\d+/\d+")


def _decode(obj, key=None):
    if isinstance(obj, dict):
        return {k: _decode(v, k) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v, key) for v in obj]
    if isinstance(obj, str) and key not in TEXT_KEYS and _RATIONAL.fullmatch(obj):
        return Fraction(obj)
    return obj


def parse_json(text: str) -> dict:
    return _decode(json.loads(text))


# -- text -----------------------------------------------------------------------------
def _num(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return format(x, ".6g")
    return str(x)


def _matrix(rows) -> list[str]:
    cells = [[_num(v) for v in row] for row in rows]
    width = max(len(c) for row in cells for c in row)
    return ["[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells]


def _table(d: dict, indent: str) -> list[str]:
    width = max(len(k) for k in d)
    return [f"{indent}{k.ljust(width)}  {_num(v)}" for k, v in d.items()]


def render_text(report: dict) -> str:
    lines = []
    head = ", ".join(f"{k} {_num(report[k])}" for k in ("mode", "degree", "tol") if k in report)
    lines.append(f"{report.get('command', 'report')} {report.get('manifold', '?')} ({head})")
    for rec in report["points"]:
        lines.append("")
        lines.append("point (" + ", ".join(_num(v) for v in rec["point"]) + ")")
        if report.get("command") == "report":
            lines.append("  ricci")
            lines.extend("    " + m for m in _matrix(rec["ricci"]))
        lines.append(f"  scalar curvature  {_num(rec['scalar_curvature'])}")
        for section in ("checks", "soliton", "classification"):
            if rec.get(section):
                lines.append(f"  {section}")
                lines.extend(_table(rec[section], "    "))
    agg = report.get("aggregate") or {}
    if agg:
        lines.append("")
        lines.append("aggregate")
        for key, val in agg.items():
            if isinstance(val, dict) and val:
                lines.append(f"  {key}")
                lines.extend(_table(val, "    "))
            elif not isinstance(val, dict):
                lines.append(f"  {key}  {_num(val)}")
    if report["verdicts"]:
        lines.append("")
        lines.append("verdicts")
        width = max(len(k) for k in report["verdicts"])
        for k, ok in report["verdicts"].items():
            lines.append(f"  {k.ljust(width)}  {'pass' if ok else 'FAIL'}")
    lines.append("")
    lines.append("result: " + ("PASS" if report["passed"] else "FAIL"))
    return "\n".join(lines) + "\n"
