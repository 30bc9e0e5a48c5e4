"""Lie derivative of the metric and eta-Ricci soliton fitting.

The soliton equation checked here is

    (L_V g)(X, Y) + 2 S(X, Y) + 2 lam g(X, Y) + 2 mu eta(X) eta(Y) = 0.

(lam, mu) are fitted by least squares over the independent components
``i <= j`` at each point.  They are constants by definition, so a fit over
several points also reports the spread of the pointwise solutions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

import numpy as np

from .contact import evaluate_contact
from .errors import RankDeficientFit
from .frame import CurvaturePack, FramePointData, maxabs, values, vector_field_derivative
from .jet import Jet


def _vector_jets(V, fd: FramePointData):
    out = []
    for v in V:
        if isinstance(v, Jet):
            out.append(v)
        elif isinstance(v, Real):
            out.append(fd.const(v))
        else:
            out.append(fd.evaluate(v))
    return out


def potential_jets(V, cs, fd: FramePointData):
    """Frame components of the potential field as jets; ``V=None`` means xi."""
    if V is None:
        if cs is None:
            raise ValueError("the default potential xi needs a contact structure")
        return list(evaluate_contact(cs, fd).xi)
    return _vector_jets(V, fd)


def lie_derivative_metric(V, fd: FramePointData, pack: CurvaturePack) -> np.ndarray:
    """``(L_V g)[a, b] = g(nabla_a V, e_b) + g(e_a, nabla_b V)`` as jets."""
    n = fd.dim
    dV = vector_field_derivative(_vector_jets(V, fd), fd, pack.gamma)
    out = np.empty((n, n), dtype=object)
    for a, b in itertools.product(range(n), repeat=2):
        if fd.orthonormal:
            out[a, b] = dV[a, b] + dV[b, a]
        else:
            val = fd.const(0)
            for i in range(n):
                val = val + dV[a, i] * fd.g[i, b] + dV[b, i] * fd.g[a, i]
            out[a, b] = val
    return out


@dataclass(frozen=True)
class _Rows:
    """Least-squares data for one point: ``target = lam * col_g + mu * col_eta``."""

    target: list
    col_g: list
    col_eta: list


def soliton_rows(V, cs, fd: FramePointData, pack: CurvaturePack) -> _Rows:
    """Least-squares rows of one point (picklable, for merging fits across workers)."""
    n = fd.dim
    L = values(lie_derivative_metric(potential_jets(V, cs, fd), fd, pack))
    S, g = values(pack.ricci), values(fd.g)
    if cs is not None:
        eta = values(evaluate_contact(cs, fd).eta)
    else:
        eta = np.zeros(n, dtype=object if fd.exact else float)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    return _Rows(
        target=[-(L[i, j] + 2 * S[i, j]) for i, j in pairs],
        col_g=[2 * g[i, j] for i, j in pairs],
        col_eta=[2 * eta[i] * eta[j] for i, j in pairs],
    )


def soliton_residual(lam, mu, V, cs, fd: FramePointData, pack: CurvaturePack):
    """Max-abs over ``i <= j`` of the soliton equation's left-hand side."""
    rows = soliton_rows(V, cs, fd, pack)
    return maxabs(
        np.array(
            [lam * g + mu * e - t for t, g, e in zip(rows.target, rows.col_g, rows.col_eta)],
            dtype=object,
        )
    )


@dataclass(frozen=True)
class PointFit:
    point: tuple
    lam: object
    mu: object
    residual_max: object
    residual_rms: object


@dataclass(frozen=True)
class SolitonFit:
    lam: object
    mu: object
    residual_max: object
    residual_rms: object
    mu_mode: str = "free"
    per_point: tuple[PointFit, ...] = field(default=())
    spread: object = 0

    def kind(self, tol: float = 0.0) -> str:
        if abs(self.lam) <= tol:
            return "steady"
        return "shrinking" if self.lam < 0 else "expanding"

    def proper(self, tol: float = 0.0) -> bool:
        return abs(self.mu) > tol

    def is_soliton(self, tol: float) -> bool:
        return self.residual_max <= tol and self.spread <= tol

    def describe(self, tol: float = 0.0) -> str:
        return f"{self.kind(tol)}, {'proper' if self.proper(tol) else 'not proper'}"


def _solve(rows_list: list[_Rows], mu_mode: str, exact: bool):
    target = [t for r in rows_list for t in r.target]
    cg = [x for r in rows_list for x in r.col_g]
    ce = [x for r in rows_list for x in r.col_eta]
    gg = sum(a * a for a in cg)
    gb = sum(a * b for a, b in zip(cg, target))
    zero = Fraction(0) if exact else 0.0
    if mu_mode == "frozen_zero":
        if gg == 0 or (not exact and gg < 1e-300):
            raise RankDeficientFit("metric column vanishes")
        lam, mu = gb / gg, zero
    else:
        ee = sum(a * a for a in ce)
        ge = sum(a * b for a, b in zip(cg, ce))
        eb = sum(a * b for a, b in zip(ce, target))
        d = gg * ee - ge * ge
        if d == 0 or (not exact and abs(d) <= 1e-12 * max(gg * ee, 1e-300)):
            raise RankDeficientFit("eta(x)eta is parallel to g; (lam, mu) are not separately determined")
        lam = (gb * ee - eb * ge) / d
        mu = (gg * eb - ge * gb) / d
    res = [lam * a + mu * b - t for a, b, t in zip(cg, ce, target)]
    rmax = maxabs(np.array(res, dtype=object))
    mean_sq = sum(x * x for x in res) / len(res)
    rms = _sqrt(mean_sq, exact)
    return lam, mu, rmax, rms


def _sqrt(x, exact: bool):
    """Square root that stays exact when a Fraction is a perfect square."""
    if exact:
        x = Fraction(x)
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
    return math.sqrt(x)


def fit_soliton(V, cs, fd: FramePointData, pack: CurvaturePack, mu_mode: str = "free") -> SolitonFit:
    """Least-squares (lam, mu) at one point; ``mu_mode='frozen_zero'`` fits a plain Ricci soliton."""
    return fit_soliton_points([(V, cs, fd, pack)], mu_mode)


def fit_soliton_points(items, mu_mode: str = "free") -> SolitonFit:
    """Joint fit over several ``(V, cs, fd, pack)`` items, plus per-point fits and their spread."""
    items = list(items)
    exact = all(fd.exact for _, _, fd, _ in items)
    rows = [soliton_rows(V, cs, fd, pack) for V, cs, fd, pack in items]
    return fit_from_rows(rows, [fd.point for _, _, fd, _ in items], mu_mode, exact)


def fit_from_rows(rows: list[_Rows], points, mu_mode: str = "free", exact: bool = False) -> SolitonFit:
    """Same as :func:`fit_soliton_points` from precomputed least-squares rows."""
    if mu_mode not in ("free", "frozen_zero"):
        raise ValueError(f"unknown mu_mode {mu_mode!r}")
    per_point = []
    for r, point in zip(rows, points):
        lam, mu, rmax, rms = _solve([r], mu_mode, exact)
        per_point.append(PointFit(tuple(point), lam, mu, rmax, rms))
    lam, mu, rmax, rms = _solve(rows, mu_mode, exact)
    spread = 0
    for p, q in itertools.combinations(per_point, 2):
        spread = max(spread, abs(p.lam - q.lam) + abs(p.mu - q.mu))
    return SolitonFit(lam, mu, rmax, rms, mu_mode, tuple(per_point), spread)


def soliton_from_scalar(r):
    """(lam, mu) forced on a Kenmotsu 3-manifold with potential xi and scalar curvature r."""
    half = Fraction(1, 2) if isinstance(r, (int, Fraction)) else 0.5
    return -(r + 2) * half - 1, (r + 6) * half + 1


def ricci_from_fit(lam, mu, g, eta):
    """Ricci tensor implied by a soliton with potential xi: ``-(lam+1) g - (mu-1) eta (x) eta``."""
    return -(lam + 1) * np.asarray(g) - (mu - 1) * np.outer(eta, eta)
