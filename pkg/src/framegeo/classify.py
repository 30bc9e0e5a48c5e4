"""Conditions on the Ricci tensor and curvature used to classify Kenmotsu 3-manifolds.

Each check returns a continuous defect (max-abs frame component); verdicts
are thresholded later so the same numbers serve float and exact runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contact import evaluate_contact
from .errors import DimensionMismatch, SolitonPrereqFailed
from .frame import CurvaturePack, FramePointData, covariant_derivative, maxabs, values
from .soliton import SolitonFit


def nabla_ricci(pack: CurvaturePack, fd: FramePointData) -> np.ndarray:
    """``out[a, b, c] = (nabla_{e_a} S)(e_b, e_c)`` as point values."""
    return values(covariant_derivative(pack.ricci, fd, pack.gamma))


def codazzi_defect(pack: CurvaturePack, fd: FramePointData):
    dS = nabla_ricci(pack, fd)
    return maxabs(dS - np.transpose(dS, (1, 0, 2)))


def cyclic_parallel_defect(pack: CurvaturePack, fd: FramePointData):
    dS = nabla_ricci(pack, fd)
    # dS[i,j,k] + dS[j,k,i] + dS[k,i,j]
    return maxabs(dS + np.transpose(dS, (2, 0, 1)) + np.transpose(dS, (1, 2, 0)))


def nabla_s_closed_form(mu, g, eta) -> np.ndarray:
    """``out[z, x, y] = -(mu - 1)[g(x,z) eta(y) + g(y,z) eta(x) - 2 eta(x) eta(y) eta(z)]``."""
    n = len(eta)
    out = np.empty((n, n, n), dtype=object if isinstance(mu, Fraction) else float)
    for z, x, y in itertools.product(range(n), repeat=3):
        out[z, x, y] = -(mu - 1) * (g[x, z] * eta[y] + g[y, z] * eta[x] - 2 * eta[x] * eta[y] * eta[z])
    return out


def nabla_s_closed_form_check(pack: CurvaturePack, cs, fd: FramePointData, fit: SolitonFit | None, tol: float = 1e-8):
    """Compare the computed covariant derivative of S with its form for a soliton with constant mu."""
    if cs is None:
        raise SolitonPrereqFailed("no contact structure supplied, so eta is undefined")
    if fit is None or fit.residual_max > tol:
        raise SolitonPrereqFailed("the soliton fit does not hold at this point")
    eta, g = values(evaluate_contact(cs, fd).eta), values(fd.g)
    return maxabs(nabla_ricci(pack, fd) - nabla_s_closed_form(fit.mu, g, eta))


def nabla_ricci_operator(pack: CurvaturePack, fd: FramePointData, path: str = "direct") -> np.ndarray:
    """``out[a, i, j] = (nabla_{e_a} Q)^i_j``.

    ``direct`` differentiates Q as a (1,1) tensor; ``raised`` raises the
    first covariant slot of nabla S.  Both must agree.
    """
    if path == "direct":
        return values(covariant_derivative(pack.ricci_op, fd, pack.gamma, n_up=1))
    if path == "raised":
        dS = nabla_ricci(pack, fd)
        gi = values(fd.g_inv)
        return np.einsum("im,amj->aij", gi, dS)
    raise ValueError(f"unknown path {path!r}")


def phi_ricci_defect(pack: CurvaturePack, cs, fd: FramePointData, path: str = "direct"):
    """Max-abs component of ``phi^2((nabla_{e_a} Q) e_j)``."""
    phi = values(evaluate_contact(cs, fd).phi)
    dQ = nabla_ricci_operator(pack, fd, path)
    return maxabs(np.einsum("lm,amj->alj", phi @ phi, dQ))


def wedge_endomorphism(A, X, Y, Z) -> np.ndarray:
    """``(X ^_A Y) Z = A(Y, Z) X - A(X, Z) Y`` for frame component vectors."""
    A = np.asarray(A)
    X, Y, Z = np.asarray(X), np.asarray(Y), np.asarray(Z)
    return (Y @ A @ Z) * X - (X @ A @ Z) * Y


def _derivation(B: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Action of the endomorphism ``B[l, k]`` on a (0,4) tensor: ``-sum_s T(.., B X_s, ..)``."""
    es = np.einsum
    return -(
        es("ma,mbcd->abcd", B, T) + es("mb,amcd->abcd", B, T) + es("mc,abmd->abcd", B, T) + es("md,abcm->abcd", B, T)
    )


def rr_qsr_tensors(pack: CurvaturePack) -> tuple[np.ndarray, np.ndarray]:
    """``(R(X,Y).R)(U,V,W,Z)`` and ``((X ^_S Y).R)(U,V,W,Z)`` on all frame tuples.

    Both act as derivations on the (0,4) curvature ``g(R(U,V)W, Z)``; arrays are
    indexed ``[x, y, u, v, w, z]``.
    """
    R, Rl, S = values(pack.riem), values(pack.riem_low), values(pack.ricci)
    n = S.shape[0]
    shape = (n,) * 6
    lhs = np.empty(shape, dtype=Rl.dtype)
    rhs = np.empty(shape, dtype=Rl.dtype)
    for x, y in itertools.product(range(n), repeat=2):
        curv = R[:, :, x, y]
        wedge = np.empty((n, n), dtype=S.dtype)
        for l, k in itertools.product(range(n), repeat=2):
            # (e_x ^_S e_y) e_k = S(e_y, e_k) e_x - S(e_x, e_k) e_y
            wedge[l, k] = S[y, k] * int(l == x) - S[x, k] * int(l == y)
        lhs[x, y] = _derivation(curv, Rl)
        rhs[x, y] = _derivation(wedge, Rl)
    return lhs, rhs


def rr_qsr_defect(pack: CurvaturePack, fd: FramePointData | None = None):
    """Max-abs component of ``R.R - Q(S,R)``; vanishes identically in dimension 3."""
    lhs, rhs = rr_qsr_tensors(pack)
    return maxabs(lhs - rhs)


def rr_qsr_endomorphism_defect(pack: CurvaturePack):
    """Same condition with both sides applied to the (1,3) tensor ``R(U,V)W`` term by term.

    The two readings agree for the curvature side (``R(X,Y)`` is skew) but not
    for ``X ^_S Y``, so this one is not a universal identity in dimension 3.
    Indexed ``[x, y, u, v, w, l]``.
    """
    R, S = values(pack.riem), values(pack.ricci)
    n = S.shape[0]
    ident = np.eye(n, dtype=int).astype(S.dtype)
    es = np.einsum
    lhs = (
        es("lmxy,mwuv->xyuvwl", R, R)
        - es("muxy,lwmv->xyuvwl", R, R)
        - es("mvxy,lwum->xyuvwl", R, R)
        - es("mwxy,lmuv->xyuvwl", R, R)
    )
    rhs = (
        es("ym,mwuv,lx->xyuvwl", S, R, ident)
        - es("xm,mwuv,ly->xyuvwl", S, R, ident)
        - es("yu,lwxv->xyuvwl", S, R)
        + es("xu,lwyv->xyuvwl", S, R)
        - es("yv,lwux->xyuvwl", S, R)
        + es("xv,lwuy->xyuvwl", S, R)
        - es("yw,lxuv->xyuvwl", S, R)
        + es("xw,lyuv->xyuvwl", S, R)
    )
    return maxabs(lhs - rhs)


@dataclass(frozen=True)
class SpaceForm:
    kappa: object
    defect: object
    einstein_defect: object

    def label(self, tol: float = 1e-8) -> str | None:
        if self.defect > tol:
            return None
        if abs(self.kappa + 1) <= tol:
            return "H(-1)"
        if abs(self.kappa) <= tol:
            return "flat"
        return f"constant curvature {float(self.kappa):g}"


def space_form_detect(pack: CurvaturePack, fd: FramePointData) -> SpaceForm:
    """Sectional-curvature constant ``r / (n(n-1))`` and how far R is from that space form."""
    n = fd.dim
    if n != 3:
        raise DimensionMismatch("space-form detection is implemented for dimension 3")
    r = pack.scalar.value
    kappa = r / (n * (n - 1))
    g, Rl, S = values(fd.g), values(pack.riem_low), values(pack.ricci)
    # R(X,Y)Z = kappa [g(Y,Z) X - g(X,Z) Y]  =>  R_ijkl = kappa (g_jk g_il - g_ik g_jl)
    model = kappa * (np.einsum("jk,il->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))
    return SpaceForm(kappa, maxabs(Rl - model), maxabs(S - (r / n) * g))


@dataclass(frozen=True)
class ClassificationReport:
    codazzi_defect: object
    cyclic_defect: object
    phi_ricci_defect: object | None
    rr_qsr_defect: object
    einstein_defect: object
    space_form: SpaceForm | None
    nabla_s_closed_form_defect: object | None = None

    def verdicts(self, tol: float) -> dict[str, bool]:
        out = {
            "codazzi": self.codazzi_defect <= tol,
            "cyclic_parallel": self.cyclic_defect <= tol,
            "rr_qsr": self.rr_qsr_defect <= tol,
            "einstein": self.einstein_defect <= tol,
        }
        if self.phi_ricci_defect is not None:
            out["phi_ricci_symmetric"] = self.phi_ricci_defect <= tol
        if self.nabla_s_closed_form_defect is not None:
            out["nabla_s_closed_form"] = self.nabla_s_closed_form_defect <= tol
        if self.space_form is not None:
            out["space_form"] = self.space_form.defect <= tol
            out["hyperbolic_minus_one"] = self.space_form.label(tol) == "H(-1)"
        return out


def classify(pack: CurvaturePack, fd: FramePointData, cs=None, fit: SolitonFit | None = None, tol: float = 1e-8):
    sf = space_form_detect(pack, fd) if fd.dim == 3 else None
    r = pack.scalar.value
    einstein = sf.einstein_defect if sf is not None else maxabs(values(pack.ricci) - (r / fd.dim) * values(fd.g))
    closed = None
    if cs is not None and fit is not None:
        try:
            closed = nabla_s_closed_form_check(pack, cs, fd, fit, tol)
        except SolitonPrereqFailed:
            closed = None
    return ClassificationReport(
        codazzi_defect=codazzi_defect(pack, fd),
        cyclic_defect=cyclic_parallel_defect(pack, fd),
        phi_ricci_defect=phi_ricci_defect(pack, cs, fd) if cs is not None else None,
        rr_qsr_defect=rr_qsr_defect(pack, fd),
        einstein_defect=einstein,
        space_form=sf,
        nabla_s_closed_form_defect=closed,
    )
