"""Almost contact metric structures and Kenmotsu checks.

``phi[i][j]`` is the matrix of the (1,1)-tensor in frame indices,
``phi(e_j) = sum_i phi[i][j] e_i``; ``xi`` gives frame components of the Reeb
field.  The contact form is always derived as ``eta_a = g(e_a, xi)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .expr import Expr
from .frame import CurvaturePack, FramePointData, covariant_derivative, lower_vector, maxabs, values


@dataclass(frozen=True)
class ContactStructure:
    phi: tuple[tuple[Expr, ...], ...]
    xi: tuple[Expr, ...]

    def __post_init__(self):
        n = len(self.xi)
        if len(self.phi) != n or any(len(row) != n for row in self.phi):
            raise ValidationError("contact-shape", f"phi must be {n}x{n} to match xi")


@dataclass(frozen=True, eq=False)
class ContactPointData:
    phi: np.ndarray  # jets, phi[i, j]
    xi: np.ndarray
    eta: np.ndarray


def evaluate_contact(cs: ContactStructure | ContactPointData, fd: FramePointData) -> ContactPointData:
    if isinstance(cs, ContactPointData):
        return cs
    n = fd.dim
    if len(cs.xi) != n:
        raise DimensionMismatch(f"contact structure is {len(cs.xi)}-dimensional, frame is {n}-dimensional")
    phi = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        phi[i, j] = fd.evaluate(cs.phi[i][j])
    xi = np.empty(n, dtype=object)
    for i in range(n):
        xi[i] = fd.evaluate(cs.xi[i])
    eta = np.empty(n, dtype=object)
    for a, v in enumerate(lower_vector(fd, list(xi))):
        eta[a] = v
    return ContactPointData(phi, xi, eta)


def _identity(n, exact):
    return np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object if exact else float)


def check_almost_contact(cs, fd: FramePointData) -> dict[str, object]:
    """Defects of the almost contact metric axioms at the point."""
    cp = evaluate_contact(cs, fd)
    n = fd.dim
    phi, xi, eta, g = values(cp.phi), values(cp.xi), values(cp.eta), values(fd.g)
    ident = _identity(n, fd.exact)
    return {
        "phi_squared": maxabs(phi @ phi + ident - np.outer(xi, eta)),
        "eta_xi": abs(eta @ xi - 1),
        "phi_xi": maxabs(phi @ xi),
        "eta_phi": maxabs(eta @ phi),
        "compatibility": maxabs(phi.T @ g @ phi - g + np.outer(eta, eta)),
    }


def check_kenmotsu(cs, fd: FramePointData, pack: CurvaturePack) -> dict[str, object]:
    """Defects of the Kenmotsu condition on nabla(phi) and its two consequences."""
    cp = evaluate_contact(cs, fd)
    n = fd.dim
    gamma = pack.gamma
    phi, xi, eta, g = values(cp.phi), values(cp.xi), values(cp.eta), values(fd.g)
    ident = _identity(n, fd.exact)

    dphi = values(covariant_derivative(cp.phi, fd, gamma, n_up=1))  # [a, i, j]
    phi_low = phi.T @ g  # phi_low[a, j] = g(phi e_a, e_j)
    rhs4 = np.empty((n, n, n), dtype=dphi.dtype)
    for a, i, j in itertools.product(range(n), repeat=3):
        rhs4[a, i, j] = phi_low[a, j] * xi[i] - eta[j] * phi[i, a]

    dxi = values(covariant_derivative(cp.xi, fd, gamma, n_up=1))  # [a, i]
    rhs5 = ident - np.outer(eta, xi)

    deta = values(covariant_derivative(cp.eta, fd, gamma))  # [a, b]
    rhs6 = g - np.outer(eta, eta)
    return {
        "nabla_phi": maxabs(dphi - rhs4),
        "nabla_xi": maxabs(dxi - rhs5),
        "nabla_eta": maxabs(deta - rhs6),
    }


def check_kenmotsu_curvature(cs, fd: FramePointData, pack: CurvaturePack) -> dict[str, object]:
    """Defects of the curvature identities every Kenmotsu manifold satisfies."""
    cp = evaluate_contact(cs, fd)
    n = fd.dim
    R, S = values(pack.riem), values(pack.ricci)
    xi, eta, g = values(cp.xi), values(cp.eta), values(fd.g)
    ident = _identity(n, fd.exact)
    # R(e_a, e_b) xi = eta_a e_b - eta_b e_a
    lhs7 = np.einsum("lkab,k->lab", R, xi)
    rhs7 = np.einsum("a,lb->lab", eta, ident) - np.einsum("b,la->lab", eta, ident)
    # R(xi, e_a) e_b = eta_b e_a - g_ab xi
    lhs8 = np.einsum("lbia,i->lab", R, xi)
    rhs8 = np.einsum("b,la->lab", eta, ident) - np.einsum("ab,l->lab", g, xi)
    # R(xi, e_a) xi = e_a - eta_a xi
    lhs9 = np.einsum("lkia,i,k->la", R, xi, xi)
    rhs9 = ident - np.einsum("a,l->la", eta, xi)
    # S(e_a, xi) = -(n - 1) eta_a
    lhs10 = S @ xi
    return {
        "curvature_xi": maxabs(lhs7 - rhs7),
        "curvature_xi_first": maxabs(lhs8 - rhs8),
        "curvature_xi_xi": maxabs(lhs9 - rhs9),
        "ricci_xi": maxabs(lhs10 + (n - 1) * eta),
    }


def kenmotsu_3d_curvature(r, g, xi, eta, exact: bool) -> np.ndarray:
    """Closed-form ``R^l_kij`` of a Kenmotsu 3-manifold with scalar curvature ``r``."""
    n = len(xi)
    half = Fraction(1, 2) if exact else 0.5
    a, b = (r + 4) * half, (r + 6) * half
    out = np.empty((n, n, n, n), dtype=object if exact else float)
    for l, k, i, j in itertools.product(range(n), repeat=4):
        dli, dlj = int(l == i), int(l == j)
        out[l, k, i, j] = a * (g[j, k] * dli - g[i, k] * dlj) - b * (
            g[j, k] * eta[i] * xi[l] - g[i, k] * eta[j] * xi[l] + eta[j] * eta[k] * dli - eta[i] * eta[k] * dlj
        )
    return out


def check_3d_closed_forms(cs, fd: FramePointData, pack: CurvaturePack) -> dict[str, object]:
    """Compare curvature and Ricci with the 3D Kenmotsu closed forms at the computed r."""
    if fd.dim != 3:
        raise DimensionMismatch("closed-form Kenmotsu curvature is only available in dimension 3")
    cp = evaluate_contact(cs, fd)
    r = pack.scalar.value
    xi, eta, g = values(cp.xi), values(cp.eta), values(fd.g)
    R, S = values(pack.riem), values(pack.ricci)
    half = Fraction(1, 2) if fd.exact else 0.5
    S_closed = half * ((r + 2) * g - (r + 6) * np.outer(eta, eta))
    return {
        "curvature_closed_form": maxabs(R - kenmotsu_3d_curvature(r, g, xi, eta, fd.exact)),
        "ricci_closed_form": maxabs(S - S_closed),
    }
