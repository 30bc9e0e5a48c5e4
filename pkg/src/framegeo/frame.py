"""Riemannian geometry in a moving frame.

Index conventions (all arrays are numpy ``object`` arrays of :class:`Jet`):

* ``A[i, m]``          frame vector ``e_i = sum_m A[i, m] d/dx^m``
* ``c[k, i, j]``       structure functions, ``[e_i, e_j] = c^k_ij e_k``
* ``g[i, j]``          metric components ``g(e_i, e_j)``
* ``gamma[k, i, j]``   connection, ``nabla_{e_i} e_j = gamma^k_ij e_k``
* ``riem[l, k, i, j]`` curvature, ``R(e_i, e_j) e_k = R^l_kij e_l``
* ``riem_low[i, j, k, l] = g(R(e_i, e_j) e_k, e_l)``
* ``ricci[j, k] = sum_i R^i_kij``; with this trace the unit sphere has S = 2g
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatch,
    MetricNotPositiveDefinite,
    SingularFrame,
    ValidationError,
)
from .expr import Chart, Expr, eval_jet, eval_value, is_transcendental, to_text
from .jet import Jet, directional_derivative

SINGULAR_REL_TOL = 1e-10


# -- small helpers on value arrays ----------------------------------------------
def values(arr) -> np.ndarray:
    """Point values of a jet array (object dtype in exact mode, float otherwise)."""
    arr = np.asarray(arr, dtype=object)
    flat = [x.value if isinstance(x, Jet) else x for x in arr.flat]
    exact = all(isinstance(v, (Fraction, int)) for v in flat)
    out = np.array(flat, dtype=object if exact else float)
    return out.reshape(arr.shape)


def maxabs(arr):
    """Largest absolute entry; 0 for an empty input.  Keeps Fractions exact."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        worst = max(abs(x) for x in arr.flat)
        return worst if isinstance(worst, (Fraction, int)) else float(worst)
    return float(np.max(np.abs(arr)))


def det(m) -> object:
    """Determinant of a small square value matrix (Laplace expansion, exact for Fractions)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in (list(r) for r in m[1:])]
        total += (-1) ** j * m[0][j] * det(minor)
    return total


def jet_inverse(M: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse of a square jet matrix, pivoting on point values."""
    n = M.shape[0]
    ref = M[0, 0]
    work = np.empty((n, 2 * n), dtype=object)
    for i in range(n):
        for j in range(n):
            work[i, j] = M[i, j]
            work[i, n + j] = Jet.const(int(i == j), ref.n_vars, ref.degree, exact=ref.exact)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(work[r, col].value))
        if work[piv, col].value == 0:
            raise SingularFrame("matrix is singular at the point")
        if piv != col:
            work[[col, piv]] = work[[piv, col]]
        inv_p = work[col, col].reciprocal()
        for j in range(2 * n):
            work[col, j] = work[col, j] * inv_p
        for r in range(n):
            if r == col:
                continue
            f = work[r, col]
            if f.value == 0 and not np.any(f.coeffs):
                continue
            for j in range(2 * n):
                work[r, j] = work[r, j] - f * work[col, j]
    return work[:, n:].copy()


# -- frame specifications --------------------------------------------------------
@dataclass(frozen=True)
class FrameSpec:
    """A frame given either by coordinate coefficients or by structure constants.

    ``frame[i][m]`` is the ``d/dx^m`` coefficient of ``e_i``; ``structure[k][i][j]``
    is ``c^k_ij``.  Exactly one of the two is set.  ``metric`` holds ``g_ij`` in
    frame indices; ``None`` means orthonormal.
    """

    chart: Chart
    frame: tuple[tuple[Expr, ...], ...] | None = None
    structure: tuple[tuple[tuple[Expr, ...], ...], ...] | None = None
    metric: tuple[tuple[Expr, ...], ...] | None = None

    def __post_init__(self):
        if (self.frame is None) == (self.structure is None):
            raise ValidationError("frame-xor-structure", "exactly one of frame expressions or structure constants")
        n = self.dim
        if self.frame is not None:
            if len(self.frame) != n or any(len(row) != n for row in self.frame):
                raise ValidationError("frame-shape", f"need {n} frame vectors with {n} coefficients each")
        else:
            if self.chart.dim != n:
                raise ValidationError("structure-shape", "chart dimension must match structure constants")
            self._validate_structure()
        if self.metric is not None:
            if len(self.metric) != n or any(len(row) != n for row in self.metric):
                raise ValidationError("metric-shape", f"metric must be {n}x{n}")
            for i, j in itertools.combinations(range(n), 2):
                if self.metric[i][j] != self.metric[j][i]:
                    raise ValidationError("metric-symmetry", f"g{i + 1}{j + 1} differs from g{j + 1}{i + 1}")

    @property
    def dim(self) -> int:
        if self.frame is not None:
            return len(self.frame)
        return len(self.structure)

    @property
    def mode(self) -> str:
        return "chart-frame" if self.frame is not None else "structure-constants"

    @property
    def orthonormal(self) -> bool:
        return self.metric is None

    def structure_values(self, exact: bool = True) -> np.ndarray:
        n = self.dim
        use_exact = exact and not any(is_transcendental(e) for e in _flat3(self.structure))
        out = np.empty((n, n, n), dtype=object if use_exact else float)
        for k, i, j in itertools.product(range(n), repeat=3):
            e = self.structure[k][i][j]
            try:
                out[k, i, j] = eval_value(e, (), exact=use_exact)
            except IndexError:
                raise ValidationError("structure-constant", f"c^{k + 1}_{i + 1}{j + 1} must not depend on coordinates")
        return out

    def _validate_structure(self):
        n = self.dim
        if len(self.structure) != n or any(len(a) != n or any(len(b) != n for b in a) for a in self.structure):
            raise ValidationError("structure-shape", f"structure constants must be {n}x{n}x{n}")
        c = self.structure_values()
        tol = 0 if c.dtype == object else 1e-12
        for k, i, j in itertools.product(range(n), repeat=3):
            if abs(c[k, i, j] + c[k, j, i]) > tol:
                raise ValidationError("antisymmetry", f"c^{k + 1}_{i + 1}{j + 1} != -c^{k + 1}_{j + 1}{i + 1}")
        defect = jacobi_defect(c)
        if defect > tol:
            raise ValidationError("jacobi", f"structure constants violate the Jacobi identity (defect {defect})")

    def describe(self) -> str:
        if self.frame is not None:
            rows = [", ".join(to_text(e) for e in row) for row in self.frame]
            return "; ".join(f"e{i + 1} = {r}" for i, r in enumerate(rows))
        return "structure constants"


def _flat3(s):
    for a in s:
        for b in a:
            yield from b


def jacobi_defect(c) -> object:
    """Max |sum_cyclic [e_i, [e_j, e_k]]| over all index triples."""
    n = c.shape[0]
    worst = 0
    for i, j, k in itertools.product(range(n), repeat=3):
        for l in range(n):
            s = 0
            for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
                # [e_a, [e_b, e_d]] = c^m_bd c^l_am e_l
                s += sum(c[m, b, d] * c[l, a, m] for m in range(n))
            worst = max(worst, abs(s))
    return worst


# -- evaluated frame data ----------------------------------------------------------
@dataclass(frozen=True, eq=False)
class FramePointData:
    spec: FrameSpec
    point: tuple
    degree: int
    exact: bool
    A: np.ndarray
    A_inv: np.ndarray
    c: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def orthonormal(self) -> bool:
        return self.spec.orthonormal

    def d(self, i: int, f) -> Jet:
        """Derivative of the scalar jet ``f`` along frame vector ``e_i``."""
        if not isinstance(f, Jet):
            return self.const(0)
        return directional_derivative(f, list(self.A[i]))

    def const(self, value) -> Jet:
        return Jet.const(value, self.spec.chart.dim, self.degree, exact=self.exact)

    def evaluate(self, e: Expr) -> Jet:
        return eval_jet(e, self.point, self.degree, exact=self.exact)

    def zeros(self, *shape) -> np.ndarray:
        z = self.const(0)
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(*shape):
            out[idx] = z
        return out


def evaluate_frame(spec: FrameSpec, point, degree: int = 4, exact: bool = False) -> FramePointData:
    """Evaluate frame, structure functions and metric as jets at ``point``."""
    n = spec.dim
    spec.chart.check_point(point)
    point = tuple(Fraction(x) if exact else float(x) for x in point)
    nv = spec.chart.dim

    def const(v):
        return Jet.const(v, nv, degree, exact=exact)

    if spec.frame is not None:
        A = np.empty((n, n), dtype=object)
        for i, m in itertools.product(range(n), repeat=2):
            A[i, m] = eval_jet(spec.frame[i][m], point, degree, exact=exact)
        Av = values(A)
        d = det(Av.tolist())
        scale = max(sum(x * x for x in row) for row in Av.tolist())
        if exact:
            singular = d == 0
        else:
            singular = abs(d) < SINGULAR_REL_TOL * float(scale) ** (n / 2)
        if singular:
            raise SingularFrame(f"frame is singular at {point} (det = {d})")
        A_inv = jet_inverse(A)
        # coordinate components of [e_i, e_j]
        c = np.empty((n, n, n), dtype=object)
        dA = [[[directional_derivative(A[j, m], list(A[i])) for m in range(n)] for j in range(n)] for i in range(n)]
        zero = const(0)
        for i in range(n):
            for k in range(n):
                c[k, i, i] = zero
        for i, j in itertools.combinations(range(n), 2):
            br = [dA[i][j][m] - dA[j][i][m] for m in range(n)]
            for k in range(n):
                val = br[0] * A_inv[0, k]
                for m in range(1, n):
                    val = val + br[m] * A_inv[m, k]
                c[k, i, j] = val
                c[k, j, i] = -val
    else:
        cv = spec.structure_values(exact)
        A = np.empty((n, n), dtype=object)
        for i, m in itertools.product(range(n), repeat=2):
            A[i, m] = const(int(i == m))
        A_inv = A.copy()
        c = np.empty((n, n, n), dtype=object)
        for idx in np.ndindex(n, n, n):
            c[idx] = const(cv[idx])

    g = np.empty((n, n), dtype=object)
    if spec.metric is None:
        for i, j in itertools.product(range(n), repeat=2):
            g[i, j] = const(int(i == j))
        g_inv = g.copy()
    else:
        for i, j in itertools.product(range(n), repeat=2):
            g[i, j] = eval_jet(spec.metric[i][j], point, degree, exact=exact)
        gv = values(g).tolist()
        for k in range(1, n + 1):
            if det([row[:k] for row in gv[:k]]) <= 0:
                raise MetricNotPositiveDefinite(f"metric is not positive-definite at {point}")
        g_inv = jet_inverse(g)
    return FramePointData(spec, point, degree, exact, A, A_inv, c, g, g_inv)


# -- connection and curvature ------------------------------------------------------
@dataclass(frozen=True, eq=False)
class CurvaturePack:
    gamma: np.ndarray
    riem: np.ndarray
    riem_low: np.ndarray
    ricci: np.ndarray
    ricci_op: np.ndarray
    scalar: Jet

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]


def _sum(terms, zero):
    out = zero
    for t in terms:
        out = out + t
    return out


def levi_civita(fd: FramePointData) -> np.ndarray:
    """Connection coefficients ``gamma[k, i, j]`` from the Koszul formula."""
    n, c, g = fd.dim, fd.c, fd.g
    zero = fd.const(0)
    # koszul[i, j, k] = g(nabla_{e_i} e_j, e_k)
    koszul = np.empty((n, n, n), dtype=object)
    for i, j, k in itertools.product(range(n), repeat=3):
        if fd.orthonormal:
            # g_ab = delta_ab, so g(e_a, [e_b, e_d]) = c^a_bd and derivative terms vanish
            val = -c[i, j, k] - c[j, i, k] + c[k, i, j]
        else:
            val = fd.d(i, g[j, k]) + fd.d(j, g[i, k]) - fd.d(k, g[i, j])
            for m in range(n):
                val = val - c[m, j, k] * g[i, m] - c[m, i, k] * g[j, m] + c[m, i, j] * g[k, m]
        koszul[i, j, k] = val * Fraction(1, 2) if fd.exact else val * 0.5
    if fd.orthonormal:
        return np.transpose(koszul, (2, 0, 1)).copy()
    gamma = np.empty((n, n, n), dtype=object)
    for l, i, j in itertools.product(range(n), repeat=3):
        gamma[l, i, j] = _sum((koszul[i, j, k] * fd.g_inv[k, l] for k in range(n)), zero)
    return gamma


def lower_vector(fd: FramePointData, v):
    """Frame components of the 1-form ``g(v, .)``."""
    if fd.orthonormal:
        return list(v)
    n = fd.dim
    return [_sum((fd.g[a, b] * v[b] for b in range(n)), fd.const(0)) for a in range(n)]


def curvature(fd: FramePointData, gamma: np.ndarray) -> CurvaturePack:
    n, c = fd.dim, fd.c
    zero = fd.const(0)
    dgamma = np.empty((n, n, n, n), dtype=object)  # dgamma[a, k, i, j] = e_a(gamma^k_ij)
    for a, k, i, j in itertools.product(range(n), repeat=4):
        dgamma[a, k, i, j] = fd.d(a, gamma[k, i, j])
    riem = np.empty((n, n, n, n), dtype=object)
    for l, k, i, j in itertools.product(range(n), repeat=4):
        if i == j:
            riem[l, k, i, j] = zero
            continue
        if j < i:
            riem[l, k, i, j] = -riem[l, k, j, i]
            continue
        val = dgamma[i, l, j, k] - dgamma[j, l, i, k]
        for m in range(n):
            val = val + gamma[m, j, k] * gamma[l, i, m] - gamma[m, i, k] * gamma[l, j, m] - c[m, i, j] * gamma[l, m, k]
        riem[l, k, i, j] = val
    riem_low = np.empty((n, n, n, n), dtype=object)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if fd.orthonormal:
            riem_low[i, j, k, l] = riem[l, k, i, j]
        else:
            riem_low[i, j, k, l] = _sum((riem[m, k, i, j] * fd.g[m, l] for m in range(n)), zero)
    ricci = np.empty((n, n), dtype=object)
    for j, k in itertools.product(range(n), repeat=2):
        ricci[j, k] = _sum((riem[i, k, i, j] for i in range(n)), zero)
    ricci_op = raise_first(fd, ricci)
    scalar = _sum((ricci_op[i, i] for i in range(n)), zero)
    return CurvaturePack(gamma, riem, riem_low, ricci, ricci_op, scalar)


def raise_first(fd: FramePointData, T: np.ndarray) -> np.ndarray:
    """Raise the first index of a covariant tensor with ``g_inv``."""
    if fd.orthonormal:
        return T.copy()
    n = fd.dim
    out = np.empty(T.shape, dtype=object)
    for idx in np.ndindex(*T.shape):
        out[idx] = _sum((fd.g_inv[idx[0], m] * T[(m,) + idx[1:]] for m in range(n)), fd.const(0))
    return out


def compute(spec: FrameSpec, point, degree: int = 4, exact: bool = False) -> tuple[FramePointData, CurvaturePack]:
    fd = evaluate_frame(spec, point, degree, exact)
    return fd, curvature(fd, levi_civita(fd))


def covariant_derivative(T: np.ndarray, fd: FramePointData, gamma: np.ndarray, n_up: int = 0) -> np.ndarray:
    """``out[a, ...] = (nabla_{e_a} T)[...]`` for a tensor whose first ``n_up`` slots are contravariant."""
    n = fd.dim
    T = np.asarray(T, dtype=object)
    rank = T.ndim
    out = np.empty((n,) + T.shape, dtype=object)
    for a in range(n):
        for idx in np.ndindex(*T.shape):
            val = fd.d(a, T[idx])
            for s in range(rank):
                for m in range(n):
                    moved = idx[:s] + (m,) + idx[s + 1 :]
                    if s < n_up:
                        coef = gamma[idx[s], a, m]
                        val = val + coef * T[moved]
                    else:
                        coef = gamma[m, a, idx[s]]
                        val = val - coef * T[moved]
            out[(a,) + idx] = val
    return out


def vector_field_derivative(V, fd: FramePointData, gamma: np.ndarray) -> np.ndarray:
    """``out[a, i] = (nabla_{e_a} V)^i`` for frame components ``V``."""
    T = np.empty(fd.dim, dtype=object)
    for i, v in enumerate(V):
        T[i] = v
    return covariant_derivative(T, fd, gamma, n_up=1)


# -- identity suite ------------------------------------------------------------------
def decomposition_3d(pack: CurvaturePack, fd: FramePointData) -> np.ndarray:
    """Right-hand side of the 3D curvature decomposition, as ``rhs[l, k, i, j]``."""
    n = fd.dim
    if n != 3:
        raise DimensionMismatch("the Ricci decomposition of curvature is specific to dimension 3")
    g, S, Q, r = values(fd.g), values(pack.ricci), values(pack.ricci_op), pack.scalar.value
    half = Fraction(1, 2) if fd.exact else 0.5
    rhs = np.empty((n, n, n, n), dtype=object if fd.exact else float)
    for l, k, i, j in itertools.product(range(n), repeat=4):
        dli, dlj = int(l == i), int(l == j)
        rhs[l, k, i, j] = (
            g[j, k] * Q[l, i]
            - g[i, k] * Q[l, j]
            + S[j, k] * dli
            - S[i, k] * dlj
            - r * half * (g[j, k] * dli - g[i, k] * dlj)
        )
    return rhs


def identity_suite(pack: CurvaturePack, fd: FramePointData) -> dict[str, object]:
    """Max-abs defects of the identities every Levi-Civita curvature satisfies."""
    n = fd.dim
    gamma, c = pack.gamma, fd.c
    gv, cv = values(gamma), values(c)
    out = {}
    out["torsion"] = maxabs(gv - np.transpose(gv, (0, 2, 1)) - cv)

    compat = []
    for k, i, j in itertools.product(range(n), repeat=3):
        lhs = fd.d(k, fd.g[i, j]).value if not fd.orthonormal else 0
        rhs = sum(gv[l, k, i] * values(fd.g)[l, j] + gv[l, k, j] * values(fd.g)[i, l] for l in range(n))
        compat.append(lhs - rhs)
    out["metric_compatibility"] = maxabs(np.array(compat, dtype=object))

    R, Rl = values(pack.riem), values(pack.riem_low)
    out["riemann_antisymmetry"] = max(
        maxabs(R + np.transpose(R, (0, 1, 3, 2))), maxabs(Rl + np.transpose(Rl, (0, 1, 3, 2)))
    )
    out["pair_symmetry"] = maxabs(Rl - np.transpose(Rl, (2, 3, 0, 1)))
    # R^l_kij + R^l_ijk + R^l_jki
    out["bianchi_first"] = maxabs(R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2)))

    if pack.ricci[0, 0].valid_order >= 1:
        dS = covariant_derivative(pack.ricci, fd, gamma)
        gi = values(fd.g_inv)
        dSv = values(dS)
        bianchi2 = []
        for x in range(n):
            lhs = sum(gi[a, b] * dSv[a, b, x] for a in range(n) for b in range(n))
            rhs = fd.d(x, pack.scalar).value
            bianchi2.append(lhs - rhs / 2)
        out["bianchi_second_contracted"] = maxabs(np.array(bianchi2, dtype=object))
    if n == 3:
        out["decomposition_3d"] = maxabs(R - decomposition_3d(pack, fd))
    return out
