"""Truncated multivariate Taylor arithmetic ("jets").

A :class:`Jet` holds every Taylor coefficient ``d^a f / a!`` of a scalar
function at one point, for all multi-indices ``a`` with ``|a| <= degree``.
With that normalization a product is a plain truncated convolution.

Two scalar realizations are supported:

* float mode: coefficients in a ``float64`` array; results carry ordinary
  IEEE rounding.
* exact mode: coefficients are :class:`fractions.Fraction` objects in an
  ``object`` array; field operations are exact.

Exact jets promote to float when fed to a transcendental function (exp, ln,
sin, cos, sqrt) or combined with a float jet.

``valid_order`` tracks how many derivative orders are still trustworthy.
Taking a derivative lowers it by one; arithmetic takes the minimum of its
operands.  Coefficients above ``valid_order`` are stale and never read by the
geometry code, which only consumes the value plus whatever derivatives the
remaining budget allows.
"""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction
from numbers import Rational, Real

import numpy as np

from .errors import DivisionByZeroAtPoint, DomainError, MixedJetShapes, OrderExhausted

__all__ = [
    "Jet",
    "jet_var",
    "jet_const",
    "directional_derivative",
    "exp",
    "ln",
    "sin",
    "cos",
    "sqrt",
    "multi_indices",
]


@functools.lru_cache(maxsize=None)
def multi_indices(n_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices of total degree <= ``degree``, graded then lex-descending."""
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_vars), total):
            alpha = [0] * n_vars
            for v in combo:
                alpha[v] += 1
            out.append(tuple(alpha))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _tables(n_vars: int, degree: int):
    idx = multi_indices(n_vars, degree)
    pos = {a: k for k, a in enumerate(idx)}
    mi, mj, mk = [], [], []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= degree:
                mi.append(i)
                mj.append(j)
                mk.append(pos[c])
    mul = (np.array(mi), np.array(mj), np.array(mk))
    order = np.array([sum(a) for a in idx])
    # partial derivative along each variable: dst[alpha] = (alpha_m + 1) * src[alpha + e_m]
    deriv = []
    for m in range(n_vars):
        dst, src, fac = [], [], []
        for k, a in enumerate(idx):
            if sum(a) >= degree:
                continue
            b = list(a)
            b[m] += 1
            dst.append(k)
            src.append(pos[tuple(b)])
            fac.append(a[m] + 1)
        deriv.append((np.array(dst, dtype=int), np.array(src, dtype=int), np.array(fac)))
    return idx, pos, mul, deriv, order


def _is_exact_scalar(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def _to_scalar(x, exact: bool):
    if exact:
        return x if isinstance(x, Fraction) else Fraction(x)
    return float(x)


class Jet:
    """Immutable truncated Taylor expansion of a scalar at a point."""

    __slots__ = ("n_vars", "degree", "coeffs", "valid_order")

    def __init__(self, n_vars: int, degree: int, coeffs, valid_order: int | None = None):
        self.n_vars = n_vars
        self.degree = degree
        n = math.comb(n_vars + degree, degree)
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (n,):
            raise MixedJetShapes(f"expected {n} coefficients, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        self.coeffs = coeffs
        self.valid_order = degree if valid_order is None else valid_order
        if not 0 <= self.valid_order <= degree:
            raise ValueError("valid_order must lie in [0, degree]")

    # -- construction helpers ------------------------------------------------
    @classmethod
    def const(cls, value, n_vars: int, degree: int, exact: bool | None = None) -> Jet:
        if exact is None:
            exact = _is_exact_scalar(value)
        n = math.comb(n_vars + degree, degree)
        if exact:
            c = np.full(n, Fraction(0), dtype=object)
            c[0] = _to_scalar(value, True)
        else:
            c = np.zeros(n)
            c[0] = float(value)
        return cls(n_vars, degree, c)

    def _like(self, coeffs, valid_order=None) -> Jet:
        return Jet(self.n_vars, self.degree, coeffs, self.valid_order if valid_order is None else valid_order)

    # -- properties ------------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def value(self):
        return self.coeffs[0]

    def coeff(self, alpha) -> object:
        """Normalized coefficient ``d^alpha f / alpha!``."""
        _, pos, _, _, _ = _tables(self.n_vars, self.degree)
        return self.coeffs[pos[tuple(alpha)]]

    def derivative(self, alpha) -> object:
        """Plain partial derivative ``d^alpha f`` at the expansion point."""
        alpha = tuple(alpha)
        if sum(alpha) > self.valid_order:
            raise OrderExhausted(f"derivative of order {sum(alpha)} exceeds valid_order {self.valid_order}")
        fact = math.prod(math.factorial(a) for a in alpha)
        return self.coeff(alpha) * fact

    @property
    def gradient(self) -> tuple:
        return tuple(self.derivative(tuple(int(k == m) for k in range(self.n_vars))) for m in range(self.n_vars))

    def to_float(self) -> Jet:
        if not self.exact:
            return self
        return self._like(self.coeffs.astype(float))

    def to_exact(self) -> Jet:
        if self.exact:
            return self
        return self._like(np.array([Fraction(float(c)) for c in self.coeffs], dtype=object))

    def is_close(self, other, tol: float = 0.0) -> bool:
        """Coefficient-wise comparison up to the common valid order."""
        other = self._coerce(other)
        order = min(self.valid_order, other.valid_order)
        idx = multi_indices(self.n_vars, self.degree)
        n = sum(1 for a in idx if sum(a) <= order)
        diff = self.coeffs[:n] - other.coeffs[:n]
        return all(abs(d) <= tol for d in diff)

    def __repr__(self):
        return f"Jet(value={self.value!r}, n_vars={self.n_vars}, degree={self.degree}, valid_order={self.valid_order})"

    # -- arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> Jet:
        if isinstance(other, Jet):
            if other.n_vars != self.n_vars or other.degree != self.degree:
                raise MixedJetShapes(
                    f"jets of shape ({self.n_vars}, {self.degree}) and ({other.n_vars}, {other.degree})"
                )
            return other
        if isinstance(other, Real):
            return Jet.const(other, self.n_vars, self.degree, exact=self.exact and _is_exact_scalar(other))
        return NotImplemented

    @staticmethod
    def _align(a: Jet, b: Jet):
        if a.exact and not b.exact:
            return a.to_float(), b
        if b.exact and not a.exact:
            return a, b.to_float()
        return a, b

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        return a._like(a.coeffs + b.coeffs, min(a.valid_order, b.valid_order))

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        return a._like(a.coeffs - b.coeffs, min(a.valid_order, b.valid_order))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, Real) and not isinstance(other, bool):
            if self.exact and not _is_exact_scalar(other):
                return self.to_float() * float(other)
            return self._like(self.coeffs * _to_scalar(other, self.exact))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        _, _, (mi, mj, mk), _, order = _tables(a.n_vars, a.degree)
        valid = min(a.valid_order, b.valid_order)
        if a.exact:
            # Fraction arithmetic dominates exact runs: skip zero coefficients and
            # orders past the valid one (those stay zero, they carry no information)
            sel = (a.coeffs != 0)[mi] & (b.coeffs != 0)[mj] & (order[mk] <= valid)
            out = np.full(len(a.coeffs), Fraction(0), dtype=object)
            if sel.any():
                np.add.at(out, mk[sel], a.coeffs[mi[sel]] * b.coeffs[mj[sel]])
        else:
            out = np.bincount(mk, weights=a.coeffs[mi] * b.coeffs[mj], minlength=len(a.coeffs))
        return a._like(out, valid)

    __rmul__ = __mul__

    def reciprocal(self) -> Jet:
        a0 = self.value
        if a0 == 0:
            raise DivisionByZeroAtPoint("division by a jet whose value is zero at the point")
        if self.exact:
            series = [Fraction((-1) ** k) / a0 ** (k + 1) for k in range(self.degree + 1)]
        else:
            series = [(-1) ** k / a0 ** (k + 1) for k in range(self.degree + 1)]
        return _compose(self, series)

    def __truediv__(self, other):
        if isinstance(other, Real) and not isinstance(other, bool):
            if other == 0:
                raise DivisionByZeroAtPoint("division by zero scalar")
            if self.exact and _is_exact_scalar(other):
                return self * (Fraction(1) / Fraction(other))
            return self * (1.0 / float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.reciprocal()

    def __pow__(self, n):
        if isinstance(n, bool) or not isinstance(n, int):
            raise TypeError("jets support integer powers only")
        if n < 0:
            return self.reciprocal() ** (-n)
        result = Jet.const(1, self.n_vars, self.degree, exact=self.exact)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        if result.valid_order > self.valid_order:
            result = result._like(result.coeffs, self.valid_order)
        return result

    # -- calculus --------------------------------------------------------------
    def partial(self, m: int) -> Jet:
        """``d f / d x^m`` as a jet one order less trustworthy."""
        if self.valid_order < 1:
            raise OrderExhausted("cannot differentiate a jet with valid_order 0")
        if not 0 <= m < self.n_vars:
            raise IndexError(f"variable index {m} out of range for {self.n_vars} variables")
        _, _, _, deriv, _ = _tables(self.n_vars, self.degree)
        dst, src, fac = deriv[m]
        if self.exact:
            out = np.full(len(self.coeffs), Fraction(0), dtype=object)
        else:
            out = np.zeros(len(self.coeffs))
        out[dst] = self.coeffs[src] * fac
        return self._like(out, self.valid_order - 1)


def _compose(a: Jet, series) -> Jet:
    """Evaluate ``sum_k series[k] * (a - a.value)**k`` truncated to the jet degree (Horner)."""
    h_coeffs = a.coeffs.copy()
    h_coeffs[0] = Fraction(0) if a.exact else 0.0
    h = a._like(h_coeffs)
    out = Jet.const(series[-1], a.n_vars, a.degree, exact=a.exact)
    for c in reversed(series[:-1]):
        out = out * h + c
    return a._like(out.coeffs, a.valid_order)


def jet_const(value, n_vars: int, degree: int, exact: bool | None = None) -> Jet:
    return Jet.const(value, n_vars, degree, exact)


def jet_var(i: int, p, n_vars: int, degree: int, exact: bool | None = None) -> Jet:
    """Jet of the coordinate function ``x^i`` expanded at point ``p``."""
    if not 0 <= i < n_vars:
        raise IndexError(f"coordinate index {i} out of range for {n_vars} variables")
    if len(p) != n_vars:
        raise MixedJetShapes(f"point has {len(p)} coordinates, expected {n_vars}")
    if exact is None:
        exact = all(_is_exact_scalar(x) for x in p)
    base = Jet.const(p[i], n_vars, degree, exact)
    if degree == 0:
        return base
    coeffs = base.coeffs.copy()
    coeffs[1 + i] = Fraction(1) if exact else 1.0
    return Jet(n_vars, degree, coeffs)


def directional_derivative(f: Jet, v) -> Jet:
    """``sum_m v[m] * d f / d x^m``; ``v`` holds jets or plain scalars."""
    if f.valid_order < 1:
        raise OrderExhausted("cannot differentiate a jet with valid_order 0")
    if len(v) != f.n_vars:
        raise MixedJetShapes(f"direction has {len(v)} components, expected {f.n_vars}")
    out = None
    for m, vm in enumerate(v):
        if not isinstance(vm, Jet) and vm == 0:
            continue
        term = f.partial(m) * vm
        out = term if out is None else out + term
    if out is None:
        z = Jet.const(0, f.n_vars, f.degree, exact=f.exact)
        return z._like(z.coeffs, f.valid_order - 1)
    return out


# -- elementary functions ------------------------------------------------------
def _float_input(a: Jet) -> Jet:
    return a.to_float() if a.exact else a


def exp(a: Jet) -> Jet:
    a = _float_input(a)
    e = math.exp(a.value)
    return _compose(a, [e / math.factorial(k) for k in range(a.degree + 1)])


def ln(a: Jet) -> Jet:
    a = _float_input(a)
    a0 = a.value
    if a0 <= 0:
        raise DomainError(f"ln of non-positive value {a0}")
    series = [math.log(a0)] + [(-1) ** (k + 1) / (k * a0**k) for k in range(1, a.degree + 1)]
    return _compose(a, series)


def _trig(a: Jet, phase: int) -> Jet:
    a = _float_input(a)
    s, c = math.sin(a.value), math.cos(a.value)
    cycle = [s, c, -s, -c]
    return _compose(a, [cycle[(k + phase) % 4] / math.factorial(k) for k in range(a.degree + 1)])


def sin(a: Jet) -> Jet:
    return _trig(a, 0)


def cos(a: Jet) -> Jet:
    return _trig(a, 1)


def sqrt(a: Jet) -> Jet:
    a = _float_input(a)
    a0 = a.value
    if a0 <= 0:
        raise DomainError(f"sqrt of non-positive value {a0}")
    r = math.sqrt(a0)
    series = []
    binom = 1.0
    for k in range(a.degree + 1):
        series.append(binom * r / a0**k)
        binom *= (0.5 - k) / (k + 1)
    return _compose(a, series)


ELEMENTARY = {"exp": exp, "ln": ln, "sin": sin, "cos": cos, "sqrt": sqrt}
