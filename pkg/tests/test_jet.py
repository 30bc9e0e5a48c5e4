import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framegeo import jet
from framegeo.errors import DivisionByZeroAtPoint, DomainError, MixedJetShapes, OrderExhausted
from framegeo.expr import eval_jet, eval_value, parse
from framegeo.jet import Jet, directional_derivative, jet_const, jet_var, multi_indices

F = Fraction
COORDS = ("x", "y", "z")


def variables(p, degree=4, exact=None):
    return [jet_var(i, p, len(p), degree, exact) for i in range(len(p))]


def test_multi_indices_graded_order():
    idx = multi_indices(2, 2)
    assert idx == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert len(multi_indices(3, 4)) == math.comb(7, 4)


def test_var_and_const():
    x, y = variables((F(1), F(2)))
    assert x.value == 1 and y.value == 2
    assert x.gradient == (1, 0)
    assert x.exact
    c = jet_const(3.5, 2, 4)
    assert not c.exact and c.value == 3.5


def test_polynomial_coefficients_exact():
    x, y = variables((F(1), F(2)))
    f = x * x * y  # x^2 y at (1, 2)
    assert f.value == 2
    assert f.derivative((1, 0)) == 4
    assert f.derivative((0, 1)) == 1
    assert f.derivative((2, 0)) == 4
    assert f.derivative((1, 1)) == 2
    assert f.derivative((2, 1)) == 2
    assert f.derivative((3, 0)) == 0


def test_reciprocal_series():
    (x,) = variables((F(2),), degree=5)
    r = 1 / x
    for k in range(6):
        assert r.derivative((k,)) == F((-1) ** k * math.factorial(k), 2 ** (k + 1))


def test_division_by_zero_at_point():
    (x,) = variables((F(0),))
    with pytest.raises(DivisionByZeroAtPoint):
        1 / x
    with pytest.raises(ZeroDivisionError):
        x.reciprocal()


def test_elementary_functions_match_math():
    (x,) = variables((0.3,), degree=4)
    e = jet.exp(x)
    for k in range(5):
        assert e.derivative((k,)) == pytest.approx(math.exp(0.3))
    s = jet.sin(x)
    expected = [math.sin(0.3), math.cos(0.3), -math.sin(0.3), -math.cos(0.3), math.sin(0.3)]
    for k in range(5):
        assert s.derivative((k,)) == pytest.approx(expected[k])
    assert jet.sqrt(x * x).derivative((1,)) == pytest.approx(1.0)
    assert jet.ln(jet.exp(x)).derivative((1,)) == pytest.approx(1.0)
    assert jet.ln(jet.exp(x)).derivative((2,)) == pytest.approx(0.0, abs=1e-12)


def test_domain_errors():
    (x,) = variables((-1.0,))
    with pytest.raises(DomainError):
        jet.ln(x)
    with pytest.raises(DomainError):
        jet.sqrt(x)


def test_exact_jet_promotes_to_float_in_elementary_functions():
    (x,) = variables((F(0),))
    assert not jet.exp(x).exact
    assert (x + 0.5).exact is False


def test_valid_order_bookkeeping():
    x, y = variables((F(1), F(1)), degree=3)
    f = x * y
    assert f.valid_order == 3
    d = f.partial(0)
    assert d.valid_order == 2
    dd = d.partial(1)
    assert dd.valid_order == 1 and dd.value == 1
    ddd = dd.partial(0)
    assert ddd.valid_order == 0
    with pytest.raises(OrderExhausted):
        ddd.partial(0)
    with pytest.raises(OrderExhausted):
        dd.derivative((2, 0))
    # combining keeps the weaker guarantee
    assert (d + f).valid_order == 2
    assert (d * f).valid_order == 2


def test_mixed_shapes_rejected():
    a = jet_const(1, 2, 3)
    b = jet_const(1, 3, 3)
    with pytest.raises(MixedJetShapes):
        a + b


def test_integer_powers():
    (x,) = variables((F(3),))
    assert (x**3).derivative((1,)) == 27
    assert (x**-1).derivative((1,)) == F(-1, 9)
    assert (x**0).value == 1
    with pytest.raises(TypeError):
        x**0.5


def test_directional_derivative():
    x, y = variables((F(1), F(2)))
    f = x * y
    d = directional_derivative(f, [F(1), F(1)])
    assert d.value == 3
    assert d.valid_order == f.valid_order - 1


def test_to_exact_roundtrip():
    (x,) = variables((0.5,))
    assert x.to_exact().to_float().is_close(x)


# -- finite-difference oracles ----------------------------------------------------------
SAFE_UNARY = ["exp({})", "sin({})", "cos({})", "sqrt(1 + ({})^2)", "ln(2 + ({})^2)", "1/(1 + ({})^2)"]


def random_expression(rng: random.Random, depth: int = 3) -> str:
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return rng.choice(COORDS)
        return str(rng.randint(1, 5)) + "/" + str(rng.randint(1, 4))
    kind = rng.random()
    if kind < 0.3:
        return f"({random_expression(rng, depth - 1)}) * ({random_expression(rng, depth - 1)})"
    if kind < 0.5:
        return f"({random_expression(rng, depth - 1)}) + ({random_expression(rng, depth - 1)})"
    if kind < 0.6:
        return f"({random_expression(rng, depth - 1)})^2"
    return rng.choice(SAFE_UNARY).format(random_expression(rng, depth - 1))


def central_differences(e, p, h=1e-4):
    grad = []
    hess = np.zeros((3, 3))
    f0 = eval_value(e, p)
    for m in range(3):
        up = list(p)
        dn = list(p)
        up[m] += h
        dn[m] -= h
        fu, fd_ = eval_value(e, up), eval_value(e, dn)
        grad.append((fu - fd_) / (2 * h))
        hess[m, m] = (fu - 2 * f0 + fd_) / h**2
    return grad, hess


def close_rel(a, b, rel):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def test_chain_and_product_rule_against_finite_differences():
    rng = random.Random(7)
    for _ in range(50):
        text = random_expression(rng)
        e = parse(text, COORDS)
        p = [rng.uniform(-1, 1) for _ in range(3)]
        j = eval_jet(e, p, degree=3)
        grad, hess = central_differences(e, p)
        for m in range(3):
            unit = tuple(int(k == m) for k in range(3))
            assert close_rel(j.derivative(unit), grad[m], 1e-5), text
            two = tuple(2 * u for u in unit)
            assert close_rel(j.derivative(two), hess[m, m], 1e-4), text


# -- properties -------------------------------------------------------------------------
small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def exact_polys(draw):
    """Random exact polynomial jets in two variables at a random point."""
    p = (draw(small), draw(small))
    x, y = variables(p, degree=4, exact=True)
    coeffs = draw(st.lists(small, min_size=6, max_size=6))
    mons = [Jet.const(1, 2, 4, exact=True), x, y, x * x, x * y, y * y]
    out = Jet.const(0, 2, 4, exact=True)
    for c, m in zip(coeffs, mons):
        out = out + m * c
    return out


@settings(max_examples=40, deadline=None)
@given(exact_polys(), exact_polys(), st.integers(0, 1))
def test_leibniz_identity_exact(f, g, m):
    # both operands live at their own point; re-anchor g's coefficients at f's point
    g = Jet(f.n_vars, f.degree, g.coeffs)
    lhs = (f * g).partial(m)
    rhs = f.partial(m) * g + f * g.partial(m)
    assert lhs.valid_order == rhs.valid_order
    assert lhs.is_close(rhs, 0)


@settings(max_examples=40, deadline=None)
@given(exact_polys(), exact_polys(), exact_polys())
def test_ring_axioms_exact(f, g, h):
    g = Jet(2, 4, g.coeffs)
    h = Jet(2, 4, h.coeffs)
    assert (f * (g + h)).is_close(f * g + f * h, 0)
    assert ((f * g) * h).is_close(f * (g * h), 0)
    assert (f * g).is_close(g * f, 0)
    assert (f - f).is_close(Jet.const(0, 2, 4, exact=True), 0)


@settings(max_examples=40, deadline=None)
@given(exact_polys())
def test_reciprocal_is_inverse(f):
    if f.value == 0:
        return
    assert (f * f.reciprocal()).is_close(Jet.const(1, 2, 4, exact=True), 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_exp_ln_and_trig_identities_float(a, b):
    x, y = variables((a, b))
    t = x * y + x
    assert (jet.sin(t) ** 2 + jet.cos(t) ** 2).is_close(Jet.const(1.0, 2, 4), 1e-9)
    u = 2 + x * x
    assert jet.exp(jet.ln(u)).is_close(u, 1e-9 * max(1.0, u.value) ** 4)
    assert (jet.sqrt(u) * jet.sqrt(u)).is_close(u, 1e-9 * max(1.0, u.value) ** 4)
