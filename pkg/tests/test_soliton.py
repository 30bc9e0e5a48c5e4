import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framegeo.contact import evaluate_contact
from framegeo.errors import RankDeficientFit
from framegeo.expr import parse
from framegeo.frame import compute, values
from framegeo.soliton import (
    SolitonFit,
    fit_soliton,
    fit_soliton_points,
    lie_derivative_metric,
    potential_jets,
    ricci_from_fit,
    soliton_from_scalar,
    soliton_residual,
)
from framegeo.specfile import builtin, sample_points

F = Fraction


def xi_fit(spec, p, exact=False, mu_mode="free"):
    fd, pack = compute(spec.frame, p, exact=exact)
    return fit_soliton(None, spec.contact, fd, pack, mu_mode)


class TestExample:
    def test_fit_exact(self, s7_exact):
        spec, fd, pack = s7_exact
        fit = fit_soliton(None, spec.contact, fd, pack)
        assert (fit.lam, fit.mu) == (1, 1)
        assert fit.residual_max == 0 and fit.residual_rms == 0
        assert fit.lam + fit.mu == 2
        assert fit.describe() == "expanding, proper"

    def test_fit_float(self, s7):
        fit = xi_fit(s7, (0.4, -2.0, 1.3))
        assert fit.lam == pytest.approx(1, abs=1e-12)
        assert fit.mu == pytest.approx(1, abs=1e-12)
        assert fit.residual_max <= 1e-12

    def test_residual_at_other_constants(self, s7_exact):
        """(lam, mu) = (-1, 3) leaves a residual of 4 in the (3,3) component."""
        spec, fd, pack = s7_exact
        assert soliton_residual(F(-1), F(3), None, spec.contact, fd, pack) == 4
        assert soliton_residual(F(1), F(1), None, spec.contact, fd, pack) == 0

    def test_plain_ricci_soliton_fit_fails(self, s7_exact):
        spec, fd, pack = s7_exact
        fit = fit_soliton(None, spec.contact, fd, pack, mu_mode="frozen_zero")
        assert fit.mu == 0
        assert fit.lam == F(4, 3)
        assert fit.residual_rms == F(2, 3)
        assert fit.residual_max == F(4, 3)
        assert not fit.is_soliton(1e-8)

    def test_lie_derivative_along_xi(self, s7_exact):
        """Kenmotsu: L_xi g = 2(g - eta (x) eta)."""
        spec, fd, pack = s7_exact
        cp = evaluate_contact(spec.contact, fd)
        L = values(lie_derivative_metric(list(cp.xi), fd, pack))
        eta = values(cp.eta)
        assert (L == 2 * (values(fd.g) - np.outer(eta, eta))).all()

    def test_ricci_recovered_from_fit(self, s7_exact):
        spec, fd, pack = s7_exact
        eta = values(evaluate_contact(spec.contact, fd).eta)
        assert (ricci_from_fit(F(1), F(1), values(fd.g), eta) == values(pack.ricci)).all()


@pytest.mark.parametrize("name", ["kenmotsu-s7", "kenmotsu-warped"])
def test_pointwise_lambda_plus_mu_is_two(name):
    spec = builtin(name)
    items = []
    for p in sample_points(spec, 10, seed=0):
        fd, pack = compute(spec.frame, p)
        items.append((None, spec.contact, fd, pack))
    fit = fit_soliton_points(items)
    assert len(fit.per_point) == 10
    for pf in fit.per_point:
        assert abs(pf.lam + pf.mu - 2) <= 1e-8
        assert pf.residual_max <= 1e-8 * max(1.0, abs(pf.lam))


def test_pointwise_fit_matches_scalar_curvature_formula(warped):
    for p in sample_points(warped, 6, seed=2):
        fd, pack = compute(warped.frame, p)
        fit = fit_soliton(None, warped.contact, fd, pack)
        r = pack.scalar.value
        t = float(p[2])
        assert r == pytest.approx(2 * math.exp(-2 * t) - 6, rel=1e-12)
        lam, mu = soliton_from_scalar(r)
        assert fit.lam == pytest.approx(lam, rel=1e-10, abs=1e-10)
        assert fit.mu == pytest.approx(mu, rel=1e-10, abs=1e-10)
        assert lam == pytest.approx(1 - math.exp(-2 * t))


def test_warped_is_not_a_global_soliton(warped):
    items = []
    for p in sample_points(warped, 10, seed=0):
        fd, pack = compute(warped.frame, p)
        items.append((None, warped.contact, fd, pack))
    fit = fit_soliton_points(items)
    assert fit.spread > 0.1
    assert not fit.is_soliton(1e-8)


def test_example_is_a_global_soliton(s7):
    items = []
    for p in sample_points(s7, 5, seed=0):
        fd, pack = compute(s7.frame, p, exact=True)
        items.append((None, s7.contact, fd, pack))
    fit = fit_soliton_points(items)
    assert (fit.lam, fit.mu, fit.spread, fit.residual_max) == (1, 1, 0, 0)
    assert fit.is_soliton(0)


def test_soliton_from_scalar_example():
    assert soliton_from_scalar(F(-6)) == (1, 1)
    lam, mu = soliton_from_scalar(-4.0)
    assert (lam, mu) == (0.0, 2.0)


@settings(max_examples=50, deadline=None)
@given(st.fractions(-100, 100, max_denominator=50))
def test_soliton_from_scalar_sums_to_two(r):
    lam, mu = soliton_from_scalar(r)
    assert lam + mu == 2


def test_killing_field_on_flat_space():
    spec = builtin("flat3")
    fd, pack = compute(spec.frame, (F(1), F(2), F(3)), exact=True)
    V = [parse(e, spec.chart) for e in ("-y", "x", "0")]
    assert not values(lie_derivative_metric(V, fd, pack)).any()


def test_left_invariant_field_on_sphere_is_killing():
    spec = builtin("sphere3")
    fd, pack = compute(spec.frame, (0, 0, 0), exact=True)
    assert not values(lie_derivative_metric([0, 0, 1], fd, pack)).any()
    fit = fit_soliton(None, spec.contact, fd, pack)
    # S = 2g, so lam = -2 and mu = 0: an Einstein (trivial) soliton
    assert (fit.lam, fit.mu, fit.residual_max) == (-2, 0, 0)
    assert fit.kind() == "shrinking" and not fit.proper()


def test_position_field_on_flat_space_is_shrinking():
    """The position field is homothetic: L_V g = 2g."""
    spec = builtin("flat3")
    fd, pack = compute(spec.frame, (F(1), F(2), F(3)), exact=True)
    V = [parse(e, spec.chart) for e in ("x", "y", "z")]
    fit = fit_soliton(V, None, fd, pack, mu_mode="frozen_zero")
    # L_V g = 2g  =>  2g + 2 lam g = 0  =>  lam = -1
    assert (fit.lam, fit.residual_max) == (-1, 0)
    assert fit.kind() == "shrinking"


def test_potential_defaults_to_xi(s7_exact):
    spec, fd, pack = s7_exact
    assert [j.value for j in potential_jets(None, spec.contact, fd)] == [0, 0, 1]
    with pytest.raises(ValueError):
        potential_jets(None, None, fd)


def test_free_fit_without_contact_is_rank_deficient():
    spec = builtin("flat3")
    fd, pack = compute(spec.frame, (0, 0, 0))
    with pytest.raises(RankDeficientFit):
        fit_soliton([0, 0, 0], None, fd, pack)


def test_fit_labels():
    assert SolitonFit(-1, 0, 0, 0).kind() == "shrinking"
    assert SolitonFit(0, 1, 0, 0).kind() == "steady"
    assert SolitonFit(1e-12, 1, 0, 0).kind(1e-9) == "steady"
    assert SolitonFit(2, 1, 0, 0).describe() == "expanding, proper"
    assert SolitonFit(2, 0, 0, 0).describe() == "expanding, not proper"


def test_unknown_mu_mode(s7_exact):
    spec, fd, pack = s7_exact
    with pytest.raises(ValueError):
        fit_soliton(None, spec.contact, fd, pack, mu_mode="bogus")
