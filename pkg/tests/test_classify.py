import math
from fractions import Fraction

import numpy as np
import pytest

from framegeo.classify import (
    ClassificationReport,
    SpaceForm,
    classify,
    codazzi_defect,
    cyclic_parallel_defect,
    nabla_ricci_operator,
    nabla_s_closed_form_check,
    phi_ricci_defect,
    rr_qsr_defect,
    rr_qsr_endomorphism_defect,
    rr_qsr_tensors,
    space_form_detect,
    wedge_endomorphism,
)
from framegeo.errors import DimensionMismatch, SolitonPrereqFailed
from framegeo.expr import Chart, parse
from framegeo.frame import FrameSpec, compute
from framegeo.soliton import SolitonFit, fit_soliton
from framegeo.specfile import builtin

F = Fraction

# points on the warped product with t <= 2, where the e^{-2t} defects exceed 0.01
WARPED_POINTS = [(0.3, -0.5, -1.0), (1.2, 0.4, 0.0), (-0.7, 2.1, 1.0), (2.5, -1.5, 2.0)]


def test_chain_of_conditions_on_example(s7_exact):
    spec, fd, pack = s7_exact
    assert codazzi_defect(pack, fd) == 0
    assert cyclic_parallel_defect(pack, fd) == 0
    assert phi_ricci_defect(pack, spec.contact, fd) == 0
    assert rr_qsr_defect(pack, fd) == 0
    sf = space_form_detect(pack, fd)
    assert sf.kappa == -1 and sf.defect == 0 and sf.einstein_defect == 0
    assert sf.label() == "H(-1)"


def test_classify_report_on_example(s7_exact):
    spec, fd, pack = s7_exact
    fit = fit_soliton(None, spec.contact, fd, pack)
    rep = classify(pack, fd, spec.contact, fit)
    assert rep.nabla_s_closed_form_defect == 0
    assert all(rep.verdicts(1e-8).values())


@pytest.mark.parametrize("p", WARPED_POINTS)
def test_warped_defects_follow_exponential_law(warped, p):
    """Codazzi, cyclic and phi-Ricci defects are e^{-2t}, 4e^{-2t} and 2e^{-2t}."""
    fd, pack = compute(warped.frame, p)
    w = math.exp(-2 * p[2])
    cod = codazzi_defect(pack, fd)
    cyc = cyclic_parallel_defect(pack, fd)
    phr = phi_ricci_defect(pack, warped.contact, fd)
    assert cod == pytest.approx(w, rel=1e-9)
    assert cyc == pytest.approx(4 * w, rel=1e-9)
    assert phr == pytest.approx(2 * w, rel=1e-9)
    assert min(cod, cyc, phr) > 0.01


@pytest.mark.parametrize("p", WARPED_POINTS)
def test_warped_nabla_s_closed_form_defect(warped, p):
    fd, pack = compute(warped.frame, p)
    fit = fit_soliton(None, warped.contact, fd, pack)
    defect = nabla_s_closed_form_check(pack, warped.contact, fd, fit)
    assert defect == pytest.approx(2 * math.exp(-2 * p[2]), rel=1e-9)


def test_closed_form_prerequisites(s7_exact):
    spec, fd, pack = s7_exact
    fit = fit_soliton(None, spec.contact, fd, pack)
    with pytest.raises(SolitonPrereqFailed):
        nabla_s_closed_form_check(pack, None, fd, fit)
    bad = fit_soliton(None, spec.contact, fd, pack, mu_mode="frozen_zero")
    with pytest.raises(SolitonPrereqFailed):
        nabla_s_closed_form_check(pack, spec.contact, fd, bad)
    with pytest.raises(SolitonPrereqFailed):
        nabla_s_closed_form_check(pack, spec.contact, fd, None)


@pytest.mark.parametrize("p", WARPED_POINTS[:2])
def test_nabla_q_paths_agree(warped, p):
    fd, pack = compute(warped.frame, p)
    a = nabla_ricci_operator(pack, fd, "direct")
    b = nabla_ricci_operator(pack, fd, "raised")
    assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(a)))


def test_nabla_q_paths_agree_with_general_metric():
    chart = Chart(("x", "y", "z"))
    ident = tuple(tuple(parse(e) for e in row) for row in (("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")))
    metric = tuple(
        tuple(parse(e, chart) for e in row)
        for row in (("2 + x^2", "x*y/4", "0"), ("x*y/4", "1 + y^2", "z/5"), ("0", "z/5", "3"))
    )
    fd, pack = compute(FrameSpec(chart, frame=ident, metric=metric), (F(1, 2), F(1, 3), F(1)), exact=True)
    a = nabla_ricci_operator(pack, fd, "direct")
    b = nabla_ricci_operator(pack, fd, "raised")
    assert (a == b).all()
    with pytest.raises(ValueError):
        nabla_ricci_operator(pack, fd, "sideways")


def test_sphere_is_einstein_and_rr_qsr_holds():
    spec = builtin("sphere3")
    fd, pack = compute(spec.frame, (0, 0, 0), exact=True)
    rep = classify(pack, fd, spec.contact)
    v = rep.verdicts(1e-8)
    assert v["rr_qsr"] and v["einstein"] and v["space_form"]
    assert not v["hyperbolic_minus_one"]
    assert rep.space_form.label() == "constant curvature 1"


def test_flat_space_form():
    spec = builtin("flat3")
    fd, pack = compute(spec.frame, (F(0), F(0), F(0)), exact=True)
    assert space_form_detect(pack, fd).label() == "flat"


def test_warped_is_not_a_space_form(warped):
    fd, pack = compute(warped.frame, (0.2, 0.1, 0.5))
    sf = space_form_detect(pack, fd)
    assert sf.defect > 0.1 and sf.label() is None


def test_rr_qsr_derivation_convention(warped):
    """Both sides act as derivations on the (0,4) curvature; the difference vanishes in 3D."""
    fd, pack = compute(warped.frame, (0.2, 0.1, 0.0))
    lhs, rhs = rr_qsr_tensors(pack)
    assert np.max(np.abs(lhs)) > 0.1
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    # applying X ^_S Y term by term to the (1,3) tensor is not a universal identity
    assert rr_qsr_endomorphism_defect(pack) > 0.1


def test_endomorphism_reading_agrees_on_einstein_example(s7_exact):
    _, _, pack = s7_exact
    assert rr_qsr_endomorphism_defect(pack) == 0


def test_wedge_endomorphism():
    g = np.eye(3, dtype=int)
    e1, e2, e3 = np.eye(3, dtype=int)
    assert list(wedge_endomorphism(g, e1, e2, e2)) == [1, 0, 0]
    assert list(wedge_endomorphism(g, e1, e2, e1)) == [0, -1, 0]
    assert list(wedge_endomorphism(g, e1, e2, e3)) == [0, 0, 0]


def test_space_form_needs_dimension_three():
    chart = Chart(("x", "y"))
    fs = FrameSpec(chart, frame=((parse("1"), parse("0")), (parse("0"), parse("1"))))
    fd, pack = compute(fs, (0, 0))
    with pytest.raises(DimensionMismatch):
        space_form_detect(pack, fd)
    rep = classify(pack, fd)
    assert rep.space_form is None
    assert "space_form" not in rep.verdicts(1e-8)


def test_report_verdict_keys():
    sf = SpaceForm(F(-1), 0, 0)
    rep = ClassificationReport(0, 0, None, 0, 0, sf)
    assert set(rep.verdicts(1e-8)) == {"codazzi", "cyclic_parallel", "rr_qsr", "einstein", "space_form", "hyperbolic_minus_one"}
    assert SpaceForm(F(-1), F(1), 0).label() is None


def test_soliton_fit_feeds_closed_form(s7_exact):
    spec, fd, pack = s7_exact
    fit = SolitonFit(F(1), F(1), F(0), F(0))
    assert nabla_s_closed_form_check(pack, spec.contact, fd, fit) == 0
