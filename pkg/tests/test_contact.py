from fractions import Fraction

import numpy as np
import pytest

from framegeo.contact import (
    ContactStructure,
    check_3d_closed_forms,
    check_almost_contact,
    check_kenmotsu,
    check_kenmotsu_curvature,
    evaluate_contact,
    kenmotsu_3d_curvature,
)
from framegeo.errors import DimensionMismatch, ValidationError
from framegeo.expr import Chart, parse
from framegeo.frame import FrameSpec, compute, values
from framegeo.specfile import builtin, sample_points

F = Fraction
STD_PHI = (("0", "1", "0"), ("-1", "0", "0"), ("0", "0", "0"))


def contact(chart, phi=STD_PHI, xi=("0", "0", "1")):
    return ContactStructure(tuple(tuple(parse(e, chart) for e in r) for r in phi), tuple(parse(e, chart) for e in xi))


def all_checks(cs, fd, pack):
    out = {}
    out.update(check_almost_contact(cs, fd))
    out.update(check_kenmotsu(cs, fd, pack))
    out.update(check_kenmotsu_curvature(cs, fd, pack))
    out.update(check_3d_closed_forms(cs, fd, pack))
    return out


def test_eta_is_metric_dual_of_xi(s7_exact):
    spec, fd, _ = s7_exact
    cp = evaluate_contact(spec.contact, fd)
    assert list(values(cp.eta)) == [0, 0, 1]
    assert values(cp.phi).tolist() == [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]


def test_phi_convention_maps_e1_to_minus_e2(s7_exact):
    spec, fd, _ = s7_exact
    phi = values(evaluate_contact(spec.contact, fd).phi)
    e1, e2 = np.array([1, 0, 0]), np.array([0, 1, 0])
    assert list(phi @ e1) == [0, -1, 0]
    assert list(phi @ e2) == [1, 0, 0]


def test_example_is_kenmotsu_exactly(s7_exact):
    spec, fd, pack = s7_exact
    checks = all_checks(spec.contact, fd, pack)
    assert len(checks) == 14
    for name, defect in checks.items():
        assert defect == 0, name


def test_example_is_kenmotsu_at_sampled_points(s7):
    for p in sample_points(s7, 5, seed=3):
        fd, pack = compute(s7.frame, p)
        for name, defect in all_checks(s7.contact, fd, pack).items():
            assert defect <= 1e-8, (name, p)


def test_warped_product_is_kenmotsu(warped):
    for p in sample_points(warped, 10, seed=0):
        fd, pack = compute(warped.frame, p)
        for name, defect in all_checks(warped.contact, fd, pack).items():
            assert defect <= 1e-8, (name, p)


def test_sphere_fails_nabla_xi():
    spec = builtin("sphere3")
    fd, pack = compute(spec.frame, (0, 0, 0), exact=True)
    assert all(v == 0 for v in check_almost_contact(spec.contact, fd).values())
    k = check_kenmotsu(spec.contact, fd, pack)
    assert k["nabla_xi"] >= F(1, 2)
    assert k["nabla_phi"] > 0


def test_flat_space_fails_nabla_xi():
    spec = builtin("flat3")
    cs = contact(spec.chart)
    fd, pack = compute(spec.frame, (F(1), F(2), F(3)), exact=True)
    assert check_kenmotsu(cs, fd, pack)["nabla_xi"] >= 1


def test_almost_contact_violations_detected(s7_exact):
    _, fd, pack = s7_exact
    chart = fd.spec.chart
    bad_phi = contact(chart, phi=(("0", "1", "0"), ("1", "0", "0"), ("0", "0", "0")))
    res = check_almost_contact(bad_phi, fd)
    assert res["phi_squared"] > 0
    bad_xi = contact(chart, xi=("0", "0", "2"))
    res = check_almost_contact(bad_xi, fd)
    assert res["eta_xi"] == 3
    tilted = contact(chart, xi=("1", "0", "0"))
    assert check_almost_contact(tilted, fd)["phi_xi"] > 0


def test_perturbed_phi_breaks_kenmotsu(s7_exact):
    _, fd, pack = s7_exact
    cs = contact(fd.spec.chart, phi=(("0", "1", "0"), ("-1", "0", "0"), ("0", "0", "1/10")))
    assert check_kenmotsu(cs, fd, pack)["nabla_phi"] > 0


def test_closed_form_curvature_is_kenmotsu_oracle(s7_exact):
    spec, fd, pack = s7_exact
    cp = evaluate_contact(spec.contact, fd)
    R = kenmotsu_3d_curvature(F(-6), values(fd.g), values(cp.xi), values(cp.eta), True)
    assert (R == values(pack.riem)).all()


def test_closed_forms_need_dimension_three():
    chart = Chart(("x", "y"))
    fs = FrameSpec(chart, frame=((parse("1"), parse("0")), (parse("0"), parse("1"))))
    cs = ContactStructure(((parse("0"), parse("0")), (parse("0"), parse("0"))), (parse("0"), parse("1")))
    fd, pack = compute(fs, (0, 0))
    with pytest.raises(DimensionMismatch):
        check_3d_closed_forms(cs, fd, pack)


def test_contact_shape_validated():
    chart = Chart(("x", "y", "z"))
    with pytest.raises(ValidationError):
        ContactStructure(((parse("0"),),), tuple(parse(e, chart) for e in ("0", "0", "1")))


def test_contact_dimension_mismatch_with_frame():
    chart = Chart(("x", "y"))
    fs = FrameSpec(chart, frame=((parse("1"), parse("0")), (parse("0"), parse("1"))))
    fd, _ = compute(fs, (0, 0))
    with pytest.raises(DimensionMismatch):
        evaluate_contact(contact(Chart(("x", "y", "z"))), fd)
