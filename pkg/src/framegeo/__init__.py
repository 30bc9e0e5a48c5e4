"""Curvature, Kenmotsu structures and eta-Ricci solitons in moving frames, evaluated with jets."""

from .classify import (
    ClassificationReport,
    SpaceForm,
    classify,
    codazzi_defect,
    cyclic_parallel_defect,
    nabla_s_closed_form_check,
    phi_ricci_defect,
    rr_qsr_defect,
    space_form_detect,
)
from .contact import (
    ContactStructure,
    check_3d_closed_forms,
    check_almost_contact,
    check_kenmotsu,
    check_kenmotsu_curvature,
    evaluate_contact,
)
from .errors import FrameGeoError
from .expr import Chart, eval_jet, eval_value, parse, to_text
from .frame import CurvaturePack, FrameSpec, compute, curvature, evaluate_frame, identity_suite, levi_civita
from .jet import Jet, jet_const, jet_var
from .soliton import SolitonFit, fit_soliton, fit_soliton_points, lie_derivative_metric, soliton_residual
from .specfile import ManifoldSpec, builtin, load_spec, parse_spec, resolve, sample_points

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "ClassificationReport",
    "ContactStructure",
    "CurvaturePack",
    "FrameGeoError",
    "FrameSpec",
    "Jet",
    "ManifoldSpec",
    "SolitonFit",
    "SpaceForm",
    "builtin",
    "check_3d_closed_forms",
    "check_almost_contact",
    "check_kenmotsu",
    "check_kenmotsu_curvature",
    "classify",
    "codazzi_defect",
    "compute",
    "curvature",
    "cyclic_parallel_defect",
    "eval_jet",
    "eval_value",
    "evaluate_contact",
    "evaluate_frame",
    "fit_soliton",
    "fit_soliton_points",
    "identity_suite",
    "jet_const",
    "jet_var",
    "levi_civita",
    "lie_derivative_metric",
    "load_spec",
    "nabla_s_closed_form_check",
    "parse",
    "parse_spec",
    "phi_ricci_defect",
    "resolve",
    "rr_qsr_defect",
    "sample_points",
    "soliton_residual",
    "space_form_detect",
    "to_text",
]
