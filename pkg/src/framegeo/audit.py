"""Fuzzing the universal curvature identities on random frames.

Frame ``k`` of an audit with seed ``s`` is reproducible on its own: a point
``p`` on a 1/100 grid of [-1, 1]^3 and

    A(x) = I + 0.3 P(x - p),

where every entry of ``P`` is a random polynomial of degree <= 2 with no
constant term, coefficients on a 1/100 grid of [-1, 1].  ``A(p) = I`` so the
frame is invertible near the sample point whatever the draw.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .classify import rr_qsr_defect
from .expr import Chart, parse
from .frame import FrameSpec, compute, identity_suite

COORDS = ("x", "y", "z")
SCALE = "3/10"

# universal identities and the defect each must stay below in float mode
THRESHOLDS = {
    "torsion": 1e-9,
    "metric_compatibility": 1e-9,
    "bianchi_first": 1e-9,
    "riemann_antisymmetry": 1e-9,
    "pair_symmetry": 1e-9,
    "bianchi_second_contracted": 1e-6,
    "decomposition_3d": 1e-7,
    "rr_qsr": 1e-7,
}


def _rational(rng, lim: int = 100) -> Fraction:
    return Fraction(int(rng.integers(-lim, lim, endpoint=True)), 100)


def _poly_text(rng, p) -> str:
    shifted = [f"({c} - ({v}))" for c, v in zip(COORDS, p)]
    terms = [f"({_rational(rng)})*{s}" for s in shifted]
    for a, b in itertools.combinations_with_replacement(range(3), 2):
        terms.append(f"({_rational(rng)})*{shifted[a]}*{shifted[b]}")
    return " + ".join(terms)


def random_frame(seed: int, index: int):
    """``(FrameSpec, point, coefficient texts)`` for one audit frame."""
    rng = np.random.default_rng([seed, index])
    p = tuple(_rational(rng) for _ in COORDS)
    chart = Chart(COORDS)
    texts = []
    for i in range(3):
        row = []
        for m in range(3):
            entry = f"{SCALE}*({_poly_text(rng, p)})"
            row.append(f"1 + {entry}" if i == m else entry)
        texts.append(row)
    frame = tuple(tuple(parse(t, chart) for t in row) for row in texts)
    return FrameSpec(chart, frame=frame), p, texts


def audit_frame(args) -> dict:
    seed, index, degree = args
    fs, p, _ = random_frame(seed, index)
    fd, pack = compute(fs, p, degree, exact=False)
    defects = {k: float(v) for k, v in identity_suite(pack, fd).items()}
    defects["rr_qsr"] = float(rr_qsr_defect(pack, fd))
    return {"index": index, "point": [float(v) for v in p], "defects": defects}
