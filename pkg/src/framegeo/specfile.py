"""Manifold spec files, built-in manifolds and point sampling.

File format (UTF-8, line oriented, ``#`` starts a comment)::

    name: kenmotsu-s7
    coords: x y z
    domain: z > 0                      # repeatable
    frame: e1 = z, 0, 0                # one line per frame vector
    frame: e2 = 0, z, 0
    frame: e3 = 0, 0, -z
    metric: orthonormal                # or repeated "metric: g11 = <expr>" (i <= j)
    xi: 0, 0, 1                        # frame components
    phi: 0 1 0 / -1 0 0 / 0 0 0        # rows of [phi]^i_j
    points: 1 1 1; 0.5 2 3             # optional

``structure: c i j k = <expr>`` lines (``[e_i, e_j]`` has ``<expr> e_k``)
replace the ``frame:`` lines for left-invariant frames.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .contact import ContactStructure
from .errors import ExprSyntaxError, SamplingExhausted, SpecParseError, UnknownBuiltin, ValidationError
from .expr import Chart, Neg, Num, constant_value, parse, parse_constraint
from .frame import FrameSpec

BUILTIN_NAMES = ("kenmotsu-s7", "flat3", "hyperbolic3", "sphere3", "kenmotsu-warped")


@dataclass(frozen=True)
class ManifoldSpec:
    name: str
    frame: FrameSpec
    contact: ContactStructure | None = None
    points: tuple[tuple[Fraction, ...], ...] | None = None

    @property
    def chart(self) -> Chart:
        return self.frame.chart

    @property
    def dim(self) -> int:
        return self.frame.dim

    def __post_init__(self):
        if self.contact is not None and len(self.contact.xi) != self.dim:
            raise ValidationError("contact-shape", f"xi has {len(self.contact.xi)} components, frame has {self.dim}")
        if self.points is not None:
            for p in self.points:
                if len(p) != self.chart.dim:
                    raise ValidationError("points-shape", f"point {p} does not have {self.chart.dim} coordinates")


# -- parsing -------------------------------------------------------------------------
_KEYS = ("name", "coords", "domain", "frame", "metric", "structure", "xi", "phi", "points")


@dataclass
class _Line:
    key: str
    value: str
    lineno: int
    col: int  # 1-based column where value starts


def _split_lines(text: str) -> list[_Line]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if ":" not in line:
            raise SpecParseError("expected 'key: value'", lineno, 1)
        key, _, value = line.partition(":")
        key = key.strip()
        if key not in _KEYS:
            raise SpecParseError(f"unknown key {key!r}", lineno, raw.index(key) + 1)
        col = len(key) + 2 + (len(value) - len(value.lstrip())) + (len(line) - len(line.lstrip()))
        out.append(_Line(key, value.strip(), lineno, col))
    return out


def _expr(text: str, chart, line: _Line, shift: int = 0):
    try:
        return parse(text, chart)
    except ExprSyntaxError as exc:
        raise SpecParseError(str(exc), line.lineno, line.col + shift + exc.offset) from None


def _pieces(value: str, sep: str):
    """Split ``value`` on ``sep`` keeping each piece's offset."""
    pos = 0
    for part in value.split(sep):
        lead = len(part) - len(part.lstrip())
        yield part.strip(), pos + lead
        pos += len(part) + len(sep)


def _constant(text: str, line: _Line) -> Fraction:
    v = constant_value(_expr(text, (), line))
    if v is None:
        raise SpecParseError(f"{text!r} is not an exact numeric constant", line.lineno, line.col)
    return v


def parse_spec(text: str, source: str = "<string>") -> ManifoldSpec:
    """Parse spec-file text into a validated :class:`ManifoldSpec`."""
    lines = _split_lines(text)
    by_key: dict[str, list[_Line]] = {k: [] for k in _KEYS}
    for ln in lines:
        by_key[ln.key].append(ln)
    for single in ("name", "coords", "xi", "phi", "points"):
        if len(by_key[single]) > 1:
            raise SpecParseError(f"duplicate '{single}' line", by_key[single][1].lineno)
    if not by_key["name"]:
        raise ValidationError("name-required", f"{source}: missing 'name:' line")
    name = by_key["name"][0].value

    has_frame, has_structure = bool(by_key["frame"]), bool(by_key["structure"])
    if has_frame == has_structure:
        raise ValidationError("frame-xor-structure", "give exactly one of 'frame:' lines or 'structure:' lines")

    structure_entries = {}
    for ln in by_key["structure"]:
        m = re.fullmatch(r"c\s+(\d+)\s+(\d+)\s+(\d+)\s*=\s*(.+)", ln.value)
        if not m:
            raise SpecParseError("expected 'c i j k = <expr>'", ln.lineno, ln.col)
        i, j, k = (int(m.group(g)) for g in (1, 2, 3))
        structure_entries[(i, j, k)] = (m.group(4), ln, m.start(4))

    if by_key["coords"]:
        coords = tuple(by_key["coords"][0].value.split())
    elif has_structure:
        n = max(max(key) for key in structure_entries)
        coords = tuple(f"x{i + 1}" for i in range(n))
    else:
        raise ValidationError("coords-required", "frame mode needs a 'coords:' line")
    try:
        chart = Chart(coords)
    except ValueError as exc:
        raise ValidationError("coords-distinct", str(exc)) from None
    constraints = []
    for ln in by_key["domain"]:
        try:
            constraints.append(parse_constraint(ln.value, chart))
        except ExprSyntaxError as exc:
            raise SpecParseError(str(exc), ln.lineno, ln.col + exc.offset) from None
    chart = Chart(coords, tuple(constraints))
    n = chart.dim

    frame = structure = None
    if has_frame:
        rows = {}
        for ln in by_key["frame"]:
            m = re.fullmatch(r"e(\d+)\s*=\s*(.+)", ln.value)
            if not m:
                raise SpecParseError("expected 'e<i> = <expr>, <expr>, ...'", ln.lineno, ln.col)
            idx = int(m.group(1))
            if idx in rows:
                raise ValidationError("frame-duplicate", f"e{idx} defined twice")
            rows[idx] = tuple(_expr(t, chart, ln, m.start(2) + off) for t, off in _pieces(m.group(2), ","))
        if sorted(rows) != list(range(1, n + 1)):
            raise ValidationError("frame-shape", f"need frame vectors e1..e{n}, got {sorted(rows)}")
        frame = tuple(rows[i] for i in range(1, n + 1))
    else:
        grid = [[[None] * n for _ in range(n)] for _ in range(n)]
        for (i, j, k), (text_, ln, off) in structure_entries.items():
            if not all(1 <= v <= n for v in (i, j, k)):
                raise ValidationError("structure-index", f"index out of range in 'c {i} {j} {k}'")
            grid[k - 1][i - 1][j - 1] = _expr(text_, (), ln, off)
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if grid[k][i][j] is None:
                        partner = grid[k][j][i]
                        grid[k][i][j] = Num("0") if partner is None or partner == Num("0") else Neg(partner)
        structure = tuple(tuple(tuple(row) for row in plane) for plane in grid)

    metric = None
    metric_lines = by_key["metric"]
    if metric_lines and not (len(metric_lines) == 1 and metric_lines[0].value == "orthonormal"):
        entries = {}
        for ln in metric_lines:
            m = re.fullmatch(r"g(\d)(\d)\s*=\s*(.+)", ln.value)
            if not m:
                raise SpecParseError("expected 'orthonormal' or 'g<i><j> = <expr>'", ln.lineno, ln.col)
            i, j = int(m.group(1)), int(m.group(2))
            if not (1 <= i <= j <= n):
                raise ValidationError("metric-index", f"metric entries need 1 <= i <= j <= {n}, got g{i}{j}")
            entries[(i, j)] = _expr(m.group(3), chart, ln, m.start(3))
        grid = [[None] * n for _ in range(n)]
        for i in range(1, n + 1):
            if (i, i) not in entries:
                raise ValidationError("metric-diagonal", f"missing diagonal entry g{i}{i}")
            for j in range(i, n + 1):
                e = entries.get((i, j), Num("0"))
                grid[i - 1][j - 1] = grid[j - 1][i - 1] = e
        metric = tuple(tuple(row) for row in grid)

    fs = FrameSpec(chart, frame=frame, structure=structure, metric=metric)

    contact = None
    if bool(by_key["xi"]) != bool(by_key["phi"]):
        raise ValidationError("contact-pair", "'phi:' and 'xi:' must be given together")
    if by_key["xi"]:
        ln = by_key["xi"][0]
        xi = tuple(_expr(t, chart, ln, off) for t, off in _pieces(ln.value, ","))
        ln = by_key["phi"][0]
        phi_rows = []
        for row_text, off in _pieces_rows(ln.value):
            sep = "," if "," in row_text else None
            cells = row_text.split(sep)
            phi_rows.append(tuple(_expr(c.strip(), chart, ln, off) for c in cells if c.strip()))
        if len(xi) != n or len(phi_rows) != n or any(len(r) != n for r in phi_rows):
            raise ValidationError("contact-shape", f"phi must be {n}x{n} and xi must have {n} components")
        contact = ContactStructure(tuple(phi_rows), xi)

    points = None
    if by_key["points"]:
        ln = by_key["points"][0]
        points = tuple(tuple(_constant(t, ln) for t in p.split()) for p, _ in _pieces(ln.value, ";") if p)
    return ManifoldSpec(name, fs, contact, points)


def _pieces_rows(value: str):
    """Rows of a phi matrix: pieces separated by a standalone '/' token."""
    tokens = re.split(r"(?:^|\s)/(?:\s|$)", value)
    pos = 0
    for t in tokens:
        yield t.strip(), pos
        pos += len(t) + 1


def load_spec(path) -> ManifoldSpec:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), str(path))


# -- built-ins ------------------------------------------------------------------------
_PHI_STD = (("0", "1", "0"), ("-1", "0", "0"), ("0", "0", "0"))


def _contact(chart, phi, xi) -> ContactStructure:
    return ContactStructure(tuple(tuple(parse(e, chart) for e in row) for row in phi), tuple(parse(e, chart) for e in xi))


def _chart_frame(coords, rows, domain=()):
    chart = Chart(coords)
    chart = Chart(coords, tuple(parse_constraint(d, chart) for d in domain))
    return FrameSpec(chart, frame=tuple(tuple(parse(e, chart) for e in row) for row in rows))


def builtin(name: str) -> ManifoldSpec:
    """One of the bundled example manifolds, constructed directly (not from a file)."""
    if name == "kenmotsu-s7":
        fs = _chart_frame(("x", "y", "z"), [("z", "0", "0"), ("0", "z", "0"), ("0", "0", "-z")], ["z > 0"])
        return ManifoldSpec(name, fs, _contact(fs.chart, _PHI_STD, ("0", "0", "1")))
    if name == "flat3":
        fs = _chart_frame(("x", "y", "z"), [("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")])
        return ManifoldSpec(name, fs)
    if name == "hyperbolic3":
        fs = _chart_frame(("x", "y", "z"), [("z", "0", "0"), ("0", "z", "0"), ("0", "0", "z")], ["z > 0"])
        return ManifoldSpec(name, fs)
    if name == "sphere3":
        chart = Chart(("x1", "x2", "x3"))
        two, zero = Num("2"), Num("0")
        grid = [[[zero] * 3 for _ in range(3)] for _ in range(3)]
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            grid[k][i][j] = two
            grid[k][j][i] = Neg(two)
        fs = FrameSpec(chart, structure=tuple(tuple(tuple(r) for r in plane) for plane in grid))
        return ManifoldSpec(name, fs, _contact(chart, _PHI_STD, ("0", "0", "1")))
    if name == "kenmotsu-warped":
        a = "exp(-t)*(1 + (x^2 + y^2)/4)"
        fs = _chart_frame(("x", "y", "t"), [(a, "0", "0"), ("0", a, "0"), ("0", "0", "1")])
        return ManifoldSpec(name, fs, _contact(fs.chart, _PHI_STD, ("0", "0", "1")))
    raise UnknownBuiltin(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def bundled_spec_path(name: str) -> Path:
    """Path of the spec file shipped for a builtin."""
    return Path(str(resources.files("framegeo") / "data" / f"{name}.spec"))


def resolve(spec_or_name: str) -> ManifoldSpec:
    """A builtin name or a path to a spec file."""
    if spec_or_name in BUILTIN_NAMES:
        return builtin(spec_or_name)
    return load_spec(spec_or_name)


# -- sampling -----------------------------------------------------------------------
SAMPLE_BOX = 3
SAMPLE_GRID = 1000


def sample_points(spec: ManifoldSpec, count: int, seed: int = 0) -> list[tuple[Fraction, ...]]:
    """Deterministic points in the domain, on a 1/1000 grid of [-3, 3]^dim.

    Explicit ``points:`` in the spec take precedence over sampling.  The grid
    keeps points exact so the same sample serves float and rational runs.
    """
    if spec.points is not None:
        return [tuple(p) for p in spec.points]
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    out = []
    lim = SAMPLE_BOX * SAMPLE_GRID
    attempts = 0
    while len(out) < count:
        if attempts >= 1000 * count:
            raise SamplingExhausted(f"no admissible point found after {attempts} draws; is the domain empty?")
        attempts += 1
        raw = rng.integers(-lim, lim, size=spec.chart.dim, endpoint=True)
        p = tuple(Fraction(int(v), SAMPLE_GRID) for v in raw)
        if spec.chart.contains(p):
            out.append(p)
    return out
