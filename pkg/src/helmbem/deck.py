"""Input deck (NC.inp) and node/element file parsing and writing."""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .kernels import PlaneWave, PointSource
from .mesh import BOUNDARY, EVALUATION, Element, Mesh, Node, build_mesh

METHODS = {0: "NoFMM", 1: "SLFMM", 4: "MLFMM"}
METHOD_CODES = {v: k for k, v in METHODS.items()}
SOLVERS = {0: "CGS", 4: "direct"}
SOLVER_CODES = {v: k for k, v in SOLVERS.items()}
PRECONDITIONERS = {0: "row_scaling", 1: "incomplete_lu"}
PRECONDITIONER_CODES = {v: k for k, v in PRECONDITIONERS.items()}
BC_KINDS = ("PRES", "VELO", "ADMI")


class DeckError(ValueError):
    pass


# -- piecewise linear curves ---------------------------------------------


@dataclass
class Curve:
    id: int
    nodes: list  # [(step, value), ...]

    def __post_init__(self):
        self.nodes = [(float(s), float(v)) for s, v in self.nodes]
        st = [s for s, _ in self.nodes]
        if len(st) < 1 or any(b <= a for a, b in zip(st, st[1:])):
            raise DeckError(f"curve {self.id}: node steps must be strictly increasing")

    def value(self, s: float) -> float:
        return curve_value(self, s)


def curve_value(curve: Curve, s: float) -> float:
    """Linear interpolation between the bracketing nodes."""
    st = np.array([a for a, _ in curve.nodes])
    va = np.array([b for _, b in curve.nodes])
    tol = 1e-12 * max(1.0, abs(st).max())
    if s < st[0] - tol or s > st[-1] + tol:
        raise DeckError(f"step {s} outside the range [{st[0]}, {st[-1]}] of curve {curve.id}")
    return float(np.interp(s, st, va))


@dataclass
class FrequencyPlan:
    num_steps: int
    step_size: float
    start_index: float
    curve_nodes: list
    dummy: int = 1

    def __post_init__(self):
        self.curve = Curve(0, self.curve_nodes)
        self.curve_nodes = self.curve.nodes
        if len(self.curve_nodes) < 2:
            raise DeckError("frequency curve needs at least two nodes")

    def step(self, n: int) -> float:
        return self.start_index + self.step_size * n

    def frequency_at(self, n: int) -> float:
        return frequency_at(self, n)


def frequency_at(plan: FrequencyPlan, n: int) -> float:
    if not 1 <= n <= plan.num_steps:
        raise DeckError(f"frequency step {n} outside 1..{plan.num_steps}")
    f = curve_value(plan.curve, plan.step(n))
    if f <= 0:
        raise DeckError(f"frequency step {n} evaluates to a non-positive frequency {f}")
    return f


# -- boundary conditions and sources ---------------------------------------


@dataclass
class BoundaryCondition:
    first: int
    last: int
    kind: str
    value: complex
    curve_re: int = -1
    curve_im: int = -1


@dataclass
class SourceSpec:
    kind: str  # "plane" | "point"
    vector: tuple
    strength: complex = 1.0
    curve_re: int = -1
    curve_im: int = -1
    number: int = 0

    def __post_init__(self):
        v = np.asarray(self.vector, float)
        if self.kind == "plane":
            nrm = np.linalg.norm(v)
            if nrm == 0:
                raise DeckError("plane-wave direction must be nonzero")
            # leave unit vectors untouched so a written deck reads back identically
            if abs(nrm - 1.0) > 1e-12:
                v = v / nrm
        elif self.kind != "point":
            raise DeckError(f"unknown source kind {self.kind}")
        self.vector = tuple(float(a) for a in v)

    def at_step(self, curves, s):
        amp = _scaled(self.strength, self.curve_re, self.curve_im, curves, s)
        if self.kind == "plane":
            return PlaneWave(np.array(self.vector), amp)
        return PointSource(np.array(self.vector), amp)


def _scaled(value, cre, cim, curves, s):
    re, im = value.real, value.imag
    if cre >= 0:
        re *= curves[cre].value(s)
    if cim >= 0:
        im *= curves[cim].value(s)
    return complex(re, im)


@dataclass
class ResolvedBC:
    kind: str
    value: complex
    velocity: complex = 0.0j  # vibrating part for ADMI + VELO


def effective_bc(bcs, curves, element_id: int, step: float) -> ResolvedBC:
    """Condition on one element at a frequency step; sound hard by default."""
    found = {}
    for bc in bcs:
        if bc.first <= element_id <= bc.last:
            found[bc.kind] = _scaled(complex(bc.value), bc.curve_re, bc.curve_im, curves, step)
    if not found:
        return ResolvedBC("VELO", 0.0j)
    kinds = set(found)
    if kinds == {"ADMI", "VELO"}:
        return ResolvedBC("ADMI", found["ADMI"], found["VELO"])
    if len(kinds) > 1:
        raise DeckError(f"element {element_id}: conflicting boundary conditions {sorted(kinds)}")
    (k, v), = found.items()
    return ResolvedBC(k, v)


def resolve_boundary_conditions(bcs, curves, element_ids, step):
    """Vectorised :func:`effective_bc` -> (kinds, values, velocities)."""
    ids = np.asarray(element_ids)
    n = len(ids)
    kind = np.full(n, "", dtype=object)
    val = {k: np.zeros(n, complex) for k in BC_KINDS}
    has = {k: np.zeros(n, bool) for k in BC_KINDS}
    for bc in bcs:
        sel = (ids >= bc.first) & (ids <= bc.last)
        if sel.any():
            val[bc.kind][sel] = _scaled(complex(bc.value), bc.curve_re, bc.curve_im, curves, step)
            has[bc.kind][sel] = True
    conflict = (has["PRES"] & (has["VELO"] | has["ADMI"]))
    if conflict.any():
        raise DeckError(f"element {ids[np.argmax(conflict)]}: conflicting boundary conditions")
    kind[:] = "VELO"
    kind[has["PRES"]] = "PRES"
    kind[has["ADMI"]] = "ADMI"
    values = np.where(has["PRES"], val["PRES"], np.where(has["ADMI"], val["ADMI"], val["VELO"]))
    extra = np.where(has["ADMI"] & has["VELO"], val["VELO"], 0.0)
    return list(kind), values, extra


# -- job ---------------------------------------------------------------------


@dataclass
class JobSpec:
    title: tuple
    control1: tuple
    plan: FrequencyPlan
    n_groups: int
    n_elements: int
    n_nodes: int
    min_expansion_length: int
    n_levels_sym: int
    dummies: tuple
    method: str
    solver: str
    n_plane: int
    n_point: int
    problem: int  # 0 exterior, 1 interior
    box_length: float
    preconditioner: str
    main3: tuple
    c: float
    rho: float
    harmonic_factor: float
    node_files: list
    element_files: list
    bcs: list
    sources: list
    curves: dict
    base_dir: str = "."
    mesh: Mesh | None = field(default=None, compare=False, repr=False)

    @property
    def tau(self) -> int:
        return 1 if self.problem == 0 else -1

    def sources_at(self, n: int):
        s = self.plan.step(n)
        return [src.at_step(self.curves, s) for src in self.sources]

    def fields(self):
        """Comparable field dict (mesh excluded)."""
        d = dict(self.__dict__)
        d.pop("mesh", None)
        d.pop("base_dir", None)
        return d


class _Lines:
    def __init__(self, text):
        self.lines = []
        for raw in text.splitlines():
            s = raw.strip()
            if s and not s.startswith("#"):
                self.lines.append(s)
        self.i = 0

    def next(self, what="line"):
        if self.i >= len(self.lines):
            raise DeckError(f"unterminated deck: expected {what}, found end of input (missing END?)")
        s = self.lines[self.i]
        self.i += 1
        return s

    def peek(self):
        return self.lines[self.i] if self.i < len(self.lines) else None

    def numbers(self, n, what):
        tok = self.next(what).split()
        if len(tok) < n:
            raise DeckError(f"{what}: expected {n} values, got {len(tok)}: {' '.join(tok)!r}")
        try:
            return [float(t) for t in tok[:n]]
        except ValueError:
            raise DeckError(f"{what}: malformed number in {' '.join(tok)!r}") from None


_SECTIONS = ("NODES", "ELEMENTS", "BOUNDARY", "PLANE WAVES", "PLANE", "POINT SOURCES", "POINT",
             "CURVES", "POST PROCESS", "END")


def _keyword(line):
    u = " ".join(line.upper().split())
    for kw in _SECTIONS:
        if u == kw:
            return kw
    return None


def parse_deck(text: str, base_dir: str | None = None, load_mesh: bool = True) -> JobSpec:
    """Parse deck text; node/element files resolve relative to base_dir."""
    base_dir = base_dir or "."
    raw_lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if len(raw_lines) < 2:
        raise DeckError("deck needs two header lines")
    title = (raw_lines[0].strip(), raw_lines[1].strip())
    L = _Lines("\n".join(raw_lines[2:]))

    control1 = tuple(int(v) for v in L.numbers(6, "control parameters I"))
    dummy, nsteps, h, i0 = L.numbers(4, "control parameters II")
    cnr, nn = L.numbers(2, "frequency curve header")
    if int(cnr) != 0:
        raise DeckError("the frequency curve must have number 0")
    nodes = [tuple(L.numbers(2, "frequency curve node")) for _ in range(int(nn))]
    plan = FrequencyPlan(int(nsteps), h, i0, nodes, int(dummy))

    m1 = L.numbers(9, "main parameters I")
    fmm_code, solver_code = int(m1[7]), int(m1[8])
    if fmm_code not in METHODS:
        raise DeckError(f"FMM_type must be one of 0, 1, 4; got {fmm_code}")
    if solver_code not in SOLVERS:
        raise DeckError(f"solver must be 0 or 4; got {solver_code}")
    m2 = L.numbers(5, "main parameters II")
    pre = int(m2[4])
    if pre not in PRECONDITIONERS:
        raise DeckError(f"preconditioner code must be 0 or 1; got {pre}")
    main3 = tuple(L.next("main parameters III").split())
    c, rho, harm = L.numbers(3, "main parameters IV")
    if c <= 0 or rho <= 0:
        raise DeckError("speed of sound and density must be positive")

    node_files, elem_files, bcs, sources, curves = [], [], [], [], {}
    n_plane, n_point = int(m2[0]), int(m2[1])
    while True:
        line = L.next("section keyword")
        kw = _keyword(line)
        if kw is None:
            raise DeckError(f"unknown section keyword {line!r}")
        if kw == "END":
            break
        if kw in ("NODES", "ELEMENTS"):
            target = node_files if kw == "NODES" else elem_files
            while L.peek() is not None and _keyword(L.peek()) is None:
                target.append(L.next())
        elif kw == "BOUNDARY":
            while True:
                ln = L.next("boundary condition or RETURN")
                if ln.upper() == "RETURN":
                    break
                bcs.append(_parse_bc(ln))
        elif kw in ("PLANE WAVES", "PLANE", "POINT SOURCES", "POINT"):
            kind = "plane" if kw.startswith("PLANE") else "point"
            count = n_plane if kind == "plane" else n_point
            for _ in range(count):
                sources.append(_parse_source(L.next("source line"), kind))
        elif kw == "CURVES":
            nc, _ = L.numbers(2, "curves header")
            for _ in range(int(nc)):
                cid, cn = L.numbers(2, "curve header")
                pts = [tuple(L.numbers(2, "curve node")) for _ in range(int(cn))]
                if int(cid) in curves or int(cid) < 1:
                    raise DeckError(f"invalid or duplicate curve id {int(cid)}")
                curves[int(cid)] = Curve(int(cid), pts)
        elif kw == "POST PROCESS":
            pass

    for obj in bcs + sources:
        for cid in (obj.curve_re, obj.curve_im):
            if cid >= 0 and cid not in curves:
                raise DeckError(f"reference to undefined curve {cid}")

    job = JobSpec(title, control1, plan, int(m1[0]), int(m1[1]), int(m1[2]), int(m1[3]) or 8,
                  int(m1[4]), (int(m1[5]), int(m1[6])), METHODS[fmm_code], SOLVERS[solver_code],
                  n_plane, n_point, int(m2[2]), float(m2[3]), PRECONDITIONERS[pre], main3,
                  c, rho, harm, node_files, elem_files, bcs, sources, curves, base_dir)
    if load_mesh:
        job.mesh = load_mesh_files(job)
    return job


def _parse_bc(line):
    tok = line.split()
    try:
        if tok[0].upper() != "ELEM" or tok[2].upper() != "TO" or len(tok) != 9:
            raise IndexError
        kind = tok[4].upper()
        if kind not in BC_KINDS:
            raise DeckError(f"unknown boundary condition type {tok[4]!r}")
        return BoundaryCondition(int(tok[1]), int(tok[3]), kind, complex(float(tok[5]), float(tok[7])),
                                 int(tok[6]), int(tok[8]))
    except (IndexError, ValueError):
        raise DeckError(f"malformed boundary condition line {line!r}") from None


def _parse_source(line, kind):
    tok = line.split()
    if len(tok) != 8:
        raise DeckError(f"malformed source line {line!r}")
    try:
        return SourceSpec(kind, tuple(float(t) for t in tok[1:4]), complex(float(tok[4]), float(tok[6])),
                          int(tok[5]), int(tok[7]), int(tok[0]))
    except ValueError:
        raise DeckError(f"malformed source line {line!r}") from None


def read_deck(path: str, load_mesh: bool = True) -> JobSpec:
    with open(path) as fh:
        text = fh.read()
    return parse_deck(text, os.path.dirname(os.path.abspath(path)), load_mesh)


# -- node and element files ------------------------------------------------


def _data_lines(text):
    return [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_nodes(text: str) -> list:
    rows = _data_lines(text)
    if not rows:
        raise DeckError("empty node file")
    count = int(rows[0][0])
    out, seen = [], set()
    for r in rows[1:]:
        if len(r) != 4:
            raise DeckError(f"malformed node line {' '.join(r)!r}")
        try:
            nid = int(r[0])
            pos = (float(r[1]), float(r[2]), float(r[3]))
        except ValueError:
            raise DeckError(f"malformed node line {' '.join(r)!r}") from None
        if nid in seen:
            raise DeckError(f"duplicate node id {nid}")
        seen.add(nid)
        out.append(Node(nid, pos))
    if count != len(out):
        warnings.warn(f"node file announces {count} nodes but lists {len(out)}", stacklevel=2)
    return out


def parse_elements(text: str) -> list:
    rows = _data_lines(text)
    if not rows:
        raise DeckError("empty element file")
    count = int(rows[0][0])
    out = []
    for r in rows[1:]:
        if len(r) not in (7, 8):
            raise DeckError(f"element line needs 7 or 8 fields, got {len(r)}: {' '.join(r)!r}")
        try:
            v = [int(t) for t in r]
        except ValueError:
            raise DeckError(f"malformed element line {' '.join(r)!r}") from None
        nv = len(r) - 4
        kind = v[1 + nv]
        if kind not in (BOUNDARY, EVALUATION):
            raise DeckError(f"element {v[0]}: unknown element type flag {kind}")
        out.append(Element(v[0], tuple(v[1:1 + nv]), kind, v[-1]))
    if count != len(out):
        warnings.warn(f"element file announces {count} elements but lists {len(out)}", stacklevel=2)
    return out


def load_mesh_files(job: JobSpec) -> Mesh:
    nodes, elems = [], []
    for f in job.node_files:
        with open(os.path.join(job.base_dir, f)) as fh:
            nodes += parse_nodes(fh.read())
    for f in job.element_files:
        with open(os.path.join(job.base_dir, f)) as fh:
            elems += parse_elements(fh.read())
    if len({n.id for n in nodes}) != len(nodes):
        raise DeckError("duplicate node ids across node files")
    if len({e.id for e in elems}) != len(elems):
        raise DeckError("duplicate element ids across element files")
    mesh = build_mesh(nodes, elems)
    if len(elems) != job.n_elements or len(nodes) != job.n_nodes:
        warnings.warn(
            f"main parameters announce {job.n_elements} elements / {job.n_nodes} nodes, "
            f"files contain {len(elems)} / {len(nodes)}; using the files", stacklevel=2)
    return mesh


def format_nodes(ids, points) -> str:
    lines = [str(len(ids))]
    lines += [f"{int(i)} {p[0]:.16e} {p[1]:.16e} {p[2]:.16e}" for i, p in zip(ids, points)]
    return "\n".join(lines) + "\n"


def format_elements(ids, vertex_ids, kind, group) -> str:
    lines = [str(len(ids))]
    for i, vs, k, g in zip(ids, vertex_ids, kind, group):
        vs = [int(v) for v in vs if v >= 0]
        lines.append(" ".join(str(a) for a in [int(i), *vs, int(k), 0, int(g)]))
    return "\n".join(lines) + "\n"


def write_mesh_files(mesh: Mesh, directory: str, stem: str = "Mesh"):
    """Write node and element files (boundary and evaluation elements
    separately); returns (node_files, element_files)."""
    os.makedirs(directory, exist_ok=True)
    nf = f"{stem}Nodes.txt"
    with open(os.path.join(directory, nf), "w") as fh:
        fh.write(format_nodes(mesh.node_ids, mesh.points))
    efs = []
    for kind, name in ((BOUNDARY, f"{stem}Elements.txt"), (EVALUATION, f"{stem}EvalElements.txt")):
        sel = np.flatnonzero(mesh.kind == kind)
        if not len(sel):
            continue
        vid = np.where(mesh.conn[sel] >= 0, mesh.node_ids[np.maximum(mesh.conn[sel], 0)], -1)
        with open(os.path.join(directory, name), "w") as fh:
            fh.write(format_elements(mesh.element_ids[sel], vid, mesh.kind[sel], mesh.group[sel]))
        efs.append(name)
    return [nf], efs


def _g(x):
    return f"{x:.16e}"


def format_deck(job: JobSpec) -> str:
    """Serialise a JobSpec back to deck text."""
    p = job.plan
    out = [job.title[0], job.title[1], "##", "## Controlparameters I",
           " ".join(str(v) for v in job.control1),
           "## Controlparameter II (dummy, nSteps, stepsize, i0)",
           f"{p.dummy} {p.num_steps} {_g(p.step_size)} {_g(p.start_index)}",
           "## Frequency curve", f"0 {len(p.curve_nodes)}"]
    out += [f"{_g(s)} {_g(f)}" for s, f in p.curve_nodes]
    out += ["## Main Parameters I",
            " ".join(str(v) for v in [job.n_groups, job.n_elements, job.n_nodes, job.min_expansion_length,
                                      job.n_levels_sym, *job.dummies, METHOD_CODES[job.method],
                                      SOLVER_CODES[job.solver]]),
            "## Main Parameters II",
            f"{job.n_plane} {job.n_point} {job.problem} {_g(job.box_length)} "
            f"{PRECONDITIONER_CODES[job.preconditioner]}",
            "## Main Parameters III", " ".join(job.main3),
            "## Main Parameters IV", f"{_g(job.c)} {_g(job.rho)} {_g(job.harmonic_factor)}",
            "NODES", *job.node_files, "ELEMENTS", *job.element_files, "BOUNDARY"]
    for bc in job.bcs:
        out.append(f"ELEM {bc.first} TO {bc.last} {bc.kind} {_g(bc.value.real)} {bc.curve_re} "
                   f"{_g(bc.value.imag)} {bc.curve_im}")
    out.append("RETURN")
    for kind, kw in (("plane", "PLANE WAVES"), ("point", "POINT SOURCES")):
        srcs = [s for s in job.sources if s.kind == kind]
        if srcs:
            out.append(kw)
            for s in srcs:
                v = s.vector
                out.append(f"{s.number} {_g(v[0])} {_g(v[1])} {_g(v[2])} {_g(s.strength.real)} "
                           f"{s.curve_re} {_g(s.strength.imag)} {s.curve_im}")
    if job.curves:
        out += ["CURVES", f"{len(job.curves)} {max(len(c.nodes) for c in job.curves.values())}"]
        for cid in sorted(job.curves):
            cv = job.curves[cid]
            out.append(f"{cid} {len(cv.nodes)}")
            out += [f"{_g(s)} {_g(v)}" for s, v in cv.nodes]
    out += ["POST PROCESS", "END", ""]
    return "\n".join(out)


def make_job(mesh: Mesh, frequencies=None, *, plan: FrequencyPlan | None = None, sources=(),
             bcs=(), curves=None, method="NoFMM", solver="CGS", problem=0, box_length=0.0,
             preconditioner="row_scaling", c=340.0, rho=1.3, min_expansion_length=8,
             node_files=("MeshNodes.txt",), element_files=("MeshElements.txt",),
             title=("helmbem", "generated deck")) -> JobSpec:
    """Convenience constructor; `frequencies` builds a plan with one node per step."""
    if plan is None:
        f = list(frequencies)
        nodes = [(float(i + 1), float(v)) for i, v in enumerate(f)]
        if len(nodes) == 1:
            nodes = [(0.0, f[0]), (1.0, f[0])]
        plan = FrequencyPlan(len(f), 1.0, 0.0, nodes)
    srcs = list(sources)
    nb = int(np.sum(mesh.kind == BOUNDARY))
    return JobSpec(title, (0, 0, 0, 0, 7, 0), plan, 2, mesh.n_elements, len(mesh.points),
                   min_expansion_length, 0, (2, 1), method, solver,
                   sum(s.kind == "plane" for s in srcs), sum(s.kind == "point" for s in srcs),
                   problem, float(box_length), preconditioner, ("0", "0", "0", "0"), c, rho, 1.0,
                   list(node_files), list(element_files), list(bcs), srcs, dict(curves or {}),
                   ".", mesh) if nb else None


def write_job(job: JobSpec, directory: str, deck_name: str = "NC.inp") -> str:
    """Write mesh files and the deck; returns the deck path."""
    nf, ef = write_mesh_files(job.mesh, directory)
    job = replace(job, node_files=nf, element_files=ef, base_dir=directory)
    path = os.path.join(directory, deck_name)
    with open(path, "w") as fh:
        fh.write(format_deck(job))
    return path
