"""Surface quantities, exterior field evaluation and the output tree.

Output layout (one directory per frequency step under ``be.out``)::

    be.out/be.{n}/pBoundary   count, then "id Re(p) Im(p)" per boundary element
    be.out/be.{n}/vBoundary   count, then "id Re(v) Im(v)" per boundary element
    be.out/be.{n}/pEvalGrid   count, then "id Re(p) Im(p)" per evaluation node
    be.out/be.{n}/vEvalGrid   count, then "id Re(vx) Im(vx) Re(vy) Im(vy) Re(vz) Im(vz)"

Numbers are written with ``%.16e`` so reading them back is exact.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numba as nb
import numpy as np
from scipy.spatial import cKDTree

from .kernels import WaveContext, incident_potential, incident_velocity
from .mesh import Mesh
from .quadrature import STATUS_OK, QuadratureConfig, QuadratureError, _nonsingular, kernel_counter

ON_SURFACE_TOL = 1e-9
NUMBER_FORMAT = "%.16e"

_jit = nb.njit(cache=True, nogil=True)


@dataclass
class SolutionField:
    step: int
    frequency: float
    boundary_ids: np.ndarray
    phi: np.ndarray  # potential per boundary element
    v: np.ndarray  # normal velocity per boundary element
    iwr: complex
    eval_ids: np.ndarray | None = None
    eval_p: np.ndarray | None = None
    eval_v: np.ndarray | None = None  # (M, 3)

    @property
    def p(self) -> np.ndarray:
        return self.iwr * self.phi


def evaluation_points(mesh: Mesh):
    """Unique vertices of the evaluation elements as (node ids, points)."""
    ev = mesh.evaluation_index
    if len(ev) == 0:
        return np.zeros(0, np.int64), np.zeros((0, 3))
    rows = np.unique(mesh.conn[ev][mesh.conn[ev] >= 0])
    return mesh.node_ids[rows], mesh.points[rows]


def _point_triangle_distance(p, a, b, c):
    """Distance from p to the triangle abc (closest-point regions)."""
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return np.linalg.norm(ap)
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return np.linalg.norm(bp)
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        return np.linalg.norm(ap - d1 / (d1 - d3) * ab)
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return np.linalg.norm(cp)
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        return np.linalg.norm(ap - d2 / (d2 - d6) * ac)
    va = d3 * d6 - d5 * d4
    if va <= 0 and d4 - d3 >= 0 and d5 - d6 >= 0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return np.linalg.norm(p - (b + w * (c - b)))
    den = 1.0 / (va + vb + vc)
    return np.linalg.norm(ap - ab * (vb * den) - ac * (vc * den))


def surface_distance(points, mesh: Mesh) -> np.ndarray:
    """Exact distance of each point to the nearest boundary element."""
    bnd = mesh.boundary()
    pts = np.atleast_2d(np.asarray(points, float))
    reach = np.sqrt(np.max(np.sum((bnd.vertices - bnd.midpoints[:, None]) ** 2, axis=2)))
    tree = cKDTree(bnd.midpoints)
    near_mid, _ = tree.query(pts)
    out = np.empty(len(pts))
    for q, x in enumerate(pts):
        cand = tree.query_ball_point(x, near_mid[q] + 2 * reach)
        best = np.inf
        for e in cand:
            v = bnd.vertices[e]
            d = _point_triangle_distance(x, v[0], v[1], v[2])
            if bnd.nvert[e] == 4:
                d = min(d, _point_triangle_distance(x, v[0], v[2], v[3]))
            best = min(best, d)
        out[q] = best
    return out


@_jit
def _eval_core(pts, verts, nv, nrm, k, phi, v, thr, tri_off, tri_bary, tri_w, glx, glw, iparams,
               ratio, out_phi, out_grad, skip):
    acc = np.zeros(8, np.complex128)
    for q in range(len(pts)):
        if skip[q]:
            continue
        x = pts[q]
        s0 = 0.0j
        s1 = 0.0j
        s2 = 0.0j
        s3 = 0.0j
        for j in range(len(nv)):
            for c in range(8):
                acc[c] = 0.0
            st = _nonsingular(x, verts[j], nv[j], nrm[j], k, thr, tri_off, tri_bary, tri_w, glx,
                              glw, iparams, ratio, 0, acc)
            if st != STATUS_OK:
                return q, j
            s0 += acc[1] * phi[j] - acc[0] * v[j]
            s1 += acc[5] * phi[j] - acc[2] * v[j]
            s2 += acc[6] * phi[j] - acc[3] * v[j]
            s3 += acc[7] * phi[j] - acc[4] * v[j]
        out_phi[q] = s0
        out_grad[q, 0] = s1
        out_grad[q, 1] = s2
        out_grad[q, 2] = s3
    return -1, -1


def evaluate_exterior(phi, v, points, mesh: Mesh, wave: WaveContext, sources=(),
                      quad: QuadratureConfig | None = None, check_distance: bool = True):
    """Potential and its gradient at off-surface points.

    phi(x) = phi_inc(x) + tau sum_j (H_j phi_j - G_j v_j); the gradient uses
    the x-derivatives of the same kernels, one coordinate axis at a time.
    Points closer than 1e-9 m to the surface get NaN and a warning.
    """
    quad = quad or QuadratureConfig()
    bnd = mesh.boundary() if np.any(mesh.kind != 0) else mesh
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, float)).reshape(-1, 3))
    phi = np.asarray(phi, complex)
    v = np.asarray(v, complex)
    if phi.shape != (bnd.n_elements,) or v.shape != (bnd.n_elements,):
        raise ValueError("surface solution does not match the boundary element count")
    skip = np.zeros(len(pts), bool)
    if check_distance and len(pts):
        skip = surface_distance(pts, bnd) < ON_SURFACE_TOL
        if np.any(skip):
            warnings.warn(f"{int(skip.sum())} evaluation point(s) lie on the surface; "
                          "their values are set to NaN", stacklevel=2)
    p = quad.packed()
    out_phi = np.zeros(len(pts), complex)
    out_grad = np.zeros((len(pts), 3), complex)
    kernel_counter.add(len(pts) * bnd.n_elements)
    bad_q, bad_j = _eval_core(pts, np.ascontiguousarray(bnd.vertices), np.ascontiguousarray(bnd.nvert),
                              np.ascontiguousarray(bnd.normals), float(wave.k), phi, v, p.thr, p.tri_off,
                              p.tri_bary, p.tri_w, p.gl_x, p.gl_w, p.iparams, p.ratio, out_phi,
                              out_grad, skip)
    if bad_q >= 0:
        raise QuadratureError(int(bnd.element_ids[bad_j]), quad.max_depth)
    out_phi *= wave.tau
    out_grad *= wave.tau
    axes = np.eye(3)
    for src in sources:
        out_phi += incident_potential(src, pts, wave.k) / wave.iwr
        for c in range(3):
            out_grad[:, c] += incident_velocity(src, pts, np.broadcast_to(axes[c], pts.shape),
                                                wave.k) / wave.iwr
    out_phi[skip] = np.nan
    out_grad[skip] = np.nan
    return out_phi, out_grad


def solution_field(step, wave: WaveContext, mesh: Mesh, phi, v, sources=(), quad=None) -> SolutionField:
    """Surface solution plus the field at all evaluation nodes of `mesh`."""
    ids, pts = evaluation_points(mesh)
    bnd_ids = mesh.element_ids[mesh.boundary_index]
    field = SolutionField(step, wave.frequency, bnd_ids, np.asarray(phi, complex),
                          np.asarray(v, complex), wave.iwr)
    if len(ids):
        ephi, egrad = evaluate_exterior(phi, v, pts, mesh, wave, sources, quad)
        field.eval_ids, field.eval_p, field.eval_v = ids, wave.iwr * ephi, egrad
    else:
        field.eval_ids = ids
        field.eval_p = np.zeros(0, complex)
        field.eval_v = np.zeros((0, 3), complex)
    return field


# -- files ---------------------------------------------------------------------


def _write_table(path: Path, ids, values):
    values = np.asarray(values, complex)
    values = values.reshape(len(ids), -1) if len(ids) else values.reshape(0, 1)
    cols = np.empty((len(ids), 2 * values.shape[1]))
    cols[:, 0::2] = values.real
    cols[:, 1::2] = values.imag
    with open(path, "w") as fh:
        fh.write(f"{len(ids)}\n")
        for i, row in zip(ids, cols):
            fh.write(f"{int(i)} " + " ".join(NUMBER_FORMAT % x for x in row) + "\n")


def read_table(path):
    """(ids, complex values of shape (count, ncomp)) from an output file."""
    with open(path) as fh:
        count = int(fh.readline())
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != count:
        raise ValueError(f"{path}: header says {count} rows, found {len(rows)}")
    if count == 0:
        return np.zeros(0, np.int64), np.zeros((0, 1), complex)
    ids = np.array([int(r[0]) for r in rows], np.int64)
    num = np.array([[float(x) for x in r[1:]] for r in rows])
    return ids, num[:, 0::2] + 1j * num[:, 1::2]


def step_directory(root, step: int) -> Path:
    return Path(root) / "be.out" / f"be.{step}"


def write_outputs(field: SolutionField, root) -> Path:
    """Write the four result files of one frequency step; returns its folder."""
    d = step_directory(root, field.step)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output folder {d}: {exc}") from exc
    _write_table(d / "pBoundary", field.boundary_ids, field.p)
    _write_table(d / "vBoundary", field.boundary_ids, field.v)
    ids = field.eval_ids if field.eval_ids is not None else np.zeros(0, np.int64)
    ep = field.eval_p if field.eval_p is not None else np.zeros(0, complex)
    ev = field.eval_v if field.eval_v is not None else np.zeros((0, 3), complex)
    _write_table(d / "pEvalGrid", ids, ep)
    _write_table(d / "vEvalGrid", ids, ev)
    return d


def read_outputs(root, step: int) -> dict:
    d = step_directory(root, step)
    return {name: read_table(d / name) for name in ("pBoundary", "vBoundary", "pEvalGrid", "vEvalGrid")}


def log_name(step_range=None) -> str:
    """NC.out for a full run, NC{s1}-{s2}.out for a step range."""
    if step_range is None:
        return "NC.out"
    return f"NC{step_range[0]}-{step_range[1]}.out"


def is_writable(path) -> bool:
    path = Path(path)
    while not path.exists():
        path = path.parent
    return os.access(path, os.W_OK)


__all__ = ["NUMBER_FORMAT", "ON_SURFACE_TOL", "SolutionField", "evaluate_exterior", "evaluation_points",
           "is_writable", "log_name", "read_outputs", "read_table", "solution_field", "step_directory",
           "surface_distance", "write_outputs"]
