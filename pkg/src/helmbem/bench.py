"""Benchmark meshes, analytic reference fields and error statistics.

Reference solutions use ``scipy.special`` rather than the package's own
recurrences so that they act as an independent check of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .mesh import EVALUATION, Mesh

# -- mesh generators -------------------------------------------------------


def _cube_faces(n):
    """Quads (as integer lattice corners) covering the cube [0,n]^3 surface,
    counterclockwise seen from outside."""
    faces = []
    for axis in range(3):
        u, v = (axis + 1) % 3, (axis + 2) % 3  # e_u x e_v = +e_axis
        for side, sgn in ((0, -1), (n, 1)):
            for i in range(n):
                for j in range(n):
                    corners = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = [0, 0, 0]
                        p[axis], p[u], p[v] = side, i + di, j + dj
                        corners.append(tuple(p))
                    if sgn < 0:
                        corners = corners[::-1]
                    faces.append(corners)
    return faces


def _index_points(quads):
    lookup, pts, conn = {}, [], []
    for q in quads:
        row = []
        for p in q:
            if p not in lookup:
                lookup[p] = len(pts)
                pts.append(p)
            row.append(lookup[p])
        conn.append(row)
    return np.array(pts, dtype=float), np.array(conn, dtype=np.int64)


def gen_sphere_cube(n: int, radius: float = 1.0) -> Mesh:
    """Cube with n x n squares per face, centrally projected onto the sphere.

    Each square is split along its (0,0)-(1,1) diagonal, giving 12 n^2
    triangles and 6 n^2 + 2 nodes.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pts, quads = _index_points(_cube_faces(n))
    pts = 2.0 * pts / n - 1.0
    pts *= radius / np.linalg.norm(pts, axis=1)[:, None]
    tris = np.concatenate([quads[:, [0, 1, 2]], quads[:, [0, 2, 3]]])
    return Mesh(np.arange(1, len(pts) + 1), pts, np.arange(1, len(tris) + 1), tris)


def gen_sphere_ico(level: int, radius: float = 1.0) -> Mesh:
    """Icosahedron refined `level` times by edge midpoints: 20 * 4**level triangles."""
    if level < 0:
        raise ValueError("level must be >= 0")
    t = (1.0 + 5**0.5) / 2.0
    v = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    pts = [np.array(p, float) / np.linalg.norm(p) for p in v]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(level):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = pts[a] + pts[b]
                pts.append(m / np.linalg.norm(m))
                cache[key] = len(pts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    p = radius * np.array(pts)
    f = np.array(faces, dtype=np.int64)
    # make the orientation outward
    cen = p[f].mean(axis=1)
    nrm = np.cross(p[f[:, 1]] - p[f[:, 0]], p[f[:, 2]] - p[f[:, 0]])
    flip = np.einsum("ij,ij->i", cen, nrm) < 0
    f[flip] = f[flip][:, ::-1]
    return Mesh(np.arange(1, len(p) + 1), p, np.arange(1, len(f) + 1), f)


def gen_box(lengths, counts, origin=(0.0, 0.0, 0.0)) -> Mesh:
    """Closed box of planar quads with outward normals."""
    L = np.asarray(lengths, float)
    n = [int(c) for c in counts]
    if min(n) < 1:
        raise ValueError("counts must be >= 1")
    quads = []
    for axis in range(3):
        u, v = (axis + 1) % 3, (axis + 2) % 3
        for side, sgn in ((0, -1), (n[axis], 1)):
            for i in range(n[u]):
                for j in range(n[v]):
                    corners = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = [0, 0, 0]
                        p[axis], p[u], p[v] = side, i + di, j + dj
                        corners.append(tuple(p))
                    if sgn < 0:
                        corners = corners[::-1]
                    quads.append(corners)
    pts, conn = _index_points(quads)
    pts = np.asarray(origin, float) + pts * (L / np.array(n))
    return Mesh(np.arange(1, len(pts) + 1), pts, np.arange(1, len(conn) + 1), conn)


DUCT_LENGTH = 3.4
DUCT_WIDTH = 0.2


def gen_duct(h: float) -> Mesh:
    """3.4 m x 0.2 m x 0.2 m duct along x with the centerline on y = z = 0."""
    if h <= 0:
        raise ValueError("h must be positive")
    nx = max(1, int(round(DUCT_LENGTH / h)))
    nw = max(1, int(round(DUCT_WIDTH / h)))
    w = DUCT_WIDTH
    return gen_box((DUCT_LENGTH, w, w), (nx, nw, nw), origin=(0.0, -w / 2, -w / 2))


def with_evaluation_grid(mesh: Mesh, grid_points, grid_conn) -> Mesh:
    """Mesh with extra evaluation elements (kind 2) on new nodes."""
    grid_points = np.asarray(grid_points, float)
    grid_conn = np.asarray(grid_conn, np.int64)
    if grid_conn.shape[1] == 3:
        grid_conn = np.hstack([grid_conn, -np.ones((len(grid_conn), 1), np.int64)])
    np0 = len(mesh.points)
    conn_new = np.where(grid_conn >= 0, grid_conn + np0, -1)
    pts = np.vstack([mesh.points, grid_points])
    nid = np.concatenate([mesh.node_ids, mesh.node_ids.max() + 1 + np.arange(len(grid_points))])
    eid = np.concatenate([mesh.element_ids, mesh.element_ids.max() + 1 + np.arange(len(grid_conn))])
    kind = np.concatenate([mesh.kind, np.full(len(grid_conn), EVALUATION)])
    group = np.concatenate([mesh.group, np.ones(len(grid_conn), np.int64)])
    return Mesh(nid, pts, eid, np.vstack([mesh.conn, conn_new]), kind, group)


def line_grid(p0, p1, n: int, width: float = 1e-3):
    """Points along a segment packaged as thin evaluation quads.

    Returns (points, quads); the points are the quads' vertices, i.e. two
    rows of n points offset by +-width/2 in a direction normal to the line.
    """
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    d = (p1 - p0) / np.linalg.norm(p1 - p0)
    off = np.cross(d, [0.0, 0.0, 1.0])
    if np.linalg.norm(off) < 1e-8:
        off = np.cross(d, [0.0, 1.0, 0.0])
    off *= 0.5 * width / np.linalg.norm(off)
    t = np.linspace(0.0, 1.0, n)[:, None]
    line = p0 + t * (p1 - p0)
    pts = np.vstack([line - off, line + off])
    quads = np.array([[i, i + 1, n + i + 1, n + i] for i in range(n - 1)])
    return pts, quads


def plane_grid(center, u, v, nu: int, nv: int):
    """Rectangular grid of nu x nv points spanning center +- u/2 +- v/2,
    returned with its quad connectivity."""
    center, u, v = (np.asarray(a, float) for a in (center, u, v))
    a = np.linspace(-0.5, 0.5, nu)
    b = np.linspace(-0.5, 0.5, nv)
    A, B = np.meshgrid(a, b, indexing="ij")
    pts = center + A.ravel()[:, None] * u + B.ravel()[:, None] * v
    idx = np.arange(nu * nv).reshape(nu, nv)
    quads = np.stack([idx[:-1, :-1], idx[1:, :-1], idx[1:, 1:], idx[:-1, 1:]], axis=-1).reshape(-1, 4)
    return pts, quads


# -- analytic references ---------------------------------------------------


def _series_terms(ka, kr_max):
    n = int(kr_max + 4.0 * kr_max ** (1 / 3) + 20)
    return max(n, int(ka) + 20)


def sphere_rigid_planewave(x, k: float, radius: float = 1.0, amplitude: complex = 1.0,
                           direction=(0.0, 0.0, 1.0), n_max: int | None = None,
                           return_radial_derivative: bool = False):
    """Total pressure (incident + scattered) around a rigid sphere.

    p = P0 * sum_n i^n (2n+1) [j_n(kr) - j_n'(ka)/h_n'(ka) h_n(kr)] P_n(cos theta)
    """
    x = np.atleast_2d(np.asarray(x, float))
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    r = np.linalg.norm(x, axis=1)
    if np.any(r < radius * (1 - 1e-9)):
        raise ValueError("evaluation point inside the sphere")
    ct = np.clip(x @ d / r, -1.0, 1.0)
    ka = k * radius
    N = n_max if n_max is not None else _series_terms(ka, k * r.max())
    n = np.arange(N + 1)
    jpa = sps.spherical_jn(n, ka, derivative=True)
    hpa = jpa + 1j * sps.spherical_yn(n, ka, derivative=True)
    coef = (1j ** n) * (2 * n + 1)
    ratio = jpa / hpa
    kr = k * r[:, None]
    jn = sps.spherical_jn(n[None, :], kr)
    hn = jn + 1j * sps.spherical_yn(n[None, :], kr)
    Pn = sps.eval_legendre(n[None, :], ct[:, None])
    radial = jn - ratio * hn
    p = amplitude * np.sum(coef * radial * Pn, axis=1)
    if not return_radial_derivative:
        return p
    jnp_ = sps.spherical_jn(n[None, :], kr, derivative=True)
    hnp = jnp_ + 1j * sps.spherical_yn(n[None, :], kr, derivative=True)
    dp = amplitude * k * np.sum(coef * (jnp_ - ratio * hnp) * Pn, axis=1)
    return p, dp


def duct_solution(x, rho: float = 1.3, c: float = 340.0, frequency: float = 240.0):
    """p(x) = -rho c e^{ikx} for unit inflow velocity and a matched end."""
    k = 2 * np.pi * frequency / c
    return -rho * c * np.exp(1j * k * np.asarray(x, float))


@dataclass
class ErrorStats:
    rel: np.ndarray
    db: np.ndarray
    excluded: int = 0

    @property
    def min(self):
        return float(self.rel.min())

    @property
    def mean(self):
        return float(self.rel.mean())

    @property
    def max(self):
        return float(self.rel.max())

    @property
    def max_abs_db(self):
        return float(np.abs(self.db).max())


def error_stats(computed, reference) -> ErrorStats:
    """Per-point |p - p0|/|p0| and 20 log10(|p|/|p0|); zero references are skipped."""
    p = np.asarray(computed, complex).ravel()
    p0 = np.asarray(reference, complex).ravel()
    if p.shape != p0.shape:
        raise ValueError("point sets differ in size")
    ok = np.abs(p0) > 0
    rel = np.abs(p[ok] - p0[ok]) / np.abs(p0[ok])
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(np.abs(p[ok]) / np.abs(p0[ok]))
    return ErrorStats(rel, db, int(np.sum(~ok)))
