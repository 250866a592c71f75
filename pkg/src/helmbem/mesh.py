"""Surface meshes of flat triangles and planar quadrilaterals."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

BOUNDARY = 0
EVALUATION = 2

AREA_EPS = 1e-14
PLANARITY_TOL = 1e-6
EXACT_DIAMETER_POINTS = 20000


class MeshError(ValueError):
    pass


class Node(NamedTuple):
    id: int
    position: tuple


class Element(NamedTuple):
    id: int
    vertex_ids: tuple
    kind: int = BOUNDARY
    group: int = 0


class Mesh:
    """Nodes plus elements with per-element midpoints, unit normals and areas.

    Connectivity is stored as row indices into ``points`` (not node ids),
    padded with -1 for triangles.
    """

    def __init__(self, node_ids, points, element_ids, conn, kind=None, group=None):
        self.node_ids = np.asarray(node_ids, dtype=np.int64)
        self.points = np.ascontiguousarray(points, dtype=float)
        self.element_ids = np.asarray(element_ids, dtype=np.int64)
        conn = np.asarray(conn, dtype=np.int64)
        if conn.shape[1] == 3:
            conn = np.hstack([conn, -np.ones((len(conn), 1), dtype=np.int64)])
        self.conn = conn
        self.nvert = np.where(conn[:, 3] >= 0, 4, 3).astype(np.int64)
        n = len(conn)
        self.kind = np.zeros(n, np.int64) if kind is None else np.asarray(kind, np.int64)
        self.group = np.zeros(n, np.int64) if group is None else np.asarray(group, np.int64)
        if len(np.unique(self.element_ids)) != n:
            raise MeshError("duplicate element ids")
        self._derive()
        for a in (self.points, self.conn, self.midpoints, self.normals, self.areas):
            a.setflags(write=False)

    def _derive(self):
        idx = np.where(self.conn >= 0, self.conn, self.conn[:, :1])
        v = self.points[idx]  # (E, 4, 3); triangles repeat vertex 0
        self.vertices = v
        tri = self.nvert == 3
        mid = np.empty((len(v), 3))
        mid[tri] = v[tri, :3].mean(axis=1)
        mid[~tri] = v[~tri].mean(axis=1)
        cr = np.empty((len(v), 3))
        cr[tri] = np.cross(v[tri, 1] - v[tri, 0], v[tri, 2] - v[tri, 0])
        cr[~tri] = np.cross(v[~tri, 2] - v[~tri, 0], v[~tri, 3] - v[~tri, 1])
        area = 0.5 * np.linalg.norm(cr, axis=1)
        bad = np.flatnonzero(area <= AREA_EPS)
        if len(bad):
            raise MeshError(f"degenerate element id {self.element_ids[bad[0]]} (area {area[bad[0]]:.3e})")
        self.midpoints = mid
        self.normals = cr / (2.0 * area[:, None])
        self.areas = area
        q = np.flatnonzero(~tri)
        if len(q):
            vq = v[q]
            dev = np.abs(np.einsum("eij,ej->ei", vq - mid[q, None, :], self.normals[q]))
            edges = np.linalg.norm(vq - np.roll(vq, -1, axis=1), axis=2)
            worst = dev.max(axis=1) / edges.max(axis=1)
            bad = np.flatnonzero(worst > PLANARITY_TOL)
            if len(bad):
                raise MeshError(
                    f"non-planar quadrilateral id {self.element_ids[q[bad[0]]]} "
                    f"(relative warp {worst[bad[0]]:.2e})")
        self.vertices.setflags(write=False)

    # -- selections -------------------------------------------------------
    @property
    def n_elements(self) -> int:
        return len(self.conn)

    @property
    def boundary_index(self) -> np.ndarray:
        return np.flatnonzero(self.kind == BOUNDARY)

    @property
    def evaluation_index(self) -> np.ndarray:
        return np.flatnonzero(self.kind == EVALUATION)

    def boundary(self) -> "Mesh":
        """Submesh of boundary elements (shares node arrays)."""
        return self.subset(self.boundary_index)

    def subset(self, index) -> "Mesh":
        index = np.asarray(index)
        return Mesh(self.node_ids, self.points, self.element_ids[index], self.conn[index],
                    self.kind[index], self.group[index])

    def element_vertices(self, e) -> np.ndarray:
        return self.vertices[e, : self.nvert[e]]

    def edges(self, index=None):
        """Directed edges (E*, 2) as point-row pairs, with owning element."""
        index = self.boundary_index if index is None else np.asarray(index)
        src, dst, owner = [], [], []
        for nv in (3, 4):
            sel = index[self.nvert[index] == nv]
            c = self.conn[sel, :nv]
            src.append(c.ravel())
            dst.append(np.roll(c, -1, axis=1).ravel())
            owner.append(np.repeat(sel, nv))
        return np.stack([np.concatenate(src), np.concatenate(dst)], axis=1), np.concatenate(owner)

    def edge_lengths(self, index=None) -> np.ndarray:
        """Lengths of the unique undirected edges of the selected elements."""
        e, _ = self.edges(index)
        und = np.unique(np.sort(e, axis=1), axis=0)
        return np.linalg.norm(self.points[und[:, 0]] - self.points[und[:, 1]], axis=1)

    def __repr__(self):
        nb = int(np.sum(self.kind == BOUNDARY))
        return f"Mesh({len(self.points)} nodes, {nb} boundary + {self.n_elements - nb} evaluation elements)"


def build_mesh(nodes, elements) -> Mesh:
    """Build a mesh from Node and Element records (ids may have gaps)."""
    node_ids = np.array([n.id for n in nodes], dtype=np.int64)
    if len(np.unique(node_ids)) != len(node_ids):
        raise MeshError("duplicate node ids")
    pts = np.array([n.position for n in nodes], dtype=float).reshape(-1, 3)
    lookup = {int(i): r for r, i in enumerate(node_ids)}
    conn = -np.ones((len(elements), 4), dtype=np.int64)
    for r, el in enumerate(elements):
        if len(el.vertex_ids) not in (3, 4):
            raise MeshError(f"element {el.id}: needs 3 or 4 vertices")
        for c, vid in enumerate(el.vertex_ids):
            try:
                conn[r, c] = lookup[int(vid)]
            except KeyError:
                raise MeshError(f"element {el.id} references unknown node {vid}") from None
    return Mesh(node_ids, pts, [e.id for e in elements], conn,
                [e.kind for e in elements], [e.group for e in elements])


@dataclass
class MeshReport:
    n_elements: int
    n_nodes: int
    min_edge: float
    avg_edge: float
    max_edge: float
    diameter: float
    f_max_6: float
    f_max_8: float
    open_edges: list = field(default_factory=list)
    duplicate_elements: list = field(default_factory=list)
    orientation_warnings: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return not self.open_edges

    def lines(self):
        out = [
            f"number of boundary elements = {self.n_elements}",
            f"number of nodes = {self.n_nodes}",
            f"edge length min/avg/max = {self.min_edge:.6g} / {self.avg_edge:.6g} / {self.max_edge:.6g} m",
            f"mesh diameter = {self.diameter:.6g} m",
            f"six elements per wavelength up to {self.f_max_6:.6g} Hz, eight up to {self.f_max_8:.6g} Hz",
        ]
        return out + [f"Warning: {w}" for w in self.warnings]


def element_diameter_stats(mesh: Mesh):
    """(min, avg, max edge length, diameter D) over boundary elements."""
    idx = mesh.boundary_index
    if len(idx) == 0:
        raise MeshError("mesh has no boundary elements")
    lens = mesh.edge_lengths(idx)
    used = np.unique(mesh.conn[idx][mesh.conn[idx] >= 0])
    return float(lens.min()), float(lens.mean()), float(lens.max()), point_set_diameter(mesh.points[used])


def point_set_diameter(p) -> float:
    """Largest pairwise distance: exact over the convex hull up to
    EXACT_DIAMETER_POINTS hull vertices, a tight lower bound beyond."""
    p = np.asarray(p, dtype=float)
    if len(p) > 64:
        try:
            from scipy.spatial import ConvexHull
            p = p[ConvexHull(p).vertices]
        except Exception:
            pass
    if len(p) > EXACT_DIAMETER_POINTS:
        # extreme points along 2000 well-spread directions; the diametral
        # pair is missed by at most a factor cos(max direction gap) ~ 0.9995
        n = 2000
        i = np.arange(n) + 0.5
        z = 1 - 2 * i / n
        t = np.pi * (1 + 5 ** 0.5) * i
        s = np.sqrt(1 - z * z)
        proj = p @ np.column_stack([s * np.cos(t), s * np.sin(t), z]).T
        p = p[np.unique(np.concatenate([proj.argmax(0), proj.argmin(0)]))]
    best = 0.0
    for start in range(0, len(p), 512):
        blk = p[start:start + 512]
        d = np.sum((blk[:, None, :] - p[None, :, :]) ** 2, axis=-1)
        best = max(best, float(d.max()))
    return float(np.sqrt(best))


def signed_volume(mesh: Mesh, index=None) -> float:
    """(1/3) sum(midpoint . n * area); positive for outward closed surfaces."""
    idx = mesh.boundary_index if index is None else index
    return float(np.sum(np.einsum("ij,ij->i", mesh.midpoints[idx], mesh.normals[idx]) * mesh.areas[idx]) / 3.0)


def validate(mesh: Mesh, speed_of_sound: float = 340.0, max_frequency: float | None = None,
             warn: bool = False) -> MeshReport:
    """Report wavelength-rule limits, open edges, duplicates and orientation.

    Never modifies the mesh; findings are reported, not raised.
    """
    idx = mesh.boundary_index
    mn, avg, mx, diam = element_diameter_stats(mesh)
    rep = MeshReport(len(idx), len(np.unique(mesh.conn[idx][mesh.conn[idx] >= 0])), mn, avg, mx, diam,
                     speed_of_sound / (6 * avg), speed_of_sound / (8 * avg))

    e, owner = mesh.edges(idx)
    und = np.sort(e, axis=1)
    keys, inv, counts = np.unique(und, axis=0, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    rep.open_edges = [tuple(mesh.node_ids[k]) for k in keys[counts != 2]]
    # an interior edge of a consistently oriented surface is traversed once in
    # each direction
    fwd = np.zeros(len(keys), np.int64)
    np.add.at(fwd, inv, (e[:, 0] < e[:, 1]).astype(np.int64))
    bad = np.flatnonzero((counts == 2) & (fwd != 1))
    rep.orientation_warnings = [tuple(mesh.node_ids[k]) for k in keys[bad]]

    vsets = np.sort(np.where(mesh.conn[idx] >= 0, mesh.conn[idx], -1), axis=1)
    _, first, cnt = np.unique(vsets, axis=0, return_index=True, return_counts=True)
    rep.duplicate_elements = [int(mesh.element_ids[idx[f]]) for f in first[cnt > 1]]

    if max_frequency is not None and max_frequency > rep.f_max_6:
        rep.warnings.append(
            f"frequency {max_frequency:g} Hz exceeds the six-elements-per-wavelength limit "
            f"{rep.f_max_6:.4g} Hz")
    if rep.open_edges:
        rep.warnings.append(f"{len(rep.open_edges)} edges are not shared by exactly two elements")
    if rep.duplicate_elements:
        rep.warnings.append(f"{len(rep.duplicate_elements)} duplicate elements")
    if rep.orientation_warnings:
        rep.warnings.append(f"{len(rep.orientation_warnings)} edges with inconsistent element orientation")
    if rep.closed and signed_volume(mesh, idx) < 0:
        rep.warnings.append("negative enclosed volume: normals may point inwards")
    if warn:
        for w in rep.warnings:
            warnings.warn(w, stacklevel=2)
    return rep
