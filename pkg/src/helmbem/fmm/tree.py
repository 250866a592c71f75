"""Box-based clustering of boundary elements and the multi-level cluster tree."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..mesh import Mesh

FARFIELD_FACTOR = 2.0 / math.sqrt(3.0)
SMALL_RADIUS_FRACTION = 0.25
LEAF_ELEMENTS = 25


@dataclass
class Cluster:
    id: int
    level: int
    elements: np.ndarray
    midpoint: np.ndarray
    radius: float
    parent: int | None = None
    children: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.elements)


@dataclass
class Level:
    number: int
    clusters: list
    near: np.ndarray  # (P, 2) ordered cluster pairs handled below or as nearfield
    interaction: np.ndarray  # (Q, 2) ordered pairs (receiver, source) expanded here
    target_edge: float

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    @property
    def r_max(self) -> float:
        return max(c.radius for c in self.clusters)

    def element_cluster(self, n_elements: int) -> np.ndarray:
        out = np.full(n_elements, -1, np.int64)
        for c in self.clusters:
            out[c.elements] = c.id
        return out

    def sizes(self) -> np.ndarray:
        return np.array([c.size for c in self.clusters])


@dataclass
class ClusterTree:
    method: str
    levels: list
    n_elements: int
    root_edge: float
    leaf_edge: float | None = None

    @property
    def leaf(self) -> Level:
        return self.levels[-1]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def truncations(self, k: float, factor: float = 1.8, floor: int = 8) -> list:
        return [truncation_length(lv.r_max, k, factor, floor) for lv in self.levels]

    def summary(self) -> list:
        out = []
        for lv in self.levels:
            s = lv.sizes()
            out.append(f"level {lv.number}: {lv.n_clusters} clusters, elements per cluster "
                       f"min/avg/max = {s.min()}/{s.mean():.1f}/{s.max()}, max radius {lv.r_max:.4g} m, "
                       f"{len(lv.interaction)} far pairs")
        return out


def truncation_length(r_max: float, k: float, factor: float = 1.8, floor: int = 8) -> int:
    """ceil(2 r k + factor log10(2 r k + pi)), not below `floor`."""
    if r_max < 0 or k <= 0:
        raise ValueError("truncation_length needs r_max >= 0 and k > 0")
    a = 2.0 * r_max * k
    return max(int(floor), int(math.ceil(a + factor * math.log10(a + math.pi))))


def farfield_pair(a: Cluster, b: Cluster) -> bool:
    return _far(a.midpoint, a.radius, b.midpoint, b.radius)


def _far(za, ra, zb, rb):
    return np.linalg.norm(np.asarray(za) - np.asarray(zb), axis=-1) > FARFIELD_FACTOR * (ra + rb)


# -- geometry helpers --------------------------------------------------------


def _element_vertex_rows(mesh: Mesh, elems):
    c = mesh.conn[elems]
    return np.unique(c[c >= 0])


def _centre_radius(mesh: Mesh, elems):
    p = mesh.points[_element_vertex_rows(mesh, elems)]
    z = p.mean(axis=0)
    return z, float(np.sqrt(((p - z) ** 2).sum(axis=1).max()))


def realised_edge(mesh: Mesh, elems, target) -> float:
    """Largest actual sub-box edge when the bounding box of `elems` is cut
    into round(extent / target) pieces per axis."""
    p = mesh.points[_element_vertex_rows(mesh, elems)]
    ext = p.max(axis=0) - p.min(axis=0)
    return float((ext / np.maximum(1, np.round(ext / target))).max())


def _box_groups(mesh: Mesh, elems, target):
    """Split `elems` by midpoint into sub-boxes of about `target` edge length."""
    p = mesh.points[_element_vertex_rows(mesh, elems)]
    lo, hi = p.min(axis=0), p.max(axis=0)
    ext = hi - lo
    counts = np.maximum(1, np.round(ext / target).astype(np.int64))
    h = np.where(ext > 0, ext / counts, 1.0)
    cell = np.floor((mesh.midpoints[elems] - lo) / h).astype(np.int64)
    cell = np.clip(cell, 0, counts - 1)
    key = (cell[:, 0] * counts[1] + cell[:, 1]) * counts[2] + cell[:, 2]
    order = np.argsort(key, kind="stable")
    _, starts = np.unique(key[order], return_index=True)
    return [np.sort(elems[g]) for g in np.split(order, starts[1:])]


def _merge_small(mesh, groups):
    """Merge groups whose radius is small against the average into the
    nearest group holding at least the average number of elements."""
    if len(groups) < 2:
        return groups
    info = [_centre_radius(mesh, g) for g in groups]
    radii = np.array([r for _, r in info])
    sizes = np.array([len(g) for g in groups])
    small = radii < SMALL_RADIUS_FRACTION * radii.mean()
    big = np.flatnonzero(~small & (sizes >= sizes.mean()))
    if not small.any():
        return groups
    if not len(big):
        big = np.flatnonzero(~small)
    if not len(big):
        return groups
    z = np.array([c for c, _ in info])
    merged = {int(b): [groups[b]] for b in big}
    keep = [i for i in range(len(groups)) if not small[i]]
    for i in np.flatnonzero(small):
        tgt = int(big[np.argmin(np.linalg.norm(z[big] - z[i], axis=1))])
        merged[tgt].append(groups[i])
    return [np.sort(np.concatenate(merged[i])) if i in merged else groups[i] for i in keep]


def _make_clusters(mesh, groups, level, parents, start_id=0):
    out = []
    for g, par in zip(groups, parents):
        z, r = _centre_radius(mesh, g)
        out.append(Cluster(start_id + len(out), level, g, z, r, par))
    return out


def _default_area(mesh):
    return float(mesh.areas.mean())


def root_edge(mesh: Mesh, method: str, box_edge: float = 0.0) -> float:
    """Target sub-box edge of the first level."""
    if box_edge and box_edge > 0:
        return float(box_edge)
    n, a0 = mesh.n_elements, _default_area(mesh)
    if method == "SLFMM":
        return math.sqrt(math.sqrt(n) * a0)
    n0 = 0.9 * math.sqrt(n)
    return math.sqrt(n / n0) * math.sqrt(a0)


def level_count(mesh: Mesh, e_root: float) -> int:
    """Number of tree levels: one root level plus the number of halvings
    needed to bring the root edge down to the leaf edge 5 sqrt(A0)."""
    e_leaf = LEAF_ELEMENTS ** 0.5 * math.sqrt(_default_area(mesh))
    return 1 + max(1, int(round(math.log2(e_root / e_leaf))))


def cluster_root(mesh: Mesh, method: str = "SLFMM", box_edge: float = 0.0) -> list:
    """First-level clusters from a uniform subdivision of the bounding box."""
    mesh = _boundary(mesh)
    if mesh.n_elements == 0:
        raise ValueError("cannot cluster an empty mesh")
    e = root_edge(mesh, method, box_edge)
    groups = _merge_small(mesh, _box_groups(mesh, np.arange(mesh.n_elements), e))
    return _make_clusters(mesh, groups, 1, [None] * len(groups))


def _boundary(mesh):
    return mesh if np.all(mesh.kind == 0) else mesh.boundary()


def _classify(clusters, cand):
    """Split candidate ordered pairs into (near, far) by the farfield test."""
    if len(cand) == 0:
        return cand.reshape(0, 2), cand.reshape(0, 2)
    z = np.array([c.midpoint for c in clusters])
    r = np.array([c.radius for c in clusters])
    far = _far(z[cand[:, 0]], r[cand[:, 0]], z[cand[:, 1]], r[cand[:, 1]])
    return cand[~far], cand[far]


def _all_pairs(n):
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.stack([a.ravel(), b.ravel()], axis=1)


def cluster_tree(mesh: Mesh, method: str = "MLFMM", box_edge: float = 0.0,
                 n_levels: int | None = None) -> ClusterTree:
    """SLFMM: one level. MLFMM: balanced tree whose level l >= 2 re-boxes each
    parent with target edge e / 2**(l-1), e being the realised root sub-box
    edge (the requested root edge rounded to whole boxes per axis)."""
    if method not in ("SLFMM", "MLFMM"):
        raise ValueError(f"cluster_tree needs SLFMM or MLFMM, got {method!r}")
    mesh = _boundary(mesh)
    roots = cluster_root(mesh, method, box_edge)
    e_root = root_edge(mesh, method, box_edge)
    near, far = _classify(roots, _all_pairs(len(roots)))
    levels = [Level(1, roots, near, far, e_root)]
    depth = 1 if method == "SLFMM" else (n_levels or level_count(mesh, e_root))
    e_real = realised_edge(mesh, np.arange(mesh.n_elements), e_root)
    for number in range(2, depth + 1):
        parent_level = levels[-1]
        target = e_real / 2 ** (number - 1)
        clusters = []
        for par in parent_level.clusters:
            groups = _merge_small(mesh, _box_groups(mesh, par.elements, target))
            kids = _make_clusters(mesh, groups, number, [par.id] * len(groups), len(clusters))
            par.children = [c.id for c in kids]
            clusters += kids
        # candidates: children of the parent's nearfield clusters
        cand = []
        for a, b in parent_level.near:
            ca, cb = parent_level.clusters[a].children, parent_level.clusters[b].children
            if ca and cb:
                g = np.array(np.meshgrid(ca, cb, indexing="ij")).reshape(2, -1).T
                cand.append(g)
        cand = np.concatenate(cand) if cand else np.zeros((0, 2), np.int64)
        near, far = _classify(clusters, cand.astype(np.int64))
        levels.append(Level(number, clusters, near, far, target))
    e_leaf = LEAF_ELEMENTS ** 0.5 * math.sqrt(_default_area(mesh))
    return ClusterTree(method, levels, mesh.n_elements, e_root, e_leaf)


def leaf_descendants(tree: ClusterTree) -> list:
    """Per level, a list mapping each cluster to the ids of its leaf descendants."""
    out = [None] * tree.depth
    out[-1] = [np.array([c.id]) for c in tree.leaf.clusters]
    for li in range(tree.depth - 2, -1, -1):
        below = out[li + 1]
        out[li] = [np.concatenate([below[ch] for ch in c.children]) if c.children else np.zeros(0, np.int64)
                   for c in tree.levels[li].clusters]
    return out


def coverage(tree: ClusterTree) -> np.ndarray:
    """Count matrix over ordered leaf pairs: how often each pair is handled
    by the leaf nearfield or some level's interaction list (should be 1)."""
    n = tree.leaf.n_clusters
    cnt = np.zeros((n, n), np.int64)
    desc = leaf_descendants(tree)
    for li, lv in enumerate(tree.levels):
        for a, b in lv.interaction:
            cnt[np.ix_(desc[li][a], desc[li][b])] += 1
    for a, b in tree.leaf.near:
        cnt[a, b] += 1
    return cnt


def check_partition(tree: ClusterTree) -> list:
    """Violations of the per-level partition and parent/child invariants."""
    problems = []
    n = tree.n_elements
    for lv in tree.levels:
        seen = np.zeros(n, np.int64)
        for c in lv.clusters:
            seen[c.elements] += 1
        if not np.all(seen == 1):
            problems.append(f"level {lv.number}: elements not covered exactly once")
    for li in range(tree.depth - 1):
        kids = tree.levels[li + 1].clusters
        for c in tree.levels[li].clusters:
            union = np.sort(np.concatenate([kids[ch].elements for ch in c.children]))
            if not np.array_equal(union, np.sort(c.elements)):
                problems.append(f"level {li + 1} cluster {c.id}: children do not partition it")
    for lv in tree.levels:
        zs = [(lv.clusters[a], lv.clusters[b]) for a, b in lv.interaction]
        if any(not farfield_pair(a, b) for a, b in zs):
            problems.append(f"level {lv.number}: interaction pair violates the farfield test")
    return problems


__all__ = ["Cluster", "ClusterTree", "Level", "check_partition", "cluster_root", "cluster_tree",
           "coverage", "farfield_pair", "leaf_descendants", "level_count", "realised_edge", "root_edge",
           "truncation_length"]
