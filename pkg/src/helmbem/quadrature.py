"""Element integrals of G, dG/dn_y and their x-gradients.

Regimes:

* regular: symmetric triangle rule (or m x m Gauss on quads) with the
  order picked from three a-priori error estimates;
* quasi-singular: recursive 4-way subdivision until every piece is far
  enough from the collocation point (distance / sqrt(area) >= 1.3);
* singular (collocation point at the element midpoint): split into
  sub-triangles with the singular point as apex, Duffy map, 4x4 Gauss;
* hypersingular self term: edge integrals of grad G plus k^2 times the
  singular G integral.

The compiled kernels accumulate eight values per element: G, H, grad_x G
(3) and grad_x H (3).  H' and E follow by dotting with n_x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numba as nb
import numpy as np

from .special import gauss_legendre, triangle_rule_table

INV4PI = 1.0 / (4.0 * np.pi)

STATUS_OK = 0
STATUS_DEPTH = 1
STATUS_SINGULAR = 2


class QuadratureError(RuntimeError):
    """Raised when the quasi-singular subdivision does not terminate."""

    def __init__(self, element_id, max_depth=15):
        super().__init__(
            f"number of subels. which are subdivided in a loop must <= {max_depth} "
            f"(element {element_id})")
        self.element_id = element_id


class WorkCounter:
    """Number of element integrals requested through the public entry points."""

    def __init__(self):
        self.count = 0

    def add(self, n):
        self.count += int(n)

    def reset(self):
        self.count = 0


kernel_counter = WorkCounter()


@dataclass(frozen=True)
class QuadratureConfig:
    tolerance: float = 1e-3
    m_max: int = 6
    ratio: float = 1.3
    max_depth: int = 15
    singular_order: int = 4
    edge_parts: int = 4
    edge_order: int = 3
    high_accuracy: bool = False

    def __post_init__(self):
        if not (self.tolerance > 0 and self.ratio > 1 and 1 <= self.m_max <= 6
                and self.max_depth >= 1 and self.singular_order >= 1
                and self.edge_parts >= 1 and self.edge_order >= 1):
            raise ValueError(f"invalid quadrature configuration {self}")

    def thresholds(self) -> np.ndarray:
        """thr[m] = smallest r~ (exclusive) for which order m meets the
        tolerance, m = 1..30; thr[0] is unused."""
        m = np.arange(0, 31, dtype=float)
        t = self.tolerance
        with np.errstate(divide="ignore"):
            g = 0.5 * (32.0 / t) ** (1.0 / (2 * m + 1))
            h = 0.5 * (64.0 * (2 * m + 1) / t) ** (1.0 / (2 * m + 2))
            e = 0.5 * (128.0 * (m + 1) * (2 * m + 1) / t) ** (1.0 / (2 * m + 3))
        thr = np.maximum(np.maximum(g, h), e)
        thr[0] = np.inf
        return thr

    def packed(self):
        """Arrays handed to the compiled kernels."""
        return _packed(self)


def error_estimates(rt: float, m: int):
    """The three a-priori estimates (eps_G, eps_H, eps_E) for order m."""
    q = 1.0 / (2.0 * rt)
    return (32.0 * q ** (2 * m + 1),
            64.0 * (2 * m + 1) * q ** (2 * m + 2),
            128.0 * (m + 1) * (2 * m + 1) * q ** (2 * m + 3))


def select_regular_order(rt: float, config: QuadratureConfig | None = None, capped: bool = True) -> int:
    """Smallest m whose three estimates are all below the tolerance."""
    cfg = config or QuadratureConfig()
    thr = cfg.thresholds()
    m = _order_from_thr(float(rt), thr)
    return min(m, cfg.m_max) if capped else m


class _Packed(NamedTuple):
    thr: np.ndarray
    tri_off: np.ndarray
    tri_bary: np.ndarray
    tri_w: np.ndarray
    gl_x: np.ndarray  # (7, 6) Gauss nodes on [0,1] for m = 1..6
    gl_w: np.ndarray
    sing_x: np.ndarray
    sing_w: np.ndarray
    edge_x: np.ndarray
    edge_w: np.ndarray
    iparams: np.ndarray  # m_max, max_depth, edge_parts, high_accuracy
    ratio: float


_PACK_CACHE: dict = {}


def _packed(cfg):
    if cfg in _PACK_CACHE:
        return _PACK_CACHE[cfg]
    off, bary, w = triangle_rule_table(6)
    glx = np.zeros((7, 6))
    glw = np.zeros((7, 6))
    for m in range(1, 7):
        x, wt = gauss_legendre(m)
        glx[m, :m] = 0.5 * (x + 1.0)
        glw[m, :m] = 0.5 * wt
    sx, sw = gauss_legendre(cfg.singular_order)
    ex, ew = gauss_legendre(cfg.edge_order)
    p = _Packed(cfg.thresholds(), off, bary, w, glx, glw,
                0.5 * (sx + 1.0), 0.5 * sw, 0.5 * (ex + 1.0), 0.5 * ew,
                np.array([cfg.m_max, cfg.max_depth, cfg.edge_parts, int(cfg.high_accuracy)], np.int64),
                float(cfg.ratio))
    _PACK_CACHE[cfg] = p
    return p


# ---------------------------------------------------------------------------
# compiled kernels

_jit = nb.njit(cache=True, fastmath=False, nogil=True)


@_jit
def _order_from_thr(rt, thr):
    for m in range(1, len(thr)):
        if rt > thr[m]:
            return m
    return len(thr) - 1


@_jit
def _accumulate(x, y, ny, k, w, acc):
    """Add w * (G, H, grad_x G, grad_x H) at source point y to acc[0:8]."""
    d0 = y[0] - x[0]
    d1 = y[1] - x[1]
    d2 = y[2] - x[2]
    r = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
    inv = 1.0 / r
    h0 = d0 * inv
    h1 = d1 * inv
    h2 = d2 * inv
    kr = k * r
    g = complex(np.cos(kr), np.sin(kr)) * (INV4PI * inv)
    g1 = g * complex(-inv, k)
    g2 = g * complex(2.0 * inv * inv - k * k, -2.0 * k * inv)
    ry = h0 * ny[0] + h1 * ny[1] + h2 * ny[2]
    acc[0] += w * g
    acc[1] += w * g1 * ry
    a = -w * g1
    acc[2] += a * h0
    acc[3] += a * h1
    acc[4] += a * h2
    b = -w * g2 * ry
    c = w * g1 * inv
    acc[5] += b * h0 + c * (ry * h0 - ny[0])
    acc[6] += b * h1 + c * (ry * h1 - ny[1])
    acc[7] += b * h2 + c * (ry * h2 - ny[2])


@_jit
def _tri_area(v0, v1, v2):
    a0 = v1[0] - v0[0]
    a1 = v1[1] - v0[1]
    a2 = v1[2] - v0[2]
    b0 = v2[0] - v0[0]
    b1 = v2[1] - v0[1]
    b2 = v2[2] - v0[2]
    c0 = a1 * b2 - a2 * b1
    c1 = a2 * b0 - a0 * b2
    c2 = a0 * b1 - a1 * b0
    return 0.5 * np.sqrt(c0 * c0 + c1 * c1 + c2 * c2)


@_jit
def _poly_area(v, nv):
    if nv == 3:
        return _tri_area(v[0], v[1], v[2])
    a0 = v[2, 0] - v[0, 0]
    a1 = v[2, 1] - v[0, 1]
    a2 = v[2, 2] - v[0, 2]
    b0 = v[3, 0] - v[1, 0]
    b1 = v[3, 1] - v[1, 1]
    b2 = v[3, 2] - v[1, 2]
    c0 = a1 * b2 - a2 * b1
    c1 = a2 * b0 - a0 * b2
    c2 = a0 * b1 - a1 * b0
    return 0.5 * np.sqrt(c0 * c0 + c1 * c1 + c2 * c2)


@_jit
def _regular(x, v, nv, ny, area, k, m, tri_off, tri_bary, tri_w, glx, glw, acc):
    y = np.empty(3)
    if nv == 3:
        for q in range(tri_off[m - 1], tri_off[m]):
            l0 = tri_bary[q, 0]
            l1 = tri_bary[q, 1]
            l2 = tri_bary[q, 2]
            for c in range(3):
                y[c] = l0 * v[0, c] + l1 * v[1, c] + l2 * v[2, c]
            _accumulate(x, y, ny, k, tri_w[q] * area, acc)
    else:
        for i in range(m):
            u = glx[m, i]
            for j in range(m):
                t = glx[m, j]
                w = glw[m, i] * glw[m, j]
                # bilinear map and its Jacobian
                ju0 = (1 - t) * (v[1, 0] - v[0, 0]) + t * (v[2, 0] - v[3, 0])
                ju1 = (1 - t) * (v[1, 1] - v[0, 1]) + t * (v[2, 1] - v[3, 1])
                ju2 = (1 - t) * (v[1, 2] - v[0, 2]) + t * (v[2, 2] - v[3, 2])
                jt0 = (1 - u) * (v[3, 0] - v[0, 0]) + u * (v[2, 0] - v[1, 0])
                jt1 = (1 - u) * (v[3, 1] - v[0, 1]) + u * (v[2, 1] - v[1, 1])
                jt2 = (1 - u) * (v[3, 2] - v[0, 2]) + u * (v[2, 2] - v[1, 2])
                c0 = ju1 * jt2 - ju2 * jt1
                c1 = ju2 * jt0 - ju0 * jt2
                c2 = ju0 * jt1 - ju1 * jt0
                jac = np.sqrt(c0 * c0 + c1 * c1 + c2 * c2)
                for c in range(3):
                    y[c] = ((1 - u) * (1 - t) * v[0, c] + u * (1 - t) * v[1, c]
                            + u * t * v[2, c] + (1 - u) * t * v[3, c])
                _accumulate(x, y, ny, k, w * jac, acc)


@_jit
def _nonsingular(x, verts, nv, ny, k, thr, tri_off, tri_bary, tri_w, glx, glw,
                 iparams, ratio, force_split, acc):
    """Regular or recursively subdivided integration; returns a status code.

    force_split > 0 subdivides the element that many times unconditionally
    before the usual ratio test applies (used for convergence checks).
    """
    m_max = iparams[0]
    max_depth = iparams[1]
    high_acc = iparams[3]
    cap = 4 * (max_depth + force_split + 2)
    sv = np.empty((cap, 4, 3))
    sd = np.empty(cap, np.int64)
    top = 0
    for a in range(4):
        for c in range(3):
            sv[0, a, c] = verts[a, c]
    sd[0] = 0
    top = 1
    mid = np.empty(3)
    e = np.empty((4, 3))
    ctr = np.empty(3)
    while top > 0:
        top -= 1
        v = sv[top]
        depth = sd[top]
        for c in range(3):
            s = 0.0
            for a in range(nv):
                s += v[a, c]
            mid[c] = s / nv
        area = _poly_area(v, nv)
        dx = x[0] - mid[0]
        dy = x[1] - mid[1]
        dz = x[2] - mid[2]
        rt = np.sqrt(dx * dx + dy * dy + dz * dz) / np.sqrt(area)
        m = _order_from_thr(rt, thr)
        split = rt < ratio or depth < force_split
        if high_acc != 0 and m > m_max:
            split = True
        if not split:
            _regular(x, v, nv, ny, area, k, min(m, m_max), tri_off, tri_bary, tri_w, glx, glw, acc)
            continue
        if depth + 1 > max_depth:
            return STATUS_DEPTH
        # 4-way split via edge midpoints (plus the centre for quads)
        for a in range(nv):
            b = (a + 1) % nv
            for c in range(3):
                e[a, c] = 0.5 * (v[a, c] + v[b, c])
        if nv == 3:
            for c in range(3):
                v0 = v[0, c]
                v1 = v[1, c]
                v2 = v[2, c]
                sv[top, 0, c] = v0
                sv[top, 1, c] = e[0, c]
                sv[top, 2, c] = e[2, c]
                sv[top + 1, 0, c] = e[0, c]
                sv[top + 1, 1, c] = v1
                sv[top + 1, 2, c] = e[1, c]
                sv[top + 2, 0, c] = e[2, c]
                sv[top + 2, 1, c] = e[1, c]
                sv[top + 2, 2, c] = v2
                sv[top + 3, 0, c] = e[0, c]
                sv[top + 3, 1, c] = e[1, c]
                sv[top + 3, 2, c] = e[2, c]
        else:
            for c in range(3):
                ctr[c] = 0.25 * (v[0, c] + v[1, c] + v[2, c] + v[3, c])
            for c in range(3):
                v0 = v[0, c]
                v1 = v[1, c]
                v2 = v[2, c]
                v3 = v[3, c]
                sv[top, 0, c] = v0
                sv[top, 1, c] = e[0, c]
                sv[top, 2, c] = ctr[c]
                sv[top, 3, c] = e[3, c]
                sv[top + 1, 0, c] = e[0, c]
                sv[top + 1, 1, c] = v1
                sv[top + 1, 2, c] = e[1, c]
                sv[top + 1, 3, c] = ctr[c]
                sv[top + 2, 0, c] = ctr[c]
                sv[top + 2, 1, c] = e[1, c]
                sv[top + 2, 2, c] = v2
                sv[top + 2, 3, c] = e[2, c]
                sv[top + 3, 0, c] = e[3, c]
                sv[top + 3, 1, c] = ctr[c]
                sv[top + 3, 2, c] = e[2, c]
                sv[top + 3, 3, c] = v3
        for s in range(4):
            sd[top + s] = depth + 1
        top += 4
    return STATUS_OK


@_jit
def _singular_g(xc, verts, nv, k, sx, sw):
    """Integral of G over the element with x at an interior point (apex split)."""
    total = 0.0 + 0.0j
    a = np.empty(3)
    b = np.empty(3)
    y = np.empty(3)
    ns = len(sx)
    for edge in range(nv):
        p = verts[edge]
        q = verts[(edge + 1) % nv]
        for half in range(2):
            for c in range(3):
                mc = 0.5 * (p[c] + q[c])
                if half == 0:
                    a[c] = p[c]
                    b[c] = mc
                else:
                    a[c] = mc
                    b[c] = q[c]
            # y = xc + u (a - xc) + u t (b - a), Jacobian u * |(a - xc) x (b - a)|
            j2 = 2.0 * _tri_area(xc, a, b)
            for i in range(ns):
                u = sx[i]
                for j in range(ns):
                    t = sx[j]
                    for c in range(3):
                        y[c] = xc[c] + u * (a[c] - xc[c]) + u * t * (b[c] - a[c])
                    dx = y[0] - xc[0]
                    dy = y[1] - xc[1]
                    dz = y[2] - xc[2]
                    r = np.sqrt(dx * dx + dy * dy + dz * dz)
                    # u / r is smooth: r = u * |a - xc + t (b - a)|
                    w = sw[i] * sw[j] * j2 * u / r
                    kr = k * r
                    total += w * complex(np.cos(kr), np.sin(kr))
    return total * INV4PI


@_jit
def _hyper_edges(xc, verts, nv, n, k, parts, ex, ew):
    """Sum over edges of the line integral of grad_y G . nu (nu = t x n)."""
    total = 0.0 + 0.0j
    y = np.empty(3)
    for edge in range(nv):
        p = verts[edge]
        q = verts[(edge + 1) % nv]
        t0 = q[0] - p[0]
        t1 = q[1] - p[1]
        t2 = q[2] - p[2]
        ln = np.sqrt(t0 * t0 + t1 * t1 + t2 * t2)
        # outward in-plane normal nu = t x n (unit t)
        nu0 = (t1 * n[2] - t2 * n[1]) / ln
        nu1 = (t2 * n[0] - t0 * n[2]) / ln
        nu2 = (t0 * n[1] - t1 * n[0]) / ln
        for part in range(parts):
            for g in range(len(ex)):
                s = (part + ex[g]) / parts
                for c in range(3):
                    y[c] = p[c] + s * (q[c] - p[c])
                d0 = y[0] - xc[0]
                d1 = y[1] - xc[1]
                d2 = y[2] - xc[2]
                r = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
                kr = k * r
                g0 = complex(np.cos(kr), np.sin(kr)) * (INV4PI / r)
                g1 = g0 * complex(-1.0 / r, k)
                proj = (d0 * nu0 + d1 * nu1 + d2 * nu2) / r
                total += g1 * proj * ew[g] * ln / parts
    return total


@_jit
def _self_terms(xc, verts, nv, n, k, sx, sw, parts, ex, ew):
    """(G_ii, E_ii); H_ii and H'_ii vanish for flat elements."""
    g = _singular_g(xc, verts, nv, k, sx, sw)
    e = _hyper_edges(xc, verts, nv, n, k, parts, ex, ew) + k * k * g
    return g, e


# ---------------------------------------------------------------------------
# Python-level API


class KernelIntegrals(NamedTuple):
    G: complex
    H: complex
    Hp: complex
    E: complex


def _as_verts(verts):
    v = np.asarray(verts, float)
    nv = len(v)
    if nv not in (3, 4):
        raise ValueError("element needs 3 or 4 vertices")
    out = np.zeros((4, 3))
    out[:nv] = v
    if nv == 3:
        out[3] = v[0]
    return out, nv


def element_normal(verts):
    v = np.asarray(verts, float)
    if len(v) == 3:
        c = np.cross(v[1] - v[0], v[2] - v[0])
    else:
        c = np.cross(v[2] - v[0], v[3] - v[1])
    return c / np.linalg.norm(c)


def _finish(acc, n_x):
    n_x = np.asarray(n_x, float)
    return KernelIntegrals(complex(acc[0]), complex(acc[1]),
                           complex(np.dot(acc[2:5], n_x)), complex(np.dot(acc[5:8], n_x)))


def integrate_regular(verts, x, k, m, n_x=None, raw=False):
    """Fixed-order rule over the whole element (no subdivision)."""
    kernel_counter.add(1)
    v, nv = _as_verts(verts)
    ny = element_normal(verts)
    p = _packed(QuadratureConfig())
    acc = np.zeros(8, complex)
    area = _poly_area(v, nv)
    _regular(np.asarray(x, float), v, nv, ny, area, float(k), int(m), p.tri_off, p.tri_bary,
             p.tri_w, p.gl_x, p.gl_w, acc)
    if raw:
        return acc
    return _finish(acc, ny if n_x is None else n_x)


def integrate_quasisingular(verts, x, k, config: QuadratureConfig | None = None, n_x=None,
                            element_id=0, force_split=0, raw=False):
    """Adaptive subdivision path; reduces to the regular rule when the
    element already satisfies the distance ratio."""
    kernel_counter.add(1)
    cfg = config or QuadratureConfig()
    v, nv = _as_verts(verts)
    ny = element_normal(verts)
    p = _packed(cfg)
    acc = np.zeros(8, complex)
    st = _nonsingular(np.asarray(x, float), v, nv, ny, float(k), p.thr, p.tri_off, p.tri_bary,
                      p.tri_w, p.gl_x, p.gl_w, p.iparams, p.ratio, int(force_split), acc)
    if st != STATUS_OK:
        raise QuadratureError(element_id, cfg.max_depth)
    if raw:
        return acc
    return _finish(acc, ny if n_x is None else n_x)


def integrate_singular(verts, k, config: QuadratureConfig | None = None):
    """(G_ii, H_ii, H'_ii) with the collocation point at the midpoint."""
    kernel_counter.add(1)
    cfg = config or QuadratureConfig()
    v, nv = _as_verts(verts)
    p = _packed(cfg)
    xc = v[:nv].mean(axis=0)
    g = _singular_g(xc, v, nv, float(k), p.sing_x, p.sing_w)
    return complex(g), 0.0j, 0.0j


def integrate_hypersingular(verts, k, config: QuadratureConfig | None = None):
    """Finite-part integral E_ii of d^2G/dn_x dn_y over the element."""
    kernel_counter.add(1)
    cfg = config or QuadratureConfig()
    v, nv = _as_verts(verts)
    p = _packed(cfg)
    xc = v[:nv].mean(axis=0)
    n = element_normal(verts)
    _, e = _self_terms(xc, v, nv, n, float(k), p.sing_x, p.sing_w, cfg.edge_parts, p.edge_x, p.edge_w)
    return complex(e)


def integrate_moment(verts, z, s, k, m=6):
    """Plane-wave moment of an element: integral of exp(ik (z - y).s) dy."""
    kernel_counter.add(1)
    v, nv = _as_verts(verts)
    p = _packed(QuadratureConfig())
    s = np.atleast_2d(np.asarray(s, float))
    out = _moments_one(v, nv, np.asarray(z, float), s, float(k), int(m), p.tri_off, p.tri_bary,
                       p.tri_w, p.gl_x, p.gl_w)
    return out if len(out) > 1 else complex(out[0])


@_jit
def rule_points(v, nv, m, tri_off, tri_bary, tri_w, glx, glw):
    """Quadrature points and area-weighted weights of the order-m rule."""
    if nv == 3:
        n = tri_off[m] - tri_off[m - 1]
    else:
        n = m * m
    pts = np.empty((n, 3))
    wts = np.empty(n)
    if nv == 3:
        area = _tri_area(v[0], v[1], v[2])
        for i in range(n):
            q = tri_off[m - 1] + i
            for c in range(3):
                pts[i, c] = tri_bary[q, 0] * v[0, c] + tri_bary[q, 1] * v[1, c] + tri_bary[q, 2] * v[2, c]
            wts[i] = tri_w[q] * area
    else:
        i = 0
        for a in range(m):
            u = glx[m, a]
            for b in range(m):
                t = glx[m, b]
                ju0 = (1 - t) * (v[1, 0] - v[0, 0]) + t * (v[2, 0] - v[3, 0])
                ju1 = (1 - t) * (v[1, 1] - v[0, 1]) + t * (v[2, 1] - v[3, 1])
                ju2 = (1 - t) * (v[1, 2] - v[0, 2]) + t * (v[2, 2] - v[3, 2])
                jt0 = (1 - u) * (v[3, 0] - v[0, 0]) + u * (v[2, 0] - v[1, 0])
                jt1 = (1 - u) * (v[3, 1] - v[0, 1]) + u * (v[2, 1] - v[1, 1])
                jt2 = (1 - u) * (v[3, 2] - v[0, 2]) + u * (v[2, 2] - v[1, 2])
                c0 = ju1 * jt2 - ju2 * jt1
                c1 = ju2 * jt0 - ju0 * jt2
                c2 = ju0 * jt1 - ju1 * jt0
                for c in range(3):
                    pts[i, c] = ((1 - u) * (1 - t) * v[0, c] + u * (1 - t) * v[1, c]
                                 + u * t * v[2, c] + (1 - u) * t * v[3, c])
                wts[i] = glw[m, a] * glw[m, b] * np.sqrt(c0 * c0 + c1 * c1 + c2 * c2)
                i += 1
    return pts, wts


@_jit
def _moments_one(v, nv, z, s, k, m, tri_off, tri_bary, tri_w, glx, glw):
    pts, wts = rule_points(v, nv, m, tri_off, tri_bary, tri_w, glx, glw)
    out = np.zeros(len(s), np.complex128)
    for q in range(len(wts)):
        for a in range(len(s)):
            ph = k * ((z[0] - pts[q, 0]) * s[a, 0] + (z[1] - pts[q, 1]) * s[a, 1]
                      + (z[2] - pts[q, 2]) * s[a, 2])
            out[a] += wts[q] * complex(np.cos(ph), np.sin(ph))
    return out


def adaptive_oracle(verts, x, k, n_x=None, levels=6, m=6):
    """Reference integral by uniform refinement: every element is split
    `levels` times and each piece integrated with the order-m rule.

    Intended for tests; cost grows as 4**levels.
    """
    v, nv = _as_verts(verts)
    ny = element_normal(verts)
    pieces = [v[:nv]]
    for _ in range(levels):
        nxt = []
        for q in pieces:
            nxt.extend(_split(q))
        pieces = nxt
    acc = np.zeros(8, complex)
    p = _packed(QuadratureConfig())
    x = np.asarray(x, float)
    for q in pieces:
        qq, nq = _as_verts(q)
        _regular(x, qq, nq, ny, _poly_area(qq, nq), float(k), m, p.tri_off, p.tri_bary, p.tri_w,
                 p.gl_x, p.gl_w, acc)
    return _finish(acc, ny if n_x is None else n_x)


def _split(v):
    nv = len(v)
    e = 0.5 * (v + np.roll(v, -1, axis=0))
    if nv == 3:
        return [np.array([v[0], e[0], e[2]]), np.array([e[0], v[1], e[1]]),
                np.array([e[2], e[1], v[2]]), np.array([e[0], e[1], e[2]])]
    c = v.mean(axis=0)
    return [np.array([v[0], e[0], c, e[3]]), np.array([e[0], v[1], e[1], c]),
            np.array([c, e[1], v[2], e[2]]), np.array([e[3], c, e[2], v[3]])]
