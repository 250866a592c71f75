"""Collocation system with Burton-Miller coupling.

Row i of the combined equation reads

    (phi_i - gamma v_i)/2 - tau sum_j (H - gamma E)_ij phi_j
                          + tau sum_j (G - gamma H')_ij v_j = phi_inc - gamma v_inc

Boundary conditions are eliminated per element through affine maps
phi = a*u + phi0 and v = b*u + v0, so the assembled matrix acts on the
single unknown u per element.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .kernels import PlaneWave, PointSource, WaveContext, incident_potential, incident_velocity
from .mesh import Mesh
from .quadrature import (STATUS_OK, QuadratureConfig, QuadratureError, _nonsingular, _order_from_thr,
                         _regular, _self_terms, kernel_counter)

PHI = 0
VEL = 1

_jit = nb.njit(cache=True, nogil=True)


@dataclass
class BCArrays:
    """phi = a*u + phi0, v = b*u + v0 per element."""

    a: np.ndarray
    b: np.ndarray
    phi0: np.ndarray
    v0: np.ndarray

    @property
    def unknown_kind(self) -> np.ndarray:
        return np.where(self.a != 0, PHI, VEL)

    def recover(self, u):
        return self.a * u + self.phi0, self.b * u + self.v0

    @classmethod
    def sound_hard(cls, n):
        z = np.zeros(n, complex)
        return cls(np.ones(n, complex), z.copy(), z.copy(), z.copy())


def bc_arrays(kinds, values, iwr, extra_velocity=None) -> BCArrays:
    """Build the affine maps from per-element kinds ("VELO", "PRES", "ADMI").

    ADMI uses v = Y p + v_bar with p = i omega rho phi; `extra_velocity`
    carries v_bar for elements that also have a VELO condition.
    """
    n = len(kinds)
    a = np.zeros(n, complex)
    b = np.zeros(n, complex)
    phi0 = np.zeros(n, complex)
    v0 = np.zeros(n, complex)
    values = np.asarray(values, complex)
    extra = np.zeros(n, complex) if extra_velocity is None else np.asarray(extra_velocity, complex)
    for j, kind in enumerate(kinds):
        if kind == "VELO":
            a[j], v0[j] = 1.0, values[j]
        elif kind == "PRES":
            b[j], phi0[j] = 1.0, values[j] / iwr
        elif kind == "ADMI":
            a[j], b[j], v0[j] = 1.0, values[j] * iwr, extra[j]
        else:
            raise ValueError(f"unknown boundary condition kind {kind!r}")
    return BCArrays(a, b, phi0, v0)


@dataclass
class AssemblyContext:
    wave: WaveContext
    mesh: Mesh  # boundary elements only
    bc: BCArrays
    sources: list = field(default_factory=list)
    burton_miller: bool | None = None
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    # gamma = -tau i/k: for exterior problems this is CBIE + (i/k) HBIE,
    # whose spectrum stays in the right half-plane for exp(ikr) kernels;
    # interior problems mirror it.  +1 selects gamma = +tau i/k.
    coupling_sign: float = -1.0

    def __post_init__(self):
        if np.any(self.mesh.kind != 0):
            self.mesh = self.mesh.boundary()
        if self.burton_miller is None:
            self.burton_miller = self.wave.tau == 1

    @property
    def n(self):
        return self.mesh.n_elements

    @property
    def gamma(self) -> complex:
        return self.coupling_sign * self.wave.tau * self.wave.gamma if self.burton_miller else 0.0j

    def geometry(self):
        m = self.mesh
        return (np.ascontiguousarray(m.midpoints), np.ascontiguousarray(m.normals),
                np.ascontiguousarray(m.vertices), np.ascontiguousarray(m.nvert))


@dataclass
class DenseSystem:
    A: np.ndarray
    b: np.ndarray
    unknown_kind: np.ndarray


def incident_rhs(ctx: AssemblyContext) -> np.ndarray:
    """phi_inc - gamma v_inc at the collocation points.

    Source strengths are pressure amplitudes, so potentials carry 1/(i omega rho).
    """
    x, n = ctx.mesh.midpoints, ctx.mesh.normals
    k = ctx.wave.k
    out = np.zeros(ctx.n, complex)
    for src in ctx.sources:
        phi = incident_potential(src, x, k) / ctx.wave.iwr
        vel = incident_velocity(src, x, n, k) / ctx.wave.iwr
        out += phi - ctx.gamma * vel
    return out


def self_terms(ctx: AssemblyContext):
    """(G_ii, E_ii) for every element."""
    x, nrm, verts, nv = ctx.geometry()
    p = ctx.quad.packed()
    kernel_counter.add(ctx.n)
    return _self_all(x, nrm, verts, nv, ctx.wave.k, p.sing_x, p.sing_w, ctx.quad.edge_parts,
                     p.edge_x, p.edge_w)


@_jit
def _self_all(x, nrm, verts, nv, k, sx, sw, parts, ex, ew):
    n = len(x)
    g = np.empty(n, np.complex128)
    e = np.empty(n, np.complex128)
    for i in range(n):
        g[i], e[i] = _self_terms(x[i], verts[i], nv[i], nrm[i], k, sx, sw, parts, ex, ew)
    return g, e


@_jit
def _pair(i, j, x, nrm, verts, nv, areas, k, gii, eii, thr, tri_off, tri_bary, tri_w, glx, glw,
          iparams, ratio, acc):
    """Return status, G, H, H', E for collocation i and element j."""
    if i == j:
        return STATUS_OK, gii[i], 0.0j, 0.0j, eii[i]
    for q in range(8):
        acc[q] = 0.0
    xi = x[i]
    d0 = xi[0] - x[j, 0]
    d1 = xi[1] - x[j, 1]
    d2 = xi[2] - x[j, 2]
    rt = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2) / np.sqrt(areas[j])
    m = _order_from_thr(rt, thr)
    if rt >= ratio and (iparams[3] == 0 or m <= iparams[0]):
        _regular(xi, verts[j], nv[j], nrm[j], areas[j], k, min(m, iparams[0]), tri_off, tri_bary,
                 tri_w, glx, glw, acc)
    else:
        st = _nonsingular(xi, verts[j], nv[j], nrm[j], k, thr, tri_off, tri_bary, tri_w, glx, glw,
                          iparams, ratio, 0, acc)
        if st != STATUS_OK:
            return st, 0.0j, 0.0j, 0.0j, 0.0j
    ni = nrm[i]
    hp = acc[2] * ni[0] + acc[3] * ni[1] + acc[4] * ni[2]
    e = acc[5] * ni[0] + acc[6] * ni[1] + acc[7] * ni[2]
    return STATUS_OK, acc[0], acc[1], hp, e


@_jit
def _coeffs(i, j, g, h, hp, e, tau, gamma):
    """Coefficients of phi_j and v_j in row i (jump terms included)."""
    cphi = -tau * (h - gamma * e)
    cv = tau * (g - gamma * hp)
    if i == j:
        cphi += 0.5
        cv -= 0.5 * gamma
    return cphi, cv


@_jit
def _dense_core(rows, x, nrm, verts, nv, areas, k, tau, gamma, a, b, phi0, v0, gii, eii,
                thr, tri_off, tri_bary, tri_w, glx, glw, iparams, ratio, A, rhs):
    n = len(x)
    acc = np.zeros(8, np.complex128)
    for r in range(len(rows)):
        i = rows[r]
        s = 0.0j
        for j in range(n):
            st, g, h, hp, e = _pair(i, j, x, nrm, verts, nv, areas, k, gii, eii, thr, tri_off,
                                    tri_bary, tri_w, glx, glw, iparams, ratio, acc)
            if st != STATUS_OK:
                return j
            cphi, cv = _coeffs(i, j, g, h, hp, e, tau, gamma)
            A[r, j] = cphi * a[j] + cv * b[j]
            s += cphi * phi0[j] + cv * v0[j]
        rhs[r] -= s
    return -1


@_jit
def _blocks_core(rows, x, nrm, verts, nv, areas, k, tau, gamma, gii, eii,
                 thr, tri_off, tri_bary, tri_w, glx, glw, iparams, ratio, Aphi, Av):
    n = len(x)
    acc = np.zeros(8, np.complex128)
    for r in range(len(rows)):
        i = rows[r]
        for j in range(n):
            st, g, h, hp, e = _pair(i, j, x, nrm, verts, nv, areas, k, gii, eii, thr, tri_off,
                                    tri_bary, tri_w, glx, glw, iparams, ratio, acc)
            if st != STATUS_OK:
                return j
            Aphi[r, j] = h - gamma * e
            Av[r, j] = g - gamma * hp
    return -1


@_jit
def _sparse_core(ii, jj, x, nrm, verts, nv, areas, k, tau, gamma, a, b, phi0, v0, gii, eii,
                 thr, tri_off, tri_bary, tri_w, glx, glw, iparams, ratio, data, rhs):
    """Entries for explicit (i, j) pairs, used for the FMM nearfield."""
    acc = np.zeros(8, np.complex128)
    for p in range(len(ii)):
        i = ii[p]
        j = jj[p]
        st, g, h, hp, e = _pair(i, j, x, nrm, verts, nv, areas, k, gii, eii, thr, tri_off,
                                tri_bary, tri_w, glx, glw, iparams, ratio, acc)
        if st != STATUS_OK:
            return j
        cphi, cv = _coeffs(i, j, g, h, hp, e, tau, gamma)
        data[p] = cphi * a[j] + cv * b[j]
        rhs[i] -= cphi * phi0[j] + cv * v0[j]
    return -1


def _args(ctx, self_gi=None):
    x, nrm, verts, nv = ctx.geometry()
    p = ctx.quad.packed()
    gii, eii = self_terms(ctx) if self_gi is None else self_gi
    return (x, nrm, verts, nv, np.ascontiguousarray(ctx.mesh.areas), float(ctx.wave.k),
            float(ctx.wave.tau), complex(ctx.gamma)), (gii, eii), p


def _raise(ctx, j):
    raise QuadratureError(int(ctx.mesh.element_ids[j]), ctx.quad.max_depth)


def assemble_row(ctx: AssemblyContext, i: int):
    """Raw block rows (H - gamma E)_i., (G - gamma H')_i. and the incident
    right-hand side entry of collocation point i."""
    geo, selfs, p = _args(ctx)
    n = ctx.n
    kernel_counter.add(n)
    Aphi = np.zeros((1, n), complex)
    Av = np.zeros((1, n), complex)
    bad = _blocks_core(np.array([i]), *geo, *selfs, p.thr, p.tri_off, p.tri_bary, p.tri_w,
                       p.gl_x, p.gl_w, p.iparams, p.ratio, Aphi, Av)
    if bad >= 0:
        _raise(ctx, bad)
    return Aphi[0], Av[0], incident_rhs(ctx)[i]


def apply_boundary_conditions(ctx: AssemblyContext, i, hg_row, gh_row, rhs_i):
    """Turn raw block rows into the BC-eliminated system row and rhs."""
    tau, gamma = ctx.wave.tau, ctx.gamma
    cphi = -tau * np.asarray(hg_row, complex)
    cv = tau * np.asarray(gh_row, complex)
    cphi[i] += 0.5
    cv[i] -= 0.5 * gamma
    bc = ctx.bc
    row = cphi * bc.a + cv * bc.b
    return row, rhs_i - np.dot(cphi, bc.phi0) - np.dot(cv, bc.v0)


def assemble_blocks(ctx: AssemblyContext, rows=None):
    """Raw (H - gamma E) and (G - gamma H') blocks for the given rows."""
    geo, selfs, p = _args(ctx)
    rows = np.arange(ctx.n) if rows is None else np.asarray(rows, np.int64)
    Aphi = np.zeros((len(rows), ctx.n), complex)
    Av = np.zeros((len(rows), ctx.n), complex)
    kernel_counter.add(Aphi.size)
    bad = _blocks_core(rows, *geo, *selfs, p.thr, p.tri_off, p.tri_bary, p.tri_w, p.gl_x, p.gl_w,
                       p.iparams, p.ratio, Aphi, Av)
    if bad >= 0:
        _raise(ctx, bad)
    return Aphi, Av


def assemble_dense(ctx: AssemblyContext, rows=None) -> DenseSystem:
    """Full BC-eliminated system; rows are independent so any subset or
    order gives identical entries."""
    geo, selfs, p = _args(ctx)
    rows = np.arange(ctx.n) if rows is None else np.asarray(rows, np.int64)
    A = np.empty((len(rows), ctx.n), complex)
    kernel_counter.add(A.size)
    rhs = incident_rhs(ctx)[rows].copy()
    bc = ctx.bc
    bad = _dense_core(rows, *geo, bc.a, bc.b, bc.phi0, bc.v0, *selfs, p.thr, p.tri_off, p.tri_bary,
                      p.tri_w, p.gl_x, p.gl_w, p.iparams, p.ratio, A, rhs)
    if bad >= 0:
        _raise(ctx, bad)
    if not np.all(np.isfinite(A)):
        raise FloatingPointError("non-finite entries in the system matrix")
    return DenseSystem(A, rhs, bc.unknown_kind)


def assemble_pairs(ctx: AssemblyContext, ii, jj, self_gi=None):
    """Entries A[ii, jj] of the BC-eliminated matrix and the rhs
    contributions of those pairs (rhs starts at zero)."""
    geo, selfs, p = _args(ctx, self_gi)
    bc = ctx.bc
    data = np.empty(len(ii), complex)
    rhs = np.zeros(ctx.n, complex)
    kernel_counter.add(len(ii))
    bad = _sparse_core(np.asarray(ii, np.int64), np.asarray(jj, np.int64), *geo, bc.a, bc.b, bc.phi0,
                       bc.v0, *selfs, p.thr, p.tri_off, p.tri_bary, p.tri_w, p.gl_x, p.gl_w,
                       p.iparams, p.ratio, data, rhs)
    if bad >= 0:
        _raise(ctx, bad)
    return data, rhs


__all__ = ["AssemblyContext", "BCArrays", "DenseSystem", "PHI", "VEL", "PlaneWave", "PointSource",
           "apply_boundary_conditions", "assemble_blocks", "assemble_dense", "assemble_pairs",
           "assemble_row", "bc_arrays", "incident_rhs", "self_terms"]
