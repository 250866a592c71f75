"""Benchmark studies: rigid sphere scattering and the plane-wave duct.

Each study returns plain records that the demos print as CSV and the
acceptance tests compare against their bounds.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass

import numpy as np

from .assembly import AssemblyContext, BCArrays, bc_arrays
from .bench import DUCT_LENGTH, duct_solution, error_stats, gen_duct, sphere_rigid_planewave
from .fmm.operators import FmmConfig, build_operators
from .fmm.tree import cluster_tree
from .kernels import PlaneWave, PointSource, WaveContext
from .mesh import Mesh
from .postprocess import evaluate_exterior
from .quadrature import QuadratureConfig
from .run import solve_surface
from .solver import SolverConfig

C_AIR = 340.0
RHO_AIR = 1.3


@dataclass
class SphereRecord:
    n: int
    frequency: float
    method: str
    burton_miller: bool
    mean_error: float
    max_error: float
    min_db: float
    max_db: float
    iterations: int
    residual: float
    setup_time: float
    total_time: float


def sphere_surface(mesh: Mesh, frequency: float, method: str = "NoFMM", solver: SolverConfig | None = None,
                   fmm: FmmConfig | None = None, quad: QuadratureConfig | None = None,
                   burton_miller: bool | None = None, direction=(0.0, 0.0, 1.0), radius: float = 1.0):
    """Rigid sphere hit by a unit plane wave.

    Returns (record, computed surface pressure, analytic pressure at the
    element midpoints projected radially onto the sphere).
    """
    t0 = time.perf_counter()
    wave = WaveContext(frequency, C_AIR, RHO_AIR)
    d = np.asarray(direction, float)
    ctx = AssemblyContext(wave, mesh, BCArrays.sound_hard(mesh.n_elements), [PlaneWave(d, 1.0)],
                          burton_miller=burton_miller, quad=quad or QuadratureConfig())
    solver = solver or SolverConfig("direct" if method == "NoFMM" else "CGS")
    u, rep, t_setup = solve_surface(ctx, method, solver, fmm)
    phi, _ = ctx.bc.recover(u)
    p = wave.iwr * phi
    x = ctx.mesh.midpoints
    proj = radius * x / np.linalg.norm(x, axis=1)[:, None]
    p0 = sphere_rigid_planewave(proj, wave.k, radius, direction=d)
    st = error_stats(p, p0)
    rec = SphereRecord(ctx.n, frequency, method, bool(ctx.burton_miller), st.mean, st.max,
                       float(st.db.min()), float(st.db.max()), rep.iterations, rep.residual, t_setup,
                       time.perf_counter() - t0)
    return rec, p, p0


def fmm_setup_time(mesh: Mesh, frequency: float, method: str = "MLFMM", fmm: FmmConfig | None = None,
                   quad: QuadratureConfig | None = None, repeats: int = 3) -> float:
    """Best-of-`repeats` wall time for building the cluster tree and the FMM
    operators of the rigid-sphere problem (no solve)."""
    wave = WaveContext(frequency, C_AIR, RHO_AIR)
    ctx = AssemblyContext(wave, mesh, BCArrays.sound_hard(mesh.n_elements),
                          [PlaneWave(np.array([0.0, 0.0, 1.0]))], quad=quad or QuadratureConfig())
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        build_operators(cluster_tree(mesh, method), ctx, fmm)
        best = min(best, time.perf_counter() - t0)
    return best


@dataclass
class DuctRecord:
    h: float
    frequency: float
    n: int
    max_deviation: float  # max | |p|/442 - 1 | along the centerline
    mean_error: float  # mean |p - p_ref| / |p_ref|


def duct_context(h: float, frequency: float, sources=()) -> AssemblyContext:
    """Interior duct: unit velocity at x = 0, matched admittance at x = L,
    rigid elsewhere."""
    mesh = gen_duct(h)
    wave = WaveContext(frequency, C_AIR, RHO_AIR, tau=-1)
    x = mesh.midpoints[:, 0]
    kinds = np.full(mesh.n_elements, "VELO", dtype=object)
    values = np.zeros(mesh.n_elements, complex)
    inlet = np.isclose(x, 0.0)
    outlet = np.isclose(x, DUCT_LENGTH)
    values[inlet] = 1.0
    kinds[outlet] = "ADMI"
    values[outlet] = 1.0 / (RHO_AIR * C_AIR)
    return AssemblyContext(wave, mesh, bc_arrays(list(kinds), values, wave.iwr), list(sources))


def centerline(n_points: int = 69, margin: float = 0.025):
    x = np.linspace(margin, DUCT_LENGTH - margin, n_points)
    return np.column_stack([x, np.zeros_like(x), np.zeros_like(x)])


def duct_centerline(h: float, frequency: float, n_points: int = 69):
    """Pressure along the duct axis; returns (record, points, p, p_ref)."""
    ctx = duct_context(h, frequency)
    u, _, _ = solve_surface(ctx, "NoFMM", SolverConfig("direct"))
    phi, v = ctx.bc.recover(u)
    pts = centerline(n_points)
    ephi, _ = evaluate_exterior(phi, v, pts, ctx.mesh, ctx.wave)
    p = ctx.wave.iwr * ephi
    ref = duct_solution(pts[:, 0], RHO_AIR, C_AIR, frequency)
    dev = float(np.max(np.abs(np.abs(p) / (RHO_AIR * C_AIR) - 1.0)))
    rec = DuctRecord(h, frequency, ctx.n, dev, error_stats(p, ref).mean)
    return rec, pts, p, ref


def closed_duct_energy(h: float, frequencies, source=(0.37, 0.031, 0.017), probes=None):
    """Rigid closed duct driven by an interior point source.

    Returns the mean squared pressure magnitude over a set of interior
    probe points for every frequency (the resonance shows as the maximum).
    """
    mesh = gen_duct(h)
    if probes is None:
        x = np.linspace(0.2, DUCT_LENGTH - 0.2, 15)
        probes = np.column_stack([x, np.full_like(x, -0.043), np.full_like(x, 0.052)])
    src_pos = np.asarray(source, float)
    bc = BCArrays.sound_hard(mesh.n_elements)
    out = []
    for f in frequencies:
        wave = WaveContext(float(f), C_AIR, RHO_AIR, tau=-1)
        ctx = AssemblyContext(wave, mesh, bc, [PointSource(src_pos, 1.0)])
        u, _, _ = solve_surface(ctx, "NoFMM", SolverConfig("direct"))
        phi, v = ctx.bc.recover(u)
        ephi, _ = evaluate_exterior(phi, v, probes, ctx.mesh, wave, ctx.sources)
        out.append(float(np.mean(np.abs(wave.iwr * ephi) ** 2)))
    return np.asarray(out)


def resonance_peak(h: float, f_lo: float = 240.0, f_hi: float = 260.0, coarse: float = 1.0,
                   fine: float = 0.01):
    """Frequency of maximum energy on a 1 Hz grid refined to `fine` Hz around the best node."""
    grid = np.arange(f_lo, f_hi + 0.5 * coarse, coarse)
    e = closed_duct_energy(h, grid)
    best = grid[int(np.argmax(e))]
    lo, hi = max(f_lo, best - coarse), min(f_hi, best + coarse)
    # golden-section search on the refined bracket
    gr = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c1, c2 = b - gr * (b - a), a + gr * (b - a)
    e1, e2 = closed_duct_energy(h, [c1, c2])
    while b - a > fine:
        if e1 > e2:
            b, c2, e2 = c2, c1, e1
            c1 = b - gr * (b - a)
            e1 = closed_duct_energy(h, [c1])[0]
        else:
            a, c1, e1 = c1, c2, e2
            c2 = a + gr * (b - a)
            e2 = closed_duct_energy(h, [c2])[0]
    return 0.5 * (a + b), grid, e


def to_csv(records) -> str:
    """CSV text for a list of record dataclasses."""
    rows = [asdict(r) for r in records]
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


__all__ = ["DuctRecord", "SphereRecord", "centerline", "closed_duct_energy", "duct_centerline", "duct_context",
           "resonance_peak", "sphere_surface", "to_csv"]
