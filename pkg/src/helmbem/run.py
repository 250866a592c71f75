"""Per-frequency-step pipeline: boundary conditions, method choice,
assembly, solve, field evaluation and output."""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assembly import AssemblyContext, assemble_dense, bc_arrays
from .deck import JobSpec, resolve_boundary_conditions
from .fmm.operators import FmmConfig, build_operators, choose_method
from .fmm.tree import cluster_tree
from .kernels import WaveContext
from .mesh import validate
from .postprocess import SolutionField, log_name, solution_field, write_outputs
from .quadrature import QuadratureConfig
from .solver import SolverConfig, solve

@dataclass
class StepResult:
    step: int
    frequency: float
    method: str = ""
    solution: SolutionField | None = None
    lines: list = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class RunSettings:
    solver_tolerance: float = 1e-9
    max_iterations: int = 250
    fmm: FmmConfig | None = None
    quad: QuadratureConfig = QuadratureConfig()


def step_context(job: JobSpec, n: int, quad: QuadratureConfig | None = None) -> AssemblyContext:
    """Assembly context with the boundary conditions and sources of step n."""
    bnd = job.mesh.boundary()
    wave = WaveContext(job.plan.frequency_at(n), job.c, job.rho, job.tau)
    kinds, values, extra = resolve_boundary_conditions(job.bcs, job.curves, bnd.element_ids,
                                                       job.plan.step(n))
    bc = bc_arrays(kinds, values, wave.iwr, extra)
    return AssemblyContext(wave, bnd, bc, job.sources_at(n), quad=quad or QuadratureConfig())


def solve_surface(ctx: AssemblyContext, method: str, solver: SolverConfig | None = None,
                  fmm: FmmConfig | None = None, box_edge: float = 0.0, lines=None):
    """Assemble with or without FMM and solve for the unknown u.

    Returns (u, SolveReport, setup seconds); tree and truncation details
    are appended to `lines` when given.
    """
    solver = solver or SolverConfig()
    lines = [] if lines is None else lines
    t0 = time.perf_counter()
    if method == "NoFMM":
        system = assemble_dense(ctx)
        t_asm = time.perf_counter() - t0
        u, rep = solve(system.A, system.b, solver)
        return u, rep, t_asm
    fmm = fmm or FmmConfig()
    tree = cluster_tree(ctx.mesh, method, box_edge)
    lines += [f"  {s}" for s in tree.summary()]
    Ls = tree.truncations(ctx.wave.k, fmm.truncation_factor, fmm.min_expansion)
    lines.append("  truncation L per level: " + ", ".join(str(L) for L in Ls))
    ops = build_operators(tree, ctx, fmm)
    t_asm = time.perf_counter() - t0
    u, rep = solve(ops, ops.rhs, solver, ops.near)
    return u, rep, t_asm


def solve_step(job: JobSpec, n: int, settings: RunSettings | None = None, diameter: float | None = None):
    """Solve one frequency step; returns a StepResult (never raises for
    numerical failures, which end up in ``error``)."""
    settings = settings or RunSettings()
    res = StepResult(n, float("nan"))
    out = res.lines
    t0 = time.perf_counter()
    try:
        freq = res.frequency = job.plan.frequency_at(n)
        ctx = step_context(job, n, settings.quad)
        wave = ctx.wave
        if diameter is None:
            diameter = validate(job.mesh).diameter
        method, why = choose_method(job.method, ctx.n, wave.k, diameter)
        res.method = method
        out.append(f"Frequency step {n}: f = {freq:.6g} Hz, k = {wave.k:.6g} 1/m, method {method}")
        out += [f"  {w}" for w in why]
        solver = job.solver
        if solver == "direct" and method != "NoFMM":
            out.append("  the direct solver needs the full matrix: using CGS with the FMM")
            solver = "CGS"
        cfg = SolverConfig(solver, job.preconditioner, settings.solver_tolerance, settings.max_iterations)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            fcfg = settings.fmm or FmmConfig(min_expansion=job.min_expansion_length)
            u, rep, t_asm = solve_surface(ctx, method, cfg, fcfg, job.box_length, out)
        out.append(f"  {rep.line()}")
        out += [f"  Warning: {w.message}" for w in caught]
        phi, v = ctx.bc.recover(u)
        res.solution = solution_field(n, wave, job.mesh, phi, v, ctx.sources, settings.quad)
        out.append(f"  setup {t_asm:.2f} s, total {time.perf_counter() - t0:.2f} s")
        if not rep.converged:
            res.error = "solver did not converge"
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        res.error = f"{type(exc).__name__}: {exc}"
    if res.error:
        out.append(f"  Error in step {n}: {res.error}")
    return res


def header_lines(job: JobSpec) -> list:
    freqs = []
    for n in range(1, job.plan.num_steps + 1):
        try:
            freqs.append(job.plan.frequency_at(n))
        except ValueError:
            pass  # reported by the step itself
    rep = validate(job.mesh, job.c, max(freqs, default=None))
    lines = [job.title[0], job.title[1]]
    lines += rep.lines()
    lines.append(f"requested method {job.method}, solver {job.solver}, preconditioner {job.preconditioner}")
    return lines


def run_job(job: JobSpec, steps, out_root=None, settings: RunSettings | None = None, threads: int = 1,
            step_range=None, echo=None) -> list:
    """Solve the given steps, write be.out/be.{n} and the log; returns the
    StepResults in step order."""
    out_root = Path(job.base_dir if out_root is None else out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    steps = list(steps)
    diameter = validate(job.mesh).diameter
    logfile = out_root / log_name(step_range)

    def emit(fh, lines):
        for line in lines:
            fh.write(line + "\n")
            if echo:
                echo(line)
        fh.flush()

    def work(n):
        r = solve_step(job, n, settings, diameter)
        if r.ok:
            write_outputs(r.solution, out_root)
        return r

    results = []
    with open(logfile, "w") as fh:
        emit(fh, header_lines(job))
        if threads > 1 and len(steps) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for r in pool.map(work, steps):
                    emit(fh, r.lines)
                    results.append(r)
        else:
            for n in steps:
                r = work(n)
                emit(fh, r.lines)
                results.append(r)
        failed = [r.step for r in results if not r.ok]
        emit(fh, [f"{len(results) - len(failed)} of {len(results)} frequency steps solved"
                  + (f"; failed steps: {failed}" if failed else "")])
    return results


__all__ = ["RunSettings", "StepResult", "header_lines", "run_job", "solve_step", "solve_surface", "step_context"]
