"""Linear solvers: dense LU and left-preconditioned CGS."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numba as nb
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

PIVOT_TOL = 1e-30

_jit = nb.njit(cache=True, nogil=True)


class SingularMatrixError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    method: str = "CGS"  # "CGS" | "direct"
    preconditioner: str = "row_scaling"  # "none" | "row_scaling" | "incomplete_lu"
    tolerance: float = 1e-9
    max_iterations: int = 250

    def __post_init__(self):
        if self.method not in ("CGS", "direct"):
            raise ValueError(f"unknown solver {self.method!r}")
        if self.preconditioner not in ("none", "row_scaling", "incomplete_lu"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")
        if not self.tolerance > 0 or self.max_iterations < 1:
            raise ValueError("tolerance must be > 0 and max_iterations >= 1")


@dataclass
class SolveReport:
    method: str
    iterations: int
    residual: float
    converged: bool
    wall_time: float
    breakdown: bool = False

    def line(self) -> str:
        if self.method == "CGS":
            return f"CGS solver: number of iterations = {self.iterations}, relative error = {self.residual:g}"
        return f"direct solver: relative residual = {self.residual:g}"


def _relres(A_apply, x, b):
    nb_ = np.linalg.norm(b)
    return float(np.linalg.norm(b - A_apply(x)) / nb_) if nb_ > 0 else float(np.linalg.norm(A_apply(x)))


def solve_direct(A, b):
    """LU with partial pivoting; raises on a pivot below 1e-30 in magnitude."""
    t0 = time.perf_counter()
    A = np.asarray(A)
    b = np.asarray(b)
    with warnings.catch_warnings():
        # an exactly singular factor is reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    small = np.abs(np.diag(lu)).min() if len(lu) else 1.0
    if small < PIVOT_TOL:
        raise SingularMatrixError(f"matrix is numerically singular (pivot {small:.3e})")
    x = sla.lu_solve((lu, piv), b)
    res = _relres(lambda v: A @ v, x, b)
    return x, SolveReport("direct", 0, res, True, time.perf_counter() - t0)


# -- preconditioners ---------------------------------------------------------


class Preconditioner:
    kind = "none"

    def apply(self, r):
        return r


class RowScaling(Preconditioner):
    kind = "row_scaling"

    def __init__(self, diag):
        diag = np.asarray(diag)
        if np.any(diag == 0):
            raise ZeroDivisionError(f"row scaling: zero diagonal entry in row {int(np.argmax(diag == 0))}")
        self.inv = 1.0 / diag

    def apply(self, r):
        return self.inv * r


class DenseLU(Preconditioner):
    """ILU(0) on a full pattern is the complete LU factorisation."""
    kind = "incomplete_lu"

    def __init__(self, A):
        self.lu = sla.lu_factor(np.asarray(A))

    def apply(self, r):
        return sla.lu_solve(self.lu, r)


class SparseILU0(Preconditioner):
    """Zero-fill incomplete LU of a CSR matrix (unit lower factor)."""
    kind = "incomplete_lu"

    def __init__(self, M):
        M = sp.csr_matrix(M, dtype=complex, copy=True)
        M.sum_duplicates()
        M.sort_indices()
        n = M.shape[0]
        diag = np.full(n, -1, np.int64)
        rows = np.repeat(np.arange(n), np.diff(M.indptr))
        hit = np.flatnonzero(M.indices == rows)
        diag[rows[hit]] = hit
        if np.any(diag < 0):
            raise ZeroDivisionError(f"incomplete LU: missing diagonal in row {int(np.argmax(diag < 0))}")
        bad = _ilu0(M.indptr, M.indices, M.data, diag)
        if bad >= 0:
            raise ZeroDivisionError(f"incomplete LU: zero pivot in row {bad}")
        self.indptr, self.indices, self.data, self.diag = M.indptr, M.indices, M.data, diag
        self.factored = M

    def apply(self, r):
        return _ilu_solve(self.indptr, self.indices, self.data, self.diag, np.asarray(r, np.complex128))


@_jit
def _ilu0(indptr, indices, data, diag):
    n = len(indptr) - 1
    pos = -np.ones(n, np.int64)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            pos[indices[p]] = p
        for p in range(indptr[i], diag[i]):
            k = indices[p]
            piv = data[diag[k]]
            if piv == 0:
                return k
            data[p] /= piv
            lik = data[p]
            for q in range(diag[k] + 1, indptr[k + 1]):
                t = pos[indices[q]]
                if t >= 0:
                    data[t] -= lik * data[q]
        for p in range(indptr[i], indptr[i + 1]):
            pos[indices[p]] = -1
        if data[diag[i]] == 0:
            return i
    return -1


@_jit
def _ilu_solve(indptr, indices, data, diag, r):
    n = len(r)
    y = r.copy()
    for i in range(n):
        acc = y[i]
        for p in range(indptr[i], diag[i]):
            acc -= data[p] * y[indices[p]]
        y[i] = acc
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for p in range(diag[i] + 1, indptr[i + 1]):
            acc -= data[p] * y[indices[p]]
        y[i] = acc / data[diag[i]]
    return y


def build_preconditioner(kind: str, matrix) -> Preconditioner:
    """Row scaling or zero-fill incomplete LU of a dense or sparse matrix."""
    if kind == "none":
        return Preconditioner()
    if kind == "row_scaling":
        return RowScaling(matrix.diagonal() if sp.issparse(matrix) else np.diag(np.asarray(matrix)))
    if kind == "incomplete_lu":
        return SparseILU0(matrix) if sp.issparse(matrix) else DenseLU(matrix)
    raise ValueError(f"unknown preconditioner {kind!r}")


# -- CGS -----------------------------------------------------------------------


def solve_cgs(matvec, b, config: SolverConfig | None = None, preconditioner: Preconditioner | None = None):
    """Conjugate gradient squared on M^-1 A x = M^-1 b with x0 = 0.

    Convergence is declared on the true relative residual ||b - A x|| / ||b||,
    re-evaluated whenever the recursive residual says it is small enough.
    """
    config = config or SolverConfig()
    M = preconditioner or Preconditioner()
    A = matvec if callable(matvec) else (lambda v, _A=matvec: _A @ v)
    t0 = time.perf_counter()
    b = np.asarray(b, complex)
    n = len(b)
    bnorm = np.linalg.norm(b)
    x = np.zeros(n, complex)
    if bnorm == 0:
        return x, SolveReport("CGS", 0, 0.0, True, time.perf_counter() - t0)

    r = M.apply(b)
    r0norm = np.linalg.norm(r)
    rt = r.copy()
    target = config.tolerance
    best_x, best_res = x.copy(), 1.0
    rho_prev = 1.0
    u = p = q = None
    breakdown = False
    it = 0
    true_res = 1.0
    while it < config.max_iterations:
        it += 1
        rho = np.vdot(rt, r)
        if abs(rho) <= 1e-300 * r0norm ** 2:
            breakdown = True
            break
        if it == 1:
            u = r.copy()
            p = u.copy()
        else:
            beta = rho / rho_prev
            u = r + beta * q
            p = u + beta * (q + beta * p)
        vhat = M.apply(A(p))
        sigma = np.vdot(rt, vhat)
        if sigma == 0:
            breakdown = True
            break
        alpha = rho / sigma
        q = u - alpha * vhat
        uq = u + q
        x = x + alpha * uq
        r = r - alpha * M.apply(A(uq))
        rho_prev = rho
        if not np.all(np.isfinite(x)):
            breakdown = True
            break
        if np.linalg.norm(r) / r0norm < target:
            true_res = _relres(A, x, b)
            if true_res < best_res:
                best_x, best_res = x.copy(), true_res
            if true_res < config.tolerance:
                break
            # recursive residual drifted: tighten the internal target
            target = target * config.tolerance / true_res
    if best_res > config.tolerance or breakdown:
        true_res = _relres(A, x, b) if np.all(np.isfinite(x)) else np.inf
        if true_res < best_res:
            best_x, best_res = x, true_res
    converged = best_res < config.tolerance and not (breakdown and best_res >= config.tolerance)
    rep = SolveReport("CGS", it, float(best_res), bool(converged), time.perf_counter() - t0, breakdown)
    if not converged:
        warnings.warn(f"CGS did not converge: {rep.line()}" + (" (breakdown)" if breakdown else ""),
                      stacklevel=2)
    return best_x, rep


def solve(A, b, config: SolverConfig | None = None, precond_matrix=None):
    """Dispatch on config.method; `A` is a dense array or an object with
    ``matvec`` (then `precond_matrix` supplies the explicit nearfield)."""
    config = config or SolverConfig()
    dense = isinstance(A, np.ndarray)
    if config.method == "direct":
        if not dense:
            raise ValueError("the direct solver needs an explicit dense matrix")
        return solve_direct(A, b)
    pm = A if dense else precond_matrix
    pre = build_preconditioner(config.preconditioner, pm) if pm is not None else Preconditioner()
    return solve_cgs(A if dense else A.matvec, b, config, pre)


__all__ = ["DenseLU", "Preconditioner", "RowScaling", "SingularMatrixError", "SolveReport", "SolverConfig",
           "SparseILU0", "build_preconditioner", "solve", "solve_cgs", "solve_direct"]
