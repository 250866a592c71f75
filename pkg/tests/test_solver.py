import warnings

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from helmbem.solver import (SingularMatrixError, SolverConfig, SparseILU0, build_preconditioner, solve,
                            solve_cgs, solve_direct)


def _system(seed, n=60, shift=4.0):
    r = np.random.default_rng(seed)
    A = (r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))) / np.sqrt(n) + shift * np.eye(n)
    b = r.normal(size=n) + 1j * r.normal(size=n)
    return A, b


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), pre=st.sampled_from(["none", "row_scaling", "incomplete_lu"]))
def test_cgs_reaches_true_residual(seed, pre):
    A, b = _system(seed)
    x, rep = solve(A, b, SolverConfig("CGS", pre, 1e-10))
    assert rep.converged
    assert np.linalg.norm(b - A @ x) <= 1e-10 * np.linalg.norm(b)
    assert rep.residual <= 1e-10


def test_cgs_agrees_with_direct():
    A, b = _system(7, 120)
    xd, rd = solve(A, b, SolverConfig("direct"))
    xc, rc = solve(A, b, SolverConfig("CGS", "row_scaling", 1e-12))
    assert rd.residual <= 1e-13
    assert np.linalg.norm(xc - xd) <= 1e-10 * np.linalg.norm(xd)


def test_complete_lu_preconditioner_converges_at_once():
    A, b = _system(3)
    _, rep = solve(A, b, SolverConfig("CGS", "incomplete_lu", 1e-10))
    assert rep.iterations <= 1


def test_ilu0_exact_on_tridiagonal():
    n = 50
    main = 4 + 1j * np.arange(n) / n
    T = sp.diags([np.full(n - 1, -1.0 + 0.5j), main, np.full(n - 1, -1.0)], [-1, 0, 1], format="csr")
    M = SparseILU0(T)
    r = np.random.default_rng(0).normal(size=n) + 0j
    assert np.allclose(T @ M.apply(r), r, atol=1e-13)
    b = np.ones(n, complex)
    _, rep = solve_cgs(T, b, SolverConfig(tolerance=1e-12), M)
    assert rep.iterations <= 1


def test_ilu0_keeps_sparsity_and_matches_pattern():
    n = 40
    S = sp.random(n, n, density=0.1, random_state=2, format="csr") + sp.eye(n) * 5
    M = SparseILU0(S)
    F = M.factored.toarray()
    L = np.tril(F, -1) + np.eye(n)
    U = np.triu(F)
    pattern = S.toarray() != 0
    assert np.all((F != 0) <= pattern)
    # ILU(0): L U equals S on the pattern of S
    assert np.allclose((L @ U)[pattern], S.toarray()[pattern], atol=1e-12)


def test_zero_diagonal_rejected():
    A = np.eye(3, dtype=complex)
    A[1, 1] = 0
    with pytest.raises(ZeroDivisionError):
        build_preconditioner("row_scaling", A)
    with pytest.raises(ZeroDivisionError):
        SparseILU0(sp.csr_matrix(A))


def test_singular_matrix_raises():
    A = np.ones((4, 4), complex)
    with pytest.raises((SingularMatrixError, np.linalg.LinAlgError)):
        solve_direct(A, np.ones(4))


def test_non_convergence_is_reported():
    A, b = _system(5, 80, shift=0.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        x, rep = solve(A, b, SolverConfig("CGS", "none", 1e-14, 3))
    assert not rep.converged and rep.iterations == 3
    assert any("did not converge" in str(w.message) for w in caught)
    assert rep.residual == pytest.approx(np.linalg.norm(b - A @ x) / np.linalg.norm(b), rel=1e-6)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig("GMRES")
    with pytest.raises(ValueError):
        SolverConfig(preconditioner="jacobi")
    with pytest.raises(ValueError):
        solve(object(), np.ones(2), SolverConfig("direct"))


def test_report_lines():
    A, b = _system(1, 10)
    _, rep = solve(A, b, SolverConfig())
    assert rep.line().startswith("CGS solver: number of iterations =")
    _, rep = solve(A, b, SolverConfig("direct"))
    assert rep.line().startswith("direct solver")
