import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmbem.assembly import AssemblyContext, BCArrays, assemble_dense, bc_arrays
from helmbem.bench import gen_sphere_cube
from helmbem.fmm.operators import (FmmConfig, build_operators, choose_method, count_nonzeros, translation,
                                   translation_reference)
from helmbem.fmm.tree import cluster_tree
from helmbem.kernels import PlaneWave, WaveContext, green
from helmbem.special import sphere_grid


@pytest.fixture(scope="module")
def setup972():
    m = gen_sphere_cube(9)
    ctx = AssemblyContext(WaveContext(1000.0), m, BCArrays.sound_hard(m.n_elements),
                          [PlaneWave(np.array([0.0, 0.0, 1.0]))])
    dense = assemble_dense(ctx)
    ops = {meth: build_operators(cluster_tree(m, meth), ctx) for meth in ("SLFMM", "MLFMM")}
    return ctx, dense, ops


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), a=st.complex_numbers(max_magnitude=10, min_magnitude=0.1),
       b=st.complex_numbers(max_magnitude=10, min_magnitude=0.1), method=st.sampled_from(["SLFMM", "MLFMM"]))
def test_matvec_linearity(setup972, seed, a, b, method):
    _, _, ops = setup972
    op = ops[method]
    r = np.random.default_rng(seed)
    x = r.normal(size=op.n) + 1j * r.normal(size=op.n)
    y = r.normal(size=op.n) + 1j * r.normal(size=op.n)
    lhs = op.matvec(a * x + b * y)
    rhs = a * op.matvec(x) + b * op.matvec(y)
    scale = abs(a) * np.linalg.norm(op.matvec(x)) + abs(b) * np.linalg.norm(op.matvec(y))
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale


@pytest.mark.parametrize("method", ["SLFMM", "MLFMM"])
def test_matvec_matches_dense(setup972, method, rng):
    ctx, dense, ops = setup972
    x = rng.normal(size=ctx.n) + 1j * rng.normal(size=ctx.n)
    y = dense.A @ x
    assert np.linalg.norm(ops[method].matvec(x) - y) <= 1e-2 * np.linalg.norm(y)
    assert np.allclose(ops[method].rhs, dense.b, rtol=1e-12, atol=1e-15)


def test_matvec_converges_with_truncation(rng):
    m = gen_sphere_cube(9)
    ctx = AssemblyContext(WaveContext(200.0), m, BCArrays.sound_hard(m.n_elements))
    A = assemble_dense(ctx).A
    x = rng.normal(size=ctx.n) + 0j
    tree = cluster_tree(m, "SLFMM")
    errs = [np.linalg.norm(build_operators(tree, ctx, FmmConfig(truncation_factor=f)).matvec(x) - A @ x)
            for f in (1.8, 15.0)]
    assert errs[1] < 0.5 * errs[0]
    assert errs[1] <= 1e-5 * np.linalg.norm(A @ x)


def test_mixed_bcs_near_and_rhs(rng):
    m = gen_sphere_cube(6)
    w = WaveContext(300.0)
    kinds = ["VELO"] * 100 + ["PRES"] * 50 + ["ADMI"] * (m.n_elements - 150)
    vals = np.linspace(0.1, 1.0, m.n_elements) * (1 + 0.5j)
    ctx = AssemblyContext(w, m, bc_arrays(kinds, vals, w.iwr), [PlaneWave(np.array([1.0, 0, 0]))])
    dense = assemble_dense(ctx)
    ops = build_operators(cluster_tree(m, "SLFMM"), ctx, FmmConfig(truncation_factor=15))
    x = rng.normal(size=ctx.n) + 0j
    assert np.linalg.norm(ops.matvec(x) - dense.A @ x) <= 1e-4 * np.linalg.norm(dense.A @ x)
    assert np.linalg.norm(ops.rhs - dense.b) <= 1e-4 * np.linalg.norm(dense.b)


@settings(max_examples=30, deadline=None)
@given(d=st.floats(0.5, 20.0), k=st.floats(0.5, 10.0), L=st.integers(2, 30), seed=st.integers(0, 1000))
def test_translation_matches_reference(d, k, L, seed):
    r = np.random.default_rng(seed)
    X = r.normal(size=3)
    X *= d / np.linalg.norm(X)
    s = sphere_grid(L).nodes
    a = translation(X[None], s, k, L)[0]
    b = translation_reference(X, s, k, L)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-11 * np.abs(b).max())


def test_plane_wave_expansion_reproduces_green():
    # far-field factorisation: G(x, y) = ik/(16 pi^2) sum_s w e^{ik(x-zx).s} D(X, s) e^{-ik(y-zy).s}
    k = 4.0
    zx, zy = np.zeros(3), np.array([2.0, 1.0, 0.5])
    x, y = zx + np.array([0.1, -0.2, 0.15]), zy + np.array([-0.1, 0.2, 0.05])
    L = 20
    g = sphere_grid(L)
    D = translation((zx - zy)[None], g.nodes, k, L)[0]
    val = 1j * k / (16 * np.pi**2) * np.sum(g.weights * np.exp(1j * k * (x - zx) @ g.nodes.T) * D
                                          * np.exp(-1j * k * (y - zy) @ g.nodes.T))
    assert abs(val - green(x, y, k)) <= 1e-6 * abs(green(x, y, k))


def test_nonzeros_match_structural_counts(setup972):
    ctx, _, ops = setup972
    for meth, op in ops.items():
        tree = cluster_tree(ctx.mesh, meth)
        Ls = tree.truncations(ctx.wave.k)
        st_ = count_nonzeros(tree, Ls)
        got = op.nonzeros()
        assert got["N"] == st_["N"]
        for lv, L in zip(tree.levels, Ls):
            assert got[f"T{lv.number}"] == st_[f"T{lv.number}"] == 2 * L * L * ctx.n


@pytest.mark.parametrize("req,n,f,diam,expect", [
    ("NoFMM", 1000, 1000.0, 2.0, "NoFMM"),
    ("NoFMM", 25000, 1000.0, 2.0, "SLFMM"),
    ("NoFMM", 60000, 1000.0, 2.0, "MLFMM"),
    ("SLFMM", 60000, 1000.0, 2.0, "MLFMM"),
    ("MLFMM", 5000, 1.0, 2.0, "NoFMM"),
    ("MLFMM", 5000, 100.0, 2.0, "SLFMM"),
    ("MLFMM", 5000, 1000.0, 2.0, "MLFMM"),
])
def test_method_switching(req, n, f, diam, expect):
    method, why = choose_method(req, n, 2 * np.pi * f / 340.0, diam)
    assert method == expect
    assert bool(why) == (expect != req)
