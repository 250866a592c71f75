from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps

from helmbem.special import (gauss_legendre, legendre_seq, sphere_grid, spherical_hankel1_seq,
                             spherical_jy_seq, triangle_rule, triangle_rule_table)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.05, 300.0), order=st.integers(1, 80))
def test_wronskian(x, order):
    j, y = spherical_jy_seq(order, x)
    n = np.arange(1, order + 1)
    w = x * x * (j[n] * y[n - 1] - j[n - 1] * y[n])
    assert np.max(np.abs(w - 1.0)) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(x=st.floats(0.1, 200.0), order=st.integers(0, 60))
def test_bessel_matches_scipy(x, order):
    j, y = spherical_jy_seq(order, x)
    n = np.arange(order + 1)
    jr, yr = sps.spherical_jn(n, x), sps.spherical_yn(n, x)
    scale = np.maximum(np.abs(jr), 1e-300)
    # j_n below 1e-250 underflows gracefully; compare where representable
    ok = np.abs(jr) > 1e-250
    assert np.all(np.abs(j[ok] - jr[ok]) <= 1e-11 * scale[ok] + 1e-15)
    fin = np.isfinite(yr)
    assert np.allclose(y[fin], yr[fin], rtol=1e-11, atol=0)


def test_hankel_combines_j_and_y():
    h = spherical_hankel1_seq(10, 3.7)
    j, y = spherical_jy_seq(10, 3.7)
    assert np.array_equal(h, j + 1j * y)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_bessel_rejects_nonpositive_argument(bad):
    with pytest.raises(ValueError):
        spherical_hankel1_seq(3, bad)


@settings(max_examples=100, deadline=None)
@given(t=st.floats(-1.0, 1.0), order=st.integers(0, 60))
def test_legendre_matches_scipy(t, order):
    p = legendre_seq(order, t)
    assert np.allclose(p, sps.eval_legendre(np.arange(order + 1), t), rtol=1e-12, atol=1e-13)


def test_legendre_rejects_out_of_range():
    with pytest.raises(ValueError):
        legendre_seq(4, 1.01)


@pytest.mark.parametrize("m", range(1, 21))
def test_gauss_rule_exact_for_polynomials(m):
    x, w = gauss_legendre(m)
    for p in range(2 * m):
        exact = 0.0 if p % 2 else 2.0 / (p + 1)
        assert abs(np.dot(w, x**p) - exact) <= 1e-13


@pytest.mark.parametrize("m", range(1, 7))
def test_triangle_rule_exact_for_monomials(m):
    bary, w = triangle_rule(m)
    assert abs(w.sum() - 0.5) <= 1e-15
    assert np.all(bary >= 0) and np.allclose(bary.sum(axis=1), 1.0)
    x, y = bary[:, 1], bary[:, 2]
    for a in range(m + 1):
        for b in range(m + 1 - a):
            exact = factorial(a) * factorial(b) / factorial(a + b + 2)
            assert abs(np.dot(w, x**a * y**b) - exact) <= 1e-13


def test_triangle_rule_table_layout():
    off, bary, w = triangle_rule_table(6)
    assert off[0] == 0 and off[-1] == len(w) == len(bary)
    for m in range(1, 7):
        assert abs(w[off[m - 1]:off[m]].sum() - 1.0) <= 1e-14


def test_sphere_grid_weights_and_nodes():
    g = sphere_grid(9)
    assert g.size == 2 * 9 * 9
    assert abs(g.weights.sum() - 4 * np.pi) <= 1e-13
    assert np.allclose(np.linalg.norm(g.nodes, axis=1), 1.0)


@settings(max_examples=60, deadline=None)
@given(kx=st.floats(0.1, 40.0), theta=st.floats(0, np.pi), phi=st.floats(0, 2 * np.pi))
def test_sphere_grid_plane_wave_integral(kx, theta, phi):
    L = int(np.ceil(kx)) + 10
    g = sphere_grid(L)
    X = kx * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    val = np.sum(g.weights * np.exp(1j * g.nodes @ X))
    assert abs(val - 4 * np.pi * sps.spherical_jn(0, kx)) <= 1e-6


def test_sphere_grid_rejects_zero():
    with pytest.raises(ValueError):
        sphere_grid(0)
