import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import IntegrationWarning, quad
from scipy.spatial.transform import Rotation

from helmbem.quadrature import (QuadratureConfig, QuadratureError, adaptive_oracle, element_normal,
                                error_estimates, integrate_hypersingular, integrate_moment,
                                integrate_quasisingular, integrate_regular, integrate_singular,
                                kernel_counter, select_regular_order)

TIGHT = QuadratureConfig(tolerance=1e-8, high_accuracy=True)


def _groups(acc):
    return acc[0:1], acc[1:2], acc[2:5], acc[5:8]


def _group_error(a, b):
    return max(np.linalg.norm(x - y) / np.linalg.norm(y) for x, y in zip(_groups(a), _groups(b)))


@st.composite
def shaped_element(draw):
    """Shape-regular triangle or planar quad, randomly placed and rotated."""
    nv = draw(st.sampled_from([3, 4]))
    base = (np.array([[0, 0, 0], [1, 0, 0], [0.5, 0.87, 0]]) if nv == 3
            else np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0.0]]))
    jitter = draw(st.lists(st.floats(-0.15, 0.15), min_size=2 * nv, max_size=2 * nv))
    base = base + np.c_[np.reshape(jitter, (nv, 2)), np.zeros(nv)]
    size = draw(st.floats(0.05, 0.5))
    seed = draw(st.integers(0, 2**31))
    R = Rotation.random(random_state=seed).as_matrix()
    shift = np.array(draw(st.lists(st.floats(-1, 1), min_size=3, max_size=3)))
    return (size * base) @ R.T + shift


def _oracle_raw(v, x, k, levels=6):
    """[G, H, grad G, grad H] from the refinement oracle, one axis at a time."""
    axes = [adaptive_oracle(v, x, k, n_x=e, levels=levels) for e in np.eye(3)]
    return np.array([axes[0].G, axes[0].H, *(a.Hp for a in axes), *(a.E for a in axes)])


@settings(max_examples=30, deadline=None)
@given(v=shaped_element(), height=st.floats(0.05, 3.0), offs=st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
       kd=st.floats(0.1, 1.5))
def test_quasisingular_matches_adaptive_oracle(v, height, offs, kd):
    n = element_normal(v)
    diam = np.max(np.linalg.norm(v[:, None] - v[None], axis=-1))
    offs = np.asarray(offs) - (np.asarray(offs) @ n) * n  # tangential, so the height is exact
    x = v.mean(0) + height * diam * n + diam * offs
    k = kd / diam
    got = integrate_quasisingular(v, x, k, TIGHT, raw=True)
    assert _group_error(got, _oracle_raw(v, x, k)) <= 1e-5


def test_oracle_is_self_converged():
    v = np.array([[0, 0, 0], [0.2, 0, 0], [0.1, 0.17, 0.0]])
    x = np.array([0.1, 0.05, 0.03])
    a = adaptive_oracle(v, x, 4.0, levels=6)
    b = adaptive_oracle(v, x, 4.0, levels=7)
    assert max(abs(p - q) / abs(q) for p, q in zip(a, b)) <= 1e-12


def test_default_quadrature_meets_its_tolerance_far_away():
    v = np.array([[0, 0, 0], [0.1, 0, 0], [0.05, 0.087, 0.0]])
    x = np.array([0.3, 0.2, 0.25])
    got = integrate_quasisingular(v, x, 3.0)
    ref = adaptive_oracle(v, x, 3.0, levels=5)
    assert abs(got.G - ref.G) <= 1e-3 * abs(ref.G)


@settings(max_examples=60, deadline=None)
@given(rt=st.floats(1.3, 1e4), m=st.integers(1, 6))
def test_order_selection_is_monotone_and_consistent(rt, m):
    cfg = QuadratureConfig()
    sel = select_regular_order(rt, cfg, capped=False)
    assert select_regular_order(rt * 1.5, cfg, capped=False) <= sel
    assert select_regular_order(rt, cfg) == min(sel, cfg.m_max)
    if sel <= 30:
        assert max(error_estimates(rt, sel)) < cfg.tolerance
    if sel > 1:
        assert max(error_estimates(rt, sel - 1)) >= cfg.tolerance * (1 - 1e-12)


def _polar(verts, f):
    """Angular integral around the centroid of a flat element; f(R) is the
    closed-form radial integral up to the edge distance R."""
    v = np.asarray(verts, float)
    c = v.mean(0)
    out = 0j
    for a in range(len(v)):
        p, q = v[a], v[(a + 1) % len(v)]
        t = (q - p) / np.linalg.norm(q - p)
        foot = p + np.dot(c - p, t) * t
        d = np.linalg.norm(c - foot)
        th0, th1 = np.arctan2(np.dot(p - foot, t), d), np.arctan2(np.dot(q - foot, t), d)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            for part in (np.real, np.imag):
                val = quad(lambda th: part(f(d / np.cos(th))), th0, th1, epsabs=1e-15, epsrel=1e-13,
                           limit=400)[0]
                out += val if part is np.real else 1j * val
    return out


ELEMENTS = [np.array([[0, 0, 0], [1, 0, 0], [0.3, 0.8, 0]]),
            np.array([[0, 0, 0], [0.7, 0, 0], [0.8, 0.5, 0], [-0.1, 0.6, 0.0]])]


@pytest.mark.parametrize("verts", ELEMENTS)
@pytest.mark.parametrize("k", [1e-6, 1.0, 5.0])
def test_singular_and_hypersingular_against_polar_reference(verts, k):
    g_ref = _polar(verts, lambda R: (np.exp(1j * k * R) - 1) / (4j * np.pi * k))
    e_ref = _polar(verts, lambda R: (1j * k - np.exp(1j * k * R) / R) / (4 * np.pi))
    g, h, hp = integrate_singular(verts, k)
    assert h == 0 and hp == 0
    assert abs(g - g_ref) <= 5e-5 * abs(g_ref)
    assert abs(integrate_hypersingular(verts, k) - e_ref) <= 2e-4 * abs(e_ref)
    fine = QuadratureConfig(singular_order=12, edge_parts=16, edge_order=5)
    assert abs(integrate_singular(verts, k, fine)[0] - g_ref) <= 1e-11 * abs(g_ref)
    assert abs(integrate_hypersingular(verts, k, fine) - e_ref) <= 1e-11 * abs(e_ref)


def test_regular_rule_converges_with_order():
    v = ELEMENTS[0] * 0.2
    x = np.array([0.5, 0.4, 0.6])
    ref = adaptive_oracle(v, x, 2.0, levels=4)
    errs = [abs(integrate_regular(v, x, 2.0, m).G - ref.G) for m in range(1, 7)]
    assert errs[-1] < 1e-9 * abs(ref.G) and errs[-1] < errs[0]


def test_moment_is_additive_under_subdivision():
    from helmbem.quadrature import _split
    v = ELEMENTS[1] * 0.1
    z = np.array([1.0, 2.0, 0.5])
    s = np.array([[0.0, 0.6, 0.8], [1.0, 0.0, 0.0]])
    whole = integrate_moment(v, z, s, 3.0)
    parts = sum(integrate_moment(q, z, s, 3.0) for q in _split(v))
    assert np.max(np.abs(whole - parts)) <= 1e-14


def test_moment_of_tiny_triangle_is_area_times_phase():
    v = ELEMENTS[0] * 1e-4
    z = np.array([1.0, 2.0, 0.5])
    s = np.array([[0.0, 0.6, 0.8]])
    area = 0.5 * np.linalg.norm(np.cross(v[1] - v[0], v[2] - v[0]))
    ref = area * np.exp(1j * 3.0 * np.dot(z - v.mean(0), s[0]))
    assert abs(integrate_moment(v, z, s, 3.0) - ref) <= 1e-8 * area


def test_subdivision_depth_limit_raises():
    v = ELEMENTS[0]
    x = np.array([0.3, 0.3, 1e-9])
    with pytest.raises(QuadratureError):
        integrate_quasisingular(v, x, 1.0, QuadratureConfig(max_depth=2), element_id=7)


def test_work_counter_counts_calls():
    kernel_counter.reset()
    integrate_regular(ELEMENTS[0], [0, 0, 3.0], 1.0, 3)
    integrate_singular(ELEMENTS[0], 1.0)
    assert kernel_counter.count == 2
