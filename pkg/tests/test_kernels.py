import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmbem.kernels import (PlaneWave, PointSource, SingularityError, WaveContext, green, green_dnx,
                             green_dnxdny, green_dny, incident_potential, incident_velocity)

vec = st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3).map(np.array)


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 1e-3 else np.array([0.0, 0.0, 1.0])


def _mp_green(x, y, k):
    r = mp.sqrt(sum((mp.mpf(a) - mp.mpf(b)) ** 2 for a, b in zip(x, y)))
    return mp.exp(1j * k * r) / (4 * mp.pi * r)


def _mp_dir(f, p, n, h=mp.mpf("1e-12")):
    """Directional derivative of f at p along n (mpmath central difference)."""
    def g(t):
        return f([mp.mpf(a) + t * mp.mpf(b) for a, b in zip(p, n)])
    return mp.diff(g, 0)


@settings(max_examples=25, deadline=None)
@given(x=vec, y=vec, a=vec, b=vec, k=st.floats(0.1, 20.0))
def test_kernels_against_mpmath(x, y, a, b, k):
    if np.linalg.norm(x - y) < 0.05:
        return
    nx, ny = _unit(a), _unit(b)
    mp.mp.dps = 30
    G = complex(_mp_green(x, y, k))
    H = complex(_mp_dir(lambda yy: _mp_green(x, yy, k), y, ny))
    Hp = complex(_mp_dir(lambda xx: _mp_green(xx, y, k), x, nx))
    E = complex(_mp_dir(lambda xx: _mp_dir(lambda yy: _mp_green(xx, yy, k), y, ny), x, nx))
    scale = abs(G) * (1 + k) ** 2 / min(1.0, np.linalg.norm(x - y)) ** 2
    assert abs(green(x, y, k) - G) <= 1e-13 * abs(G)
    assert abs(green_dny(x, y, ny, k) - H) <= 1e-12 * scale
    assert abs(green_dnx(x, y, nx, k) - Hp) <= 1e-12 * scale
    assert abs(green_dnxdny(x, y, nx, ny, k) - E) <= 1e-11 * scale


def test_green_is_symmetric(rng):
    x, y = rng.normal(size=3), rng.normal(size=3)
    assert green(x, y, 2.0) == pytest.approx(green(y, x, 2.0), rel=1e-15)


def test_kernels_reject_coincident_points():
    x = np.zeros(3)
    with pytest.raises(SingularityError):
        green(x, x, 1.0)


def test_wave_context_values():
    w = WaveContext(170.0, 340.0, 1.3)
    assert w.k == pytest.approx(np.pi)
    assert w.gamma == pytest.approx(1j / np.pi)
    assert w.iwr == pytest.approx(1j * 2 * np.pi * 170 * 1.3)
    with pytest.raises(ValueError):
        WaveContext(100.0, tau=0)
    with pytest.raises(ValueError):
        WaveContext(-1.0)


@settings(max_examples=40, deadline=None)
@given(x=vec, d=vec, n=vec, k=st.floats(0.1, 10.0))
def test_incident_velocity_is_normal_derivative(x, d, n, k):
    n = _unit(n)
    h = 1e-6
    for src in (PlaneWave(_unit(d), 2.0 - 1.0j), PointSource(x + np.array([2.5, 0.0, 0.0]), 0.5j)):
        fd = (incident_potential(src, x + h * n, k) - incident_potential(src, x - h * n, k)) / (2 * h)
        assert abs(incident_velocity(src, x, n, k) - fd) <= 1e-6 * (1 + k) ** 2


def test_plane_wave_direction_normalised():
    pw = PlaneWave(np.array([0.0, 0.0, -3.0]))
    assert np.allclose(pw.direction, [0, 0, -1])
    with pytest.raises(ValueError):
        PlaneWave(np.zeros(3))
