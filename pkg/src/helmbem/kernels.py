"""Helmholtz Green's function e^{ikr}/(4 pi r), its normal derivatives and
incident fields.  Functions accept a single point ``y`` or an array of
points with shape (..., 3)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SINGULAR_RADIUS = 1e-14


class SingularityError(ValueError):
    """Kernel evaluated (numerically) at its singularity."""


@dataclass(frozen=True)
class WaveContext:
    frequency: float
    c: float = 340.0
    rho: float = 1.3
    tau: int = 1

    def __post_init__(self):
        if self.frequency <= 0 or self.c <= 0 or self.rho <= 0:
            raise ValueError("frequency, c and rho must be positive")
        if self.tau not in (1, -1):
            raise ValueError("tau must be +1 (exterior) or -1 (interior)")

    @property
    def omega(self) -> float:
        return 2.0 * np.pi * self.frequency

    @property
    def k(self) -> float:
        return self.omega / self.c

    @property
    def gamma(self) -> complex:
        return 1j / self.k

    @property
    def iwr(self) -> complex:
        """i*omega*rho, the factor turning potential into pressure."""
        return 1j * self.omega * self.rho


def _geometry(x, y):
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r < SINGULAR_RADIUS):
        raise SingularityError("kernel evaluated at coincident points")
    return d / r[..., None], r


def _g_derivs(r, k):
    g = np.exp(1j * k * r) / (4.0 * np.pi * r)
    g1 = g * (1j * k - 1.0 / r)
    g2 = g * (-(k**2) - 2j * k / r + 2.0 / r**2)
    return g, g1, g2


def green(x, y, k):
    _, r = _geometry(x, y)
    return np.exp(1j * k * r) / (4.0 * np.pi * r)


def green_dny(x, y, n_y, k):
    """H = dG/dn_y."""
    rh, r = _geometry(x, y)
    _, g1, _ = _g_derivs(r, k)
    return g1 * np.sum(rh * n_y, axis=-1)


def green_dnx(x, y, n_x, k):
    """H' = dG/dn_x."""
    rh, r = _geometry(x, y)
    _, g1, _ = _g_derivs(r, k)
    return -g1 * np.sum(rh * n_x, axis=-1)


def green_dnxdny(x, y, n_x, n_y, k):
    """E = d^2 G / (dn_x dn_y) in closed form."""
    rh, r = _geometry(x, y)
    g, _, _ = _g_derivs(r, k)
    rx = np.sum(rh * n_x, axis=-1)
    ry = np.sum(rh * n_y, axis=-1)
    nn = np.sum(np.asarray(n_x) * np.asarray(n_y), axis=-1)
    return g * ((1.0 / r**2 - 1j * k / r) * nn
                + (k**2 + 3j * k / r - 3.0 / r**2) * rx * ry)


@dataclass(frozen=True)
class PlaneWave:
    direction: np.ndarray
    strength: complex = 1.0
    curve_re: int = -1
    curve_im: int = -1

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        nrm = np.linalg.norm(d)
        if nrm == 0:
            raise ValueError("plane-wave direction must be nonzero")
        object.__setattr__(self, "direction", d / nrm)


@dataclass(frozen=True)
class PointSource:
    position: np.ndarray
    strength: complex = 1.0
    curve_re: int = -1
    curve_im: int = -1

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))


def incident_potential(source, x, k, strength=None):
    """Incident field S0*e^{ik x.d} (plane wave) or S0*G(x, x*) (point source)."""
    s0 = source.strength if strength is None else strength
    x = np.asarray(x, dtype=float)
    if isinstance(source, PlaneWave):
        return s0 * np.exp(1j * k * (x @ source.direction))
    _, r = _geometry(source.position, x)
    return s0 * np.exp(1j * k * r) / (4.0 * np.pi * r)


def incident_velocity(source, x, n, k, strength=None):
    """Normal derivative of :func:`incident_potential` along n."""
    s0 = source.strength if strength is None else strength
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    if isinstance(source, PlaneWave):
        d = source.direction
        return 1j * k * (n @ d) * s0 * np.exp(1j * k * (x @ d))
    rh, r = _geometry(source.position, x)
    _, g1, _ = _g_derivs(r, k)
    return s0 * g1 * np.sum(rh * n, axis=-1)
