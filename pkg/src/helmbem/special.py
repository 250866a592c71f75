"""Special functions: spherical Bessel/Hankel sequences, Legendre
polynomials, Gauss rules on the interval, triangle rules and the unit
sphere grid used by the multipole expansion."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def spherical_hankel1_seq(order: int, x: float) -> np.ndarray:
    """Return h_n^(1)(x) for n = 0..order.

    j_n comes from a downward (Miller) recurrence normalised by j_0,
    y_n from the upward recurrence, which is stable for y_n.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"spherical Hankel needs x > 0, got {x}")
    L = int(order)
    j, y = _bessel_pair(L, x)
    return j + 1j * y


def spherical_jy_seq(order: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    """(j_n(x), y_n(x)) for n = 0..order, same recurrences as the Hankel."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"spherical Bessel needs x > 0, got {x}")
    return _bessel_pair(int(order), x)


def _bessel_pair(L, x):
    s, c = np.sin(x), np.cos(x)
    y = np.empty(L + 1)
    y[0] = -c / x
    if L >= 1:
        y[1] = -c / x**2 - s / x
    for n in range(1, L):
        y[n + 1] = (2 * n + 1) / x * y[n] - y[n - 1]

    # start high enough that the neglected tail is far below double precision
    start = L + 20 + int(x) + int(4.0 * np.sqrt(L + x + 1.0))
    f_next, f = 0.0, 1e-300
    j = np.empty(L + 1)
    for n in range(start, 0, -1):
        f_prev = (2 * n + 1) / x * f - f_next
        f_next, f = f, f_prev
        if n - 1 <= L:
            j[n - 1] = f
        if abs(f) > 1e250:
            # rescale to avoid overflow, including stored entries
            f_next *= 1e-250
            f *= 1e-250
            lo = n - 1
            if lo <= L:
                j[lo:] *= 1e-250
    j0 = s / x
    if x < 1.0 or L == 0:
        # j_0 is close to 1 here and well conditioned
        j *= j0 / j[0]
        return j, y
    # least-squares fit to the closed forms of j_0 and j_1; they never vanish
    # together, so this stays well conditioned near zeros of either one
    j1 = s / x**2 - c / x
    j /= max(abs(j[0]), abs(j[1]))
    j *= (j0 * j[0] + j1 * j[1]) / (j[0] ** 2 + j[1] ** 2)
    j[0], j[1] = j0, j1
    return j, y


def legendre_seq(order: int, t: float) -> np.ndarray:
    """P_n(t) for n = 0..order via the three-term recurrence."""
    t = float(t)
    if abs(t) > 1.0 + 1e-12:
        raise ValueError(f"Legendre argument outside [-1, 1]: {t}")
    t = min(1.0, max(-1.0, t))
    p = np.empty(order + 1)
    p[0] = 1.0
    if order >= 1:
        p[1] = t
    for n in range(1, order):
        p[n + 1] = ((2 * n + 1) * t * p[n] - n * p[n - 1]) / (n + 1)
    return p


def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], 1 <= m <= 64."""
    if not 1 <= m <= 64:
        raise ValueError(f"Gauss order must be in [1, 64], got {m}")
    return np.polynomial.legendre.leggauss(m)


# Symmetric triangle rules in barycentric coordinates.  Each entry is a list
# of (orbit, weight) with orbits "c" (centroid), ("s3", a) -> (1-2a, a, a)
# and ("s6", a, b) -> permutations of (a, b, 1-a-b).  Weights are relative
# to the triangle area (they sum to 1).
_TRI_ORBITS = {
    1: [(("c",), 1.0)],
    2: [(("s3", 1.0 / 6.0), 1.0 / 3.0)],
    3: [(("s6", 0.109039009072877, 0.231933368553031), 1.0 / 6.0)],
    4: [
        (("s3", 0.44594849091596483), 0.22338158967801133),
        (("s3", 0.09157621350977078), 0.10995174365532200),
    ],
    5: [
        (("c",), 0.225),
        (("s3", 0.47014206410511467), 0.13239415278850705),
        (("s3", 0.10128650732345630), 0.12593918054482708),
    ],
    6: [
        (("s3", 0.24928674517088192), 0.11678627572642794),
        (("s3", 0.06308901449150837), 0.05084490637021538),
        (("s6", 0.05314504984479652, 0.3103524510338062), 0.082851075618345),
    ],
}


@lru_cache(maxsize=None)
def _triangle_rule(m):
    pts, wts = [], []
    for orbit, w in _TRI_ORBITS[m]:
        if orbit[0] == "c":
            cand = [(1 / 3, 1 / 3, 1 / 3)]
        elif orbit[0] == "s3":
            a = orbit[1]
            cand = [(1 - 2 * a, a, a), (a, 1 - 2 * a, a), (a, a, 1 - 2 * a)]
        else:
            a, b = orbit[1], orbit[2]
            c = 1 - a - b
            cand = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
        pts.extend(cand)
        wts.extend([w] * len(cand))
    bary = np.array(pts)
    w = np.array(wts)
    # the stored weights are rounded to ~1e-16; renormalise exactly
    w = w / w.sum()
    bary.setflags(write=False)
    w.setflags(write=False)
    return bary, w


def triangle_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes (n, 3) and weights for a rule exact to degree m.

    Weights sum to 0.5, the area of the reference triangle
    (0,0), (1,0), (0,1); multiply by 2*area for a physical triangle.
    """
    if not 1 <= m <= 6:
        raise ValueError(f"triangle rule order must be in [1, 6], got {m}")
    bary, w = _triangle_rule(m)
    return bary.copy(), 0.5 * w


def triangle_rule_table(m_max: int = 6):
    """Pack rules 1..m_max into flat arrays for compiled code.

    Returns (offsets, bary, weights) where rule m occupies
    rows offsets[m-1]:offsets[m] and weights sum to 1 per rule.
    """
    offs = [0]
    bs, ws = [], []
    for m in range(1, m_max + 1):
        b, w = _triangle_rule(m)
        bs.append(b)
        ws.append(w)
        offs.append(offs[-1] + len(w))
    return np.array(offs, dtype=np.int64), np.vstack(bs), np.concatenate(ws)


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature on the unit sphere: L Gauss nodes in cos(theta) times
    2L equispaced azimuths."""

    L: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)


@lru_cache(maxsize=64)
def _sphere_grid(L):
    t, wt = np.polynomial.legendre.leggauss(L)
    phi = np.arange(2 * L) * (np.pi / L)
    st = np.sqrt(1.0 - t**2)
    T, P = np.meshgrid(t, phi, indexing="ij")
    S, _ = np.meshgrid(st, phi, indexing="ij")
    nodes = np.stack([S * np.cos(P), S * np.sin(P), T], axis=-1).reshape(-1, 3)
    weights = np.repeat(wt * (np.pi / L), 2 * L)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereGrid(L, nodes, weights)


def sphere_grid(L: int) -> SphereGrid:
    if L < 1:
        raise ValueError(f"sphere grid needs L >= 1, got {L}")
    return _sphere_grid(int(L))
