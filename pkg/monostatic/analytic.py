# monostatic/analytic.py
"""Mesh-free oracle: support points by multi-start search on the analytic
surface, and volume/COM by quadrature of the star-body moment integrals."""
import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.special import j1

from .geometry import MassProperties
from .oracle import DirectionSet, HeightField
from .settings import ANALYTIC_STARTS
from .surfaces import Family, SurfaceSpec, check_admissible, radius, ring_phis, ring_thetas, surface_point, unit_direction

log = logging.getLogger("analytic")

QUADRATURE_ORDER = (64, 128)
MIN_STARTS = 8
GOLDEN_STEP = 1e-3
NM_OPTIONS = {"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400}


# -----------------------------------------------------------------------------
# Moments
# -----------------------------------------------------------------------------
def analytic_com(spec: SurfaceSpec, quadrature_order: Tuple[int, int] = QUADRATURE_ORDER) -> MassProperties:
    """V = (1/3) int r^3 dOmega and com = (1/4V) int r^4 rhat dOmega.

    Gauss-Legendre in cos(theta) times the trapezoid rule in phi.
    """
    n_x, n_phi = quadrature_order
    x, w = np.polynomial.legendre.leggauss(n_x)
    theta = np.arccos(x)[:, None]
    phi = ring_phis(n_phi)[None, :]
    weights = w[:, None] * (2.0 * math.pi / n_phi)

    r = np.asarray(radius(spec, theta, phi))
    volume = float((weights * r ** 3).sum() / 3.0)
    moment = ((weights * r ** 4)[..., None] * unit_direction(theta, phi)).sum(axis=(0, 1))
    return MassProperties(volume, moment / (4.0 * volume))


@lru_cache(maxsize=256)
def _cached_com(spec: SurfaceSpec) -> Tuple[float, Tuple[float, float, float]]:
    mp = analytic_com(spec)
    return mp.volume, tuple(float(c) for c in mp.com)


def is_centered_family(spec: SurfaceSpec) -> bool:
    """Every family except the harmonic-1 phase extension has its COM at the origin."""
    return not (spec.family is Family.EXTENDED_PHASE and spec.harmonic == 1 and spec.coeff != 0.0)


def phase_com_closed_form(beta: float, coeff: float, volume: float) -> float:
    """x-coordinate of the COM for the harmonic-1 phase family; y and z vanish."""
    return -(4.0 * math.pi / 3.0) * beta * float(j1(coeff)) / volume


def com_offset(spec: SurfaceSpec) -> float:
    """Distance of the analytic COM from the origin (the COM-constraint violation)."""
    if is_centered_family(spec):
        return 0.0
    return abs(phase_com_closed_form(spec.beta, spec.coeff, _cached_com(spec)[0]))


# -----------------------------------------------------------------------------
# Support points
# -----------------------------------------------------------------------------
def _wrap(theta: float, phi: float) -> Tuple[float, float]:
    """Fold an unconstrained (theta, phi) back onto theta in [0, pi]."""
    t = math.fmod(theta, 2.0 * math.pi)
    if t < 0:
        t += 2.0 * math.pi
    if t > math.pi:
        t = 2.0 * math.pi - t
        phi += math.pi
    return t, phi


def _support_value(spec: SurfaceSpec, d: np.ndarray, theta: float, phi: float) -> float:
    t, p = _wrap(theta, phi)
    return float(surface_point(spec, t, p) @ d)


def _coarse_grid(spec: SurfaceSpec, n_starts: int):
    m = max(8, math.ceil(math.sqrt(n_starts)))
    t = ring_thetas(m)
    p = ring_phis(m)
    tt, pp = np.meshgrid(t, p, indexing="ij")
    points = surface_point(spec, tt, pp).reshape(-1, 3)
    return np.stack([tt.ravel(), pp.ravel()], axis=1), points


def support_minimum(spec: SurfaceSpec, d, n_starts: int = ANALYTIC_STARTS, _grid=None) -> float:
    """min over the surface of v . d."""
    if n_starts < MIN_STARTS:
        raise ValueError(f"n_starts must be >= {MIN_STARTS}")
    d = np.asarray(d, dtype=np.float64)
    nodes, points = _coarse_grid(spec, n_starts) if _grid is None else _grid
    g = points @ d
    starts = nodes[np.argsort(g, kind="stable")[:n_starts]]
    best = float(g.min())

    f = lambda x: _support_value(spec, d, x[0], x[1])
    for x0 in starts:
        res = minimize(f, x0, method="Nelder-Mead", options=NM_OPTIONS)
        x = np.array(res.x, dtype=np.float64)
        fx = float(res.fun)
        # coordinate-wise golden-section polish
        for axis in (0, 1):
            def along(s, axis=axis, x=x):
                y = x.copy()
                y[axis] = s
                return f(y)
            try:
                line = minimize_scalar(along, bracket=(x[axis] - GOLDEN_STEP, x[axis] + GOLDEN_STEP),
                                       method="golden")
            except (ValueError, RuntimeError):
                continue
            if line.fun < fx:
                x[axis] = line.x
                fx = float(line.fun)
        best = min(best, fx)
    return best


def analytic_height(spec: SurfaceSpec, d, n_starts: int = ANALYTIC_STARTS,
                    com: Optional[np.ndarray] = None) -> float:
    """h(d) = c . d - min_v v . d on the exact surface."""
    check_admissible(spec)
    d = np.asarray(d, dtype=np.float64)
    c = np.asarray(_cached_com(spec)[1] if com is None else com, dtype=np.float64)
    return float(c @ d) - support_minimum(spec, d, n_starts)


def analytic_height_field(spec: SurfaceSpec, dirs: DirectionSet,
                          n_starts: int = ANALYTIC_STARTS) -> HeightField:
    check_admissible(spec)
    c = np.asarray(_cached_com(spec)[1])
    grid = _coarse_grid(spec, n_starts)
    log.info(f"analytic height field {spec.summary()}: {dirs.n} directions, {n_starts} starts each")
    support = np.array([support_minimum(spec, d, n_starts, grid) for d in dirs.directions])
    return HeightField(dirs, dirs.directions @ c - support, c)
