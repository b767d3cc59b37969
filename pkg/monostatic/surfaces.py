# monostatic/surfaces.py
"""Analytic surface families and their closed triangle meshes.

Every family is a star body around the origin given by r^4(theta, phi):

    r^4 = 1 + 4 beta sin(theta) cos(phi - P(theta)) [+ eps f(theta, phi)]

with the phase profile P and the optional radial term f chosen by the family.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError, InadmissibleSpec, NonPositiveRadius

log = logging.getLogger("surfaces")

ANGLE_TOL = 1e-12
MIN_N_THETA = 8
MIN_N_PHI = 16
OVERSAMPLE = 4


class Family(str, Enum):
    SLOAN_LINEAR = "sloan-linear"
    SLOAN_ETA = "sloan-eta"
    EXTENDED_PHASE = "extended-phase"
    RADIAL_F3 = "radial-f3"
    RADIAL_F4 = "radial-f4"

    @property
    def is_radial(self) -> bool:
        return self in (Family.RADIAL_F3, Family.RADIAL_F4)

    @property
    def uses_coeff(self) -> bool:
        return self in (Family.EXTENDED_PHASE, Family.RADIAL_F3, Family.RADIAL_F4)


# Published upper bounds on beta; exceeding them only warns.
BETA_BOUNDS = {
    Family.SLOAN_LINEAR: 0.15,
    Family.SLOAN_ETA: 0.17,
}

FAMILY_ALIASES = {
    Family.SLOAN_LINEAR: {"gomboc1", "gomboc-1", "sloan1", "linear", "linear-phase", "5theta"},
    Family.SLOAN_ETA: {"gomboc2", "gomboc-2", "sloan2", "sloan", "eta", "eta-phase"},
    Family.EXTENDED_PHASE: {"phase", "extended", "fourier", "phase-sin", "sin-eta"},
    Family.RADIAL_F3: {"f3", "radial3", "f3-radial", "azimuthal"},
    Family.RADIAL_F4: {"f4", "radial4", "f4-radial", "polar-azimuthal"},
}


def parse_family(name: str) -> Family:
    key = (name or "").strip().lower().replace("_", "-").replace(" ", "-")
    for fam in Family:
        if key == fam.value or key in FAMILY_ALIASES[fam]:
            return fam
    raise InadmissibleSpec(f"unknown surface family {name!r}")


@dataclass(frozen=True)
class SurfaceSpec:
    family: Family
    beta: float
    coeff: float = 0.0
    harmonic: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", parse_family(self.family))
        if not (math.isfinite(self.beta) and math.isfinite(self.coeff)):
            raise InadmissibleSpec("beta and coeff must be finite")
        if self.beta < 0:
            raise InadmissibleSpec(f"beta must be >= 0, got {self.beta}")
        if self.family is Family.EXTENDED_PHASE and self.harmonic not in (1, 2, 3):
            raise InadmissibleSpec(f"harmonic must be 1, 2 or 3, got {self.harmonic}")
        bound = BETA_BOUNDS.get(self.family)
        if bound is not None and self.beta > bound:
            log.warning(f"beta={self.beta} exceeds the published bound {bound} for {self.family.value}")

    @property
    def is_sphere(self) -> bool:
        # phase coefficients only act through the beta term
        return self.beta == 0.0 and (self.coeff == 0.0 or not self.family.is_radial)

    def summary(self) -> str:
        s = f"{self.family.value} beta={self.beta:g}"
        if self.family.uses_coeff:
            s += f" coeff={self.coeff:g}"
        if self.family is Family.EXTENDED_PHASE:
            s += f" k={self.harmonic}"
        return s

    def as_dict(self) -> dict:
        return {
            "family": self.family.value,
            "beta": self.beta,
            "coeff": self.coeff,
            "harmonic": self.harmonic,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SurfaceSpec":
        return cls(parse_family(d["family"]), float(d["beta"]),
                   float(d.get("coeff", 0.0)), int(d.get("harmonic", 1)))


@dataclass
class TriMesh:
    vertices: np.ndarray                 # (V, 3) float64
    triangles: np.ndarray                # (F, 3) int64, outward winding
    label: str = field(default="")

    def __post_init__(self) -> None:
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def undirected_edges(self) -> np.ndarray:
        e = self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        return np.unique(np.sort(e, axis=1), axis=0)

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.undirected_edges()) + self.n_triangles

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)

    def transformed(self, rotation: Optional[np.ndarray] = None,
                    translation: Optional[np.ndarray] = None) -> "TriMesh":
        v = self.vertices
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            v = v + np.asarray(translation, dtype=np.float64)
        return TriMesh(v, self.triangles.copy(), self.label)


# -----------------------------------------------------------------------------
# Phase profiles and radius
# -----------------------------------------------------------------------------
def _check_polar(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=np.float64)
    if np.any(t < -ANGLE_TOL) or np.any(t > math.pi + ANGLE_TOL) or np.any(~np.isfinite(t)):
        raise DomainError("theta must lie in [0, pi]")
    return np.clip(t, 0.0, math.pi)


def eta(theta):
    """Sloan's phase profile (3 pi / 2)(cos t - cos^3 t / 3); odd about pi/2."""
    c = np.cos(_check_polar(theta))
    out = 1.5 * math.pi * (c - c ** 3 / 3.0)
    return float(out) if out.ndim == 0 else out


def phase(spec: SurfaceSpec, theta):
    fam = spec.family
    if fam is Family.SLOAN_LINEAR:
        out = 5.0 * _check_polar(theta)
        return float(out) if out.ndim == 0 else out
    e = np.asarray(eta(theta))
    if fam is Family.EXTENDED_PHASE:
        e = e + spec.coeff * np.sin(spec.harmonic * e)
    return float(e) if e.ndim == 0 else e


def r4(spec: SurfaceSpec, theta, phi) -> np.ndarray:
    """The family's r^4 expression, broadcast over theta and phi."""
    t = _check_polar(theta)
    p = np.asarray(phi, dtype=np.float64)
    s = np.sin(t)
    out = 1.0 + 4.0 * spec.beta * s * np.cos(p - phase(spec, t))
    if spec.family is Family.RADIAL_F3:
        out = out + spec.coeff * s * s * np.cos(2.0 * p)
    elif spec.family is Family.RADIAL_F4:
        out = out + spec.coeff * np.cos(t) * s * np.sin(p)
    return out


def radius(spec: SurfaceSpec, theta, phi):
    q = r4(spec, theta, phi)
    if np.any(q <= 0.0):
        raise NonPositiveRadius(f"r^4 <= 0 for {spec.summary()}")
    out = np.sqrt(np.sqrt(q))
    return float(out) if np.ndim(out) == 0 else out


def unit_direction(theta, phi) -> np.ndarray:
    t = np.asarray(theta, dtype=np.float64)
    p = np.asarray(phi, dtype=np.float64)
    s = np.sin(t)
    return np.stack([s * np.cos(p), s * np.sin(p), np.cos(t) * np.ones_like(p)], axis=-1)


def surface_point(spec: SurfaceSpec, theta, phi) -> np.ndarray:
    r = np.asarray(radius(spec, theta, phi))
    return r[..., None] * unit_direction(theta, phi)


# -----------------------------------------------------------------------------
# Meshing
# -----------------------------------------------------------------------------
def ring_thetas(n_theta: int) -> np.ndarray:
    return math.pi * (np.arange(n_theta) + 0.5) / n_theta


def ring_phis(n_phi: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n_phi) / n_phi


def latlong_triangles(n_rings: int, n_seg: int) -> np.ndarray:
    """Closed lat-long connectivity: apex 0, rings top-down, apex last.

    Ring vertex (i, j) is 1 + i * n_seg + j. Winding is outward when rings
    run top to bottom and segments run counter-clockwise seen from +z.
    """
    south = 1 + n_rings * n_seg
    j = np.arange(n_seg)
    jn = (j + 1) % n_seg

    north = np.stack([np.zeros(n_seg, dtype=np.int64), 1 + j, 1 + jn], axis=1)

    i = np.arange(n_rings - 1)[:, None]
    a = (1 + i * n_seg + j).ravel()
    b = (1 + i * n_seg + jn).ravel()
    c = a + n_seg
    d = b + n_seg
    band = np.concatenate([np.stack([a, c, b], axis=1), np.stack([b, c, d], axis=1)])

    last = 1 + (n_rings - 1) * n_seg
    southern = np.stack([np.full(n_seg, south, dtype=np.int64), last + jn, last + j], axis=1)
    return np.concatenate([north, band, southern]).astype(np.int64)


def check_admissible(spec: SurfaceSpec, n_theta: int = MIN_N_THETA, n_phi: int = MIN_N_PHI) -> float:
    """Minimum of r^4 over the generation grid and a 4x oversampled grid."""
    lo = math.inf
    for nt, nphi in ((n_theta, n_phi), (OVERSAMPLE * n_theta, OVERSAMPLE * n_phi)):
        t = np.concatenate([[0.0], ring_thetas(nt), [math.pi]])
        q = r4(spec, t[:, None], ring_phis(nphi)[None, :])
        lo = min(lo, float(q.min()))
    if lo <= 0.0:
        raise NonPositiveRadius(f"r^4 reaches {lo:.3g} for {spec.summary()}")
    return lo


def generate_mesh(spec: SurfaceSpec, n_theta: int = 100, n_phi: int = 200) -> TriMesh:
    if n_theta < MIN_N_THETA or n_phi < MIN_N_PHI:
        raise ValueError(f"mesh resolution must be at least {MIN_N_THETA}x{MIN_N_PHI}")
    check_admissible(spec, n_theta, n_phi)

    t = ring_thetas(n_theta)[:, None]
    p = ring_phis(n_phi)[None, :]
    rings = surface_point(spec, t, p).reshape(-1, 3)
    north = surface_point(spec, 0.0, 0.0).reshape(1, 3)
    south = surface_point(spec, math.pi, 0.0).reshape(1, 3)
    vertices = np.concatenate([north, rings, south])
    mesh = TriMesh(vertices, latlong_triangles(n_theta, n_phi), spec.summary())
    log.debug(f"mesh {spec.summary()} {n_theta}x{n_phi}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles")
    return mesh
