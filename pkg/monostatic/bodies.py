# monostatic/bodies.py
"""Canonical validation bodies with known equilibrium counts."""
import math
from enum import Enum

import numpy as np

from .surfaces import Family, SurfaceSpec, TriMesh, generate_mesh, latlong_triangles


class BodyKind(str, Enum):
    SPHERE = "sphere"
    CUBE = "cube"
    CYLINDER = "cylinder"
    CAPSULE = "capsule"


CUBE_VERTICES = 0.5 * np.array([
    [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
    [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
], dtype=np.float64)

CUBE_TRIANGLES = np.array([
    [0, 3, 2], [0, 2, 1],      # z = -1/2
    [4, 5, 6], [4, 6, 7],      # z = +1/2
    [0, 1, 5], [0, 5, 4],      # y = -1/2
    [3, 7, 6], [3, 6, 2],      # y = +1/2
    [0, 4, 7], [0, 7, 3],      # x = -1/2
    [1, 2, 6], [1, 6, 5],      # x = +1/2
], dtype=np.int64)


def revolution_mesh(rho: np.ndarray, z: np.ndarray, z_top: float, z_bottom: float,
                    n_seg: int, label: str) -> TriMesh:
    """Surface of revolution from a top-down profile (rho_i, z_i) closed by two apexes."""
    phi = 2.0 * math.pi * np.arange(n_seg) / n_seg
    rings = np.stack([
        rho[:, None] * np.cos(phi)[None, :],
        rho[:, None] * np.sin(phi)[None, :],
        np.broadcast_to(z[:, None], (len(z), n_seg)),
    ], axis=-1).reshape(-1, 3)
    vertices = np.concatenate([[[0.0, 0.0, z_top]], rings, [[0.0, 0.0, z_bottom]]])
    return TriMesh(vertices, latlong_triangles(len(rho), n_seg), label)


def cube() -> TriMesh:
    return TriMesh(CUBE_VERTICES.copy(), CUBE_TRIANGLES.copy(), "cube")


def cylinder(resolution: int, radius: float = 0.5, height: float = 1.0) -> TriMesh:
    h = 0.5 * height
    rho = np.array([radius, radius])
    z = np.array([h, -h])
    return revolution_mesh(rho, z, h, -h, 4 * resolution, "cylinder")


def capsule(resolution: int, radius: float = 0.5, height: float = 2.0) -> TriMesh:
    half_body = 0.5 * height - radius
    m = resolution
    t = 0.5 * math.pi * np.arange(1, m + 1) / m          # pole -> equator, equator included
    top_rho = radius * np.sin(t)
    top_z = half_body + radius * np.cos(t)
    rho = np.concatenate([top_rho, top_rho[::-1]])
    z = np.concatenate([top_z, -top_z[::-1]])
    return revolution_mesh(rho, z, 0.5 * height, -0.5 * height, 4 * resolution, "capsule")


def canonical_body(kind, resolution: int = 32) -> TriMesh:
    kind = BodyKind(kind)
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    if kind is BodyKind.SPHERE:
        mesh = generate_mesh(SurfaceSpec(Family.SLOAN_ETA, 0.0), resolution, 2 * resolution)
        mesh.label = "sphere"
        return mesh
    if kind is BodyKind.CUBE:
        return cube()
    if kind is BodyKind.CYLINDER:
        return cylinder(resolution)
    return capsule(resolution)
