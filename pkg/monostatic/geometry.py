# monostatic/geometry.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.transform import Rotation

from .errors import DegenerateInput, NegativeVolume, OpenMesh
from .surfaces import TriMesh

log = logging.getLogger("geometry")

CONVEX_RATIO = 0.999
HULL_EPS = 1e-10
DEGENERATE_AREA = 1e-12


@dataclass(frozen=True)
class MassProperties:
    volume: float
    com: np.ndarray

    def as_dict(self) -> dict:
        return {"volume": self.volume, "com": [float(c) for c in self.com]}


def _directed_edges(mesh: TriMesh):
    t = mesh.triangles
    src = t[:, [0, 1, 2]].ravel()
    dst = t[:, [1, 2, 0]].ravel()
    opp = t[:, [2, 0, 1]].ravel()
    return src, dst, opp


def is_closed_manifold(mesh: TriMesh) -> bool:
    """Every edge shared by exactly two triangles that traverse it in opposite directions."""
    if mesh.n_triangles == 0:
        return False
    src, dst, _ = _directed_edges(mesh)
    directed = np.stack([src, dst], axis=1)
    if len(np.unique(directed, axis=0)) != len(directed):
        return False
    _, counts = np.unique(np.sort(directed, axis=1), axis=0, return_counts=True)
    return bool(np.all(counts == 2))


def degenerate_triangle_count(mesh: TriMesh, tol: float = DEGENERATE_AREA) -> int:
    return int(np.count_nonzero(mesh.triangle_areas() < tol))


def mass_properties(mesh: TriMesh, reference: Optional[np.ndarray] = None,
                    check: bool = True) -> MassProperties:
    """Volume and centre of mass of a homogeneous closed mesh.

    Signed tetrahedra (reference, v0, v1, v2) summed over all triangles; the
    reference defaults to the vertex centroid, and the result does not depend
    on it for a closed mesh.
    """
    if check and not is_closed_manifold(mesh):
        raise OpenMesh(f"mesh {mesh.label!r} is not a closed consistently oriented 2-manifold")
    ref = mesh.vertices.mean(axis=0) if reference is None else np.asarray(reference, dtype=np.float64)
    p = mesh.vertices[mesh.triangles] - ref
    vols = np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])) / 6.0
    volume = float(vols.sum())
    if volume <= 0.0:
        raise NegativeVolume(f"enclosed volume {volume:.3g} <= 0 for mesh {mesh.label!r}")
    centroids = p.sum(axis=1) / 4.0
    com = ref + (vols[:, None] * centroids).sum(axis=0) / volume
    return MassProperties(volume, com)


def convex_hull(points) -> TriMesh:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) < 4:
        raise DegenerateInput("a 3-D hull needs at least 4 points")
    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    if sv[0] == 0.0 or sv[2] <= HULL_EPS * sv[0]:
        raise DegenerateInput("points are coplanar or collinear")
    try:
        hull = ConvexHull(pts)
    except Exception as e:
        raise DegenerateInput(f"qhull failed: {e}") from e

    simplices = hull.simplices.copy()
    q = pts[simplices]
    normals = np.cross(q[:, 1] - q[:, 0], q[:, 2] - q[:, 0])
    flip = np.einsum("ij,ij->i", normals, hull.equations[:, :3]) < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]

    used = np.sort(hull.vertices)
    return TriMesh(pts[used], np.searchsorted(used, simplices), "hull")


def reflex_edge_count(mesh: TriMesh, tol: Optional[float] = None) -> int:
    """Edges whose neighbouring face bends outward past the face plane."""
    v = mesh.vertices
    if tol is None:
        tol = 1e-9 * float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))
    src, dst, opp = _directed_edges(mesh)
    n = np.int64(mesh.n_vertices)
    key = src * n + dst
    twin_key = dst * n + src
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    pos = np.clip(np.searchsorted(sorted_key, twin_key), 0, len(key) - 1)
    has_twin = sorted_key[pos] == twin_key
    twin = order[pos]

    face = np.repeat(np.arange(mesh.n_triangles), 3)
    p = v[mesh.triangles]
    fn = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    norm = np.linalg.norm(fn, axis=1)
    fn = fn / np.where(norm > 0, norm, 1.0)[:, None]

    far = v[opp[twin]] - v[src]
    dist = np.einsum("ij,ij->i", fn[face], far)
    return int(np.count_nonzero(has_twin & (dist > tol)) // 2)


def convexity_ratio(mesh: TriMesh, prefilter: bool = True) -> float:
    """mesh volume / hull volume; the body counts as convex above 0.999.

    With ``prefilter`` a mesh without reflex edges is its own hull and the
    qhull pass is skipped.
    """
    volume = mass_properties(mesh).volume
    if prefilter and reflex_edge_count(mesh) == 0:
        log.debug(f"{mesh.label!r}: no reflex edges, skipping hull")
        return 1.0
    hull_volume = mass_properties(convex_hull(mesh.vertices), check=False).volume
    return volume / hull_volume


def is_convex(ratio: float) -> bool:
    return ratio > CONVEX_RATIO


def asymmetry(mesh: TriMesh, com: Optional[np.ndarray] = None) -> float:
    """Coefficient of variation of vertex distances from the centre of mass."""
    c = mass_properties(mesh).com if com is None else np.asarray(com, dtype=np.float64)
    d = np.linalg.norm(mesh.vertices - c, axis=1)
    return float(d.std() / d.mean())


def random_rotation(seed: int) -> np.ndarray:
    return Rotation.random(random_state=seed).as_matrix()
