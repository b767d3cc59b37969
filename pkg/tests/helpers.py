import numpy as np

from monostatic.surfaces import Family, SurfaceSpec, TriMesh, generate_mesh


def egg_mesh(n_theta: int = 100, n_phi: int = 200, top: float = 0.3, bottom: float = 0.5) -> TriMesh:
    """Two half-spheroids glued at the equator: two stable poles at different heights."""
    sphere = generate_mesh(SurfaceSpec(Family.SLOAN_ETA, 0.0), n_theta, n_phi)
    v = sphere.vertices.copy()
    v[:, 2] = np.where(v[:, 2] > 0, top * v[:, 2], bottom * v[:, 2])
    return TriMesh(v, sphere.triangles, "egg")
