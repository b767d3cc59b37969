# monostatic/stl_io.py
"""Binary STL: 80-byte header, uint32 count, 50 bytes per facet."""
import logging
import os
from typing import Optional

import numpy as np

from . import TOOL_NAME, __version__
from .errors import MalformedSTL
from .surfaces import TriMesh

log = logging.getLogger("stl_io")

HEADER_BYTES = 80
COUNT_BYTES = 4
FACET_DTYPE = np.dtype([
    ("normal", "<f4", (3,)),
    ("vertices", "<f4", (3, 3)),
    ("attr", "<u2"),
])


def header_for(label: str) -> bytes:
    text = f"{TOOL_NAME} {__version__} {label}".encode("ascii", "replace")[:HEADER_BYTES]
    return text.ljust(HEADER_BYTES, b"\0")


def _label_from_header(header: bytes) -> Optional[str]:
    text = header.rstrip(b"\0").decode("ascii", "replace")
    parts = text.split(" ", 2)
    if len(parts) == 3 and parts[0] == TOOL_NAME:
        return parts[2]
    return None


def facet_normals(corners: np.ndarray) -> np.ndarray:
    """Unit normals from winding; zero for degenerate facets."""
    c = corners.astype(np.float64)
    n = np.cross(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])
    norm = np.linalg.norm(n, axis=1)
    return (n / np.where(norm > 0, norm, 1.0)[:, None]).astype(np.float32)


def stl_bytes(mesh: TriMesh, label: Optional[str] = None) -> bytes:
    corners = mesh.vertices.astype(np.float32)[mesh.triangles]
    facets = np.zeros(mesh.n_triangles, dtype=FACET_DTYPE)
    facets["vertices"] = corners
    facets["normal"] = facet_normals(corners)
    count = np.array([mesh.n_triangles], dtype="<u4").tobytes()
    return header_for(mesh.label if label is None else label) + count + facets.tobytes()


def write_stl(mesh: TriMesh, path: str, label: Optional[str] = None) -> str:
    data = stl_bytes(mesh, label)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    log.info(f"wrote {path} ({mesh.n_triangles} triangles, {len(data)} bytes)")
    return path


def parse_stl(data: bytes, name: str = "") -> TriMesh:
    if len(data) < HEADER_BYTES + COUNT_BYTES:
        raise MalformedSTL(f"{name or 'stl'}: {len(data)} bytes is shorter than the 84-byte header")
    count = int(np.frombuffer(data, dtype="<u4", count=1, offset=HEADER_BYTES)[0])
    expected = HEADER_BYTES + COUNT_BYTES + count * FACET_DTYPE.itemsize
    if len(data) != expected:
        raise MalformedSTL(f"{name or 'stl'}: header declares {count} facets ({expected} bytes), "
                           f"file has {len(data)} bytes")
    facets = np.frombuffer(data, dtype=FACET_DTYPE, count=count, offset=HEADER_BYTES + COUNT_BYTES)
    corners = np.ascontiguousarray(facets["vertices"]).reshape(-1, 3)

    # shared vertices are identified by their exact float32 bit pattern
    keys = corners.view(np.uint32)
    unique, inverse = np.unique(keys, axis=0, return_inverse=True)
    vertices = np.ascontiguousarray(unique).view(np.float32).astype(np.float64)
    label = _label_from_header(data[:HEADER_BYTES]) or name
    return TriMesh(vertices, inverse.reshape(-1).reshape(-1, 3), label)


def read_stl(path: str) -> TriMesh:
    with open(path, "rb") as f:
        data = f.read()
    mesh = parse_stl(data, os.path.splitext(os.path.basename(path))[0])
    log.debug(f"read {path}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles")
    return mesh
